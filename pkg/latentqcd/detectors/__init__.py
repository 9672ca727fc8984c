from .detector import Alarm, Detector, DetectorState
from .densities import GaussianMixture, gaussian_logpdf, marginal_gaussian
from .dcmmd import DcMmdDetector, calibrate_offset, check_offset
from .cusum import (
    CusumDetector,
    GaussianCusumDetector,
    GmmCusumDetector,
    RobustCusumDetector,
)
from .pointwise import LatentGmmDetector, NllDetector, PointwiseDetector
from .runner import RunResult, run_to_alarm, write_alarm, write_trace
