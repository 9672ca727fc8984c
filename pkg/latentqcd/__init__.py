from .common import GlobalContext, LatentQcdError
from .errormodel import HmmSpec, sample_path
from .kernels import ReferenceSet, build_reference
from .detectors import DcMmdDetector, Detector
from .evaluation import ScenarioSpec
