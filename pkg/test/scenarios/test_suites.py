import numpy as np
import pytest
from pathlib import Path
import sys, os

sys.path.insert(0, Path(os.path.dirname(__file__)).parent.parent.as_posix())

from latentqcd.detectors import DcMmdDetector, GaussianCusumDetector, NllDetector, RobustCusumDetector
from latentqcd.errormodel import Gaussian, HmmSpec, Laplace, StudentT, stationary_distribution
from latentqcd.evaluation import ScenarioSpec
from latentqcd.kernels import RbfKernel
from latentqcd.scenarios import EmissionShift, heavy_tail_suite, stationarity_suite, unknown_postchange_suite


@pytest.fixture
def base():
    pre = HmmSpec.from_matrix(
        np.array([[0.9, 0.1], [0.3, 0.7]]), Gaussian(mean=0.0, std=0.3), Gaussian(mean=1.0, std=0.3)
    )
    return ScenarioSpec(pre=pre, post=EmissionShift(delta_mean=1.0, sigma_scale=1.5).apply(pre), label="base")


def test_heavy_tail_suite(base):
    # Act
    suite = heavy_tail_suite(base)

    # Assert
    assert list(suite) == ["gaussian", "laplace", "student_t"]
    assert suite["gaussian"] is base
    assert isinstance(suite["laplace"].pre.emission_L, Laplace)
    assert isinstance(suite["student_t"].post.emission_H, StudentT)
    assert suite["student_t"].post.emission_H.variance == pytest.approx(base.post.emission_H.variance)
    assert suite["laplace"].label == "base/laplace"
    assert suite["laplace"].changepoint_grid == base.changepoint_grid


def test_stationarity_suite(base):
    # Act
    suite = stationarity_suite(base)

    # Assert
    assert suite["markov"] is base
    iid = suite["iid"].pre
    assert iid.emission_L == iid.emission_H
    assert iid.emission_L.mean == pytest.approx(0.25)
    mixture = suite["mixture"].pre
    np.testing.assert_allclose(mixture.P[0], mixture.P[1])
    np.testing.assert_allclose(mixture.P[0], stationary_distribution(base.pre.P))


def test_unknown_postchange_suite(base):
    # Act
    suite = unknown_postchange_suite(base, m=20, reference_size=200, kernel=RbfKernel(0.8))

    # Assert
    assert set(suite.detectors) == {"dc_mmd", "robust_cusum", "gcusum_misspecified", "nll"}
    assert isinstance(suite.detectors["dc_mmd"], DcMmdDetector)
    assert isinstance(suite.detectors["robust_cusum"], RobustCusumDetector)
    assert isinstance(suite.detectors["nll"], NllDetector)
    assert len(suite.detectors["dc_mmd"].reference) == 200
    assert suite.detectors["dc_mmd"].offset > 0


def test_misspecified_cusum_assumes_twice_the_shift(base):
    # Act
    suite = unknown_postchange_suite(base, m=20, reference_size=200, kernel=RbfKernel(0.8))
    detector = suite.detectors["gcusum_misspecified"]

    # Assert
    assert isinstance(detector, GaussianCusumDetector)
    assert detector.post.mean - detector.pre.mean == pytest.approx(2.0)
