import math

import numpy as np
import pytest
from pathlib import Path
import sys, os

sys.path.insert(0, Path(os.path.dirname(__file__)).parent.parent.as_posix())

from latentqcd.common.errors import DegenerateSampleError, InvalidSpecError, NonFiniteValueError
from latentqcd.kernels import RbfKernel, median_heuristic, rbf_eval


def test_rbf_is_one_on_identical_points():
    # Act & Assert
    assert rbf_eval((0.3, -1.2), (0.3, -1.2), 0.8) == 1.0


def test_rbf_closed_form_value():
    # Act
    value = rbf_eval((0.0, 0.0), (1.0, 0.0), 0.8)

    # Assert
    assert value == pytest.approx(math.exp(-1 / 1.28), abs=1e-15)
    assert value == pytest.approx(0.45783, abs=1e-5)


def test_rbf_is_symmetric_and_bounded():
    # Arrange
    rng = np.random.default_rng(0)

    for _ in range(20):
        x, y = rng.normal(size=2), rng.normal(size=2)

        # Act
        forward, backward = rbf_eval(x, y, 0.5), rbf_eval(y, x, 0.5)

        # Assert
        assert forward == backward
        assert 0 < forward <= 1


def test_rbf_grows_with_bandwidth():
    # Act
    values = [rbf_eval((0.0, 0.0), (1.0, 1.0), sigma) for sigma in (0.2, 0.5, 1.0, 2.0)]

    # Assert
    assert values == sorted(values)


def test_rbf_rejects_invalid_arguments():
    # Act & Assert
    with pytest.raises(InvalidSpecError):
        rbf_eval((0.0, 0.0), (1.0, 0.0), 0.0)
    with pytest.raises(NonFiniteValueError):
        rbf_eval((0.0, float("nan")), (1.0, 0.0), 0.8)


def test_gram_mean_matches_brute_force():
    # Arrange
    rng = np.random.default_rng(2)
    x, y = rng.normal(size=(30, 2)), rng.normal(size=(17, 2))
    kernel = RbfKernel(0.7)
    brute = sum(rbf_eval(a, b, 0.7) for a in x for b in y) / (30 * 17)

    # Act
    value = kernel.gram_mean(x, y, chunk_size=4)

    # Assert
    assert value == pytest.approx(brute, abs=1e-12)


@pytest.mark.parametrize(
    "samples, expected",
    [([(0, 0), (1, 0)], 1.0), ([(0, 0), (1, 0), (2, 0)], 1.0)],
)
def test_median_heuristic(samples, expected):
    # Act & Assert
    assert median_heuristic(samples) == pytest.approx(expected)


def test_median_heuristic_rejects_identical_samples():
    # Act & Assert
    with pytest.raises(DegenerateSampleError):
        median_heuristic([(1.0, 1.0)] * 5)
