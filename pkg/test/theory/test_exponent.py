import numpy as np
import pytest
from pathlib import Path
import sys, os

sys.path.insert(0, Path(os.path.dirname(__file__)).parent.parent.as_posix())

from latentqcd.common.errors import DegenerateSampleError, InvalidSpecError
from latentqcd.theory import fit_mtfa_exponent


def test_exact_exponential_growth():
    # Arrange
    points = [(b, 3.0 * np.exp(2.0 * b)) for b in (0.5, 1.0, 1.5, 2.0, 2.5)]

    # Act
    fit = fit_mtfa_exponent(points)

    # Assert
    assert fit.q == pytest.approx(2.0)
    assert fit.intercept == pytest.approx(np.log(3.0))
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.n_points == 5
    assert fit.consistent


def test_noisy_exponential_growth():
    # Arrange
    rng = np.random.default_rng(0)
    points = [(b, np.exp(1.5 * b + rng.normal(0, 0.05))) for b in np.linspace(1, 5, 5)]

    # Act
    fit = fit_mtfa_exponent(points)

    # Assert
    assert fit.q == pytest.approx(1.5, abs=0.1)
    assert fit.r_squared >= 0.9


def test_flat_mtfa_is_not_consistent():
    # Act
    fit = fit_mtfa_exponent([(b, 200.0) for b in (1, 2, 3, 4)])

    # Assert
    assert fit.q == 0.0
    assert not fit.consistent


def test_too_few_points():
    # Act & Assert
    with pytest.raises(DegenerateSampleError):
        fit_mtfa_exponent([(1, 10.0), (2, 20.0), (3, 40.0)])


@pytest.mark.parametrize(
    "points, censored",
    [
        ([(1, 10.0), (2, 20.0), (3, 40.0), (4, 80.0)], [False, False, False, True]),
        ([(1, 10.0), (2, 20.0), (3, 0.0), (4, 80.0)], None),
        ([(1, 10.0), (1, 20.0), (3, 40.0), (4, 80.0)], None),
    ],
)
def test_invalid_points(points, censored):
    # Act & Assert
    with pytest.raises(InvalidSpecError):
        fit_mtfa_exponent(points, censored)
