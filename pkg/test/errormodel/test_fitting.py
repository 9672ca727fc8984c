import numpy as np
import pytest
from pathlib import Path
import sys, os

sys.path.insert(0, Path(os.path.dirname(__file__)).parent.parent.as_posix())

from latentqcd.common.errors import DegenerateFitError, DegenerateSampleError
from latentqcd.errormodel import (
    Gaussian,
    HmmSpec,
    LatentMode,
    fit_two_state_hmm,
    log_likelihood,
    map_mode_assignment,
    sample_path,
)


@pytest.fixture(scope="module")
def truth() -> HmmSpec:
    return HmmSpec.symmetric(0.1, Gaussian(mean=0.0, std=0.3), Gaussian(mean=2.0, std=0.3))


@pytest.fixture(scope="module")
def path(truth):
    return sample_path(truth, 10_000, seed=3)


def test_fit_recovers_known_spec(path):
    # Act
    result = fit_two_state_hmm(path.errors)

    # Assert
    spec = result.spec
    assert abs(spec.emission_H.mean - spec.emission_L.mean - 2.0) <= 0.2
    assert abs(spec.P[0, 0] - 0.9) <= 0.05
    assert spec.emission_L.mean <= spec.emission_H.mean
    assert result.converged


def test_fit_log_likelihood_never_decreases(path):
    # Act
    result = fit_two_state_hmm(path.errors[:2000], max_iters=50)

    # Assert
    assert np.all(np.diff(result.log_likelihoods) >= -1e-9)
    assert result.log_likelihood == result.log_likelihoods[-1]


def test_fit_rejects_constant_sequence():
    # Act & Assert
    with pytest.raises(DegenerateFitError):
        fit_two_state_hmm(np.full(500, 1.5))


def test_fit_rejects_short_sequence():
    # Act & Assert
    with pytest.raises(DegenerateSampleError):
        fit_two_state_hmm(np.arange(50, dtype=float))


def test_log_likelihood_prefers_true_spec(truth, path):
    # Arrange
    wrong = HmmSpec.symmetric(0.1, Gaussian(mean=1.0, std=0.3), Gaussian(mean=3.0, std=0.3))

    # Act
    good = log_likelihood(path.errors[:1000], truth)
    bad = log_likelihood(path.errors[:1000], wrong)

    # Assert
    assert good > bad


def test_map_assignment_of_far_low_error(truth):
    # Act
    modes = map_mode_assignment(np.array([-10.0, -10.0, -10.0]), truth)

    # Assert
    assert modes == [LatentMode.L] * 3


def test_map_assignment_accuracy_on_separated_spec(truth, path):
    # Act
    modes = map_mode_assignment(path.errors, truth)

    # Assert
    accuracy = np.mean(np.array([int(m) for m in modes]) == path.modes)
    assert len(modes) == len(path)
    assert accuracy >= 0.95


def test_map_assignment_with_identical_emissions_follows_prior():
    # Arrange
    emission = Gaussian(mean=0.0, std=1.0)
    spec = HmmSpec.from_matrix(np.array([[0.9, 0.1], [0.3, 0.7]]), emission, emission)

    # Act
    modes = map_mode_assignment(np.linspace(-2, 2, 25), spec)

    # Assert
    assert set(modes) == {LatentMode.L}
