import math

import numpy as np
import pytest
from pathlib import Path
import sys, os

sys.path.insert(0, Path(os.path.dirname(__file__)).parent.parent.as_posix())

from latentqcd.common.errors import InvalidSpecError, LengthMismatchError
from latentqcd.errormodel import ErrorPath, Gaussian, HmmSpec, Laplace, LatentMode, StudentT, validate_transition


def _spec(p_lh: float = 0.1, p_hl: float = 0.3) -> HmmSpec:
    return HmmSpec.from_matrix(
        np.array([[1 - p_lh, p_lh], [p_hl, 1 - p_hl]]),
        emission_L=Gaussian(mean=0.0, std=0.3),
        emission_H=Gaussian(mean=2.0, std=0.3),
    )


def test_symmetric_spec_builds_switching_matrix():
    # Act
    spec = HmmSpec.symmetric(0.15, Gaussian(mean=0.0, std=1.0), Gaussian(mean=1.0, std=1.0))

    # Assert
    np.testing.assert_allclose(spec.P, [[0.85, 0.15], [0.15, 0.85]])
    assert spec.emission(LatentMode.H).mean == 1.0
    assert spec.is_gaussian


@pytest.mark.parametrize(
    "P",
    [
        [[0.5, 0.4], [0.5, 0.5]],
        [[1.0, 0.0], [0.5, 0.5]],
        [[0.5, 0.5, 0.0], [0.5, 0.5, 0.0]],
        [[float("nan"), 0.5], [0.5, 0.5]],
    ],
)
def test_validate_transition_rejects_invalid_matrices(P):
    # Act & Assert
    with pytest.raises(InvalidSpecError):
        validate_transition(P)


def test_spec_rejects_mode_order_violation():
    # Act & Assert
    with pytest.raises(ValueError):
        HmmSpec.symmetric(0.1, Gaussian(mean=2.0, std=1.0), Gaussian(mean=0.0, std=1.0))


def test_spec_json_keeps_emission_kinds():
    # Arrange
    spec = HmmSpec.symmetric(
        0.2,
        Laplace(location=0.0, scale=0.5),
        StudentT(location=1.0, scale=0.4, dof=3.0),
    )

    # Act
    restored = HmmSpec.from_json(spec.to_json())

    # Assert
    assert restored == spec
    assert isinstance(restored.emission_L, Laplace)
    assert isinstance(restored.emission_H, StudentT)
    assert not restored.is_gaussian


def test_spec_save_and_load(tmp_path):
    # Arrange
    spec = _spec()

    # Act
    spec.save(tmp_path / "spec.json")
    loaded = HmmSpec.load(tmp_path / "spec.json")

    # Assert
    assert loaded == spec


def test_tail_swaps_match_variance():
    # Arrange
    gaussian = Gaussian(mean=1.0, std=0.6)

    # Act
    laplace = gaussian.as_kind("laplace")
    student = gaussian.as_kind("student_t", dof=3.0)

    # Assert
    assert laplace.scale == pytest.approx(0.6 / math.sqrt(2.0))
    assert student.scale == pytest.approx(0.6 / math.sqrt(3.0))
    assert laplace.variance == pytest.approx(gaussian.variance)
    assert student.variance == pytest.approx(gaussian.variance)
    assert laplace.mean == student.mean == 1.0


def test_student_t_needs_finite_variance():
    # Act & Assert
    with pytest.raises(ValueError):
        StudentT(location=0.0, scale=1.0, dof=2.0)


def test_error_path_rejects_length_mismatch():
    # Act & Assert
    with pytest.raises(LengthMismatchError):
        ErrorPath(modes=np.zeros(3, dtype=np.int8), errors=np.zeros(2), seed=0)
