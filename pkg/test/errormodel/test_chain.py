import numpy as np
import pytest
from pathlib import Path
import sys, os

sys.path.insert(0, Path(os.path.dirname(__file__)).parent.parent.as_posix())

from latentqcd.common.errors import InvalidSpecError
from latentqcd.errormodel import (
    limiting_distribution,
    pair_stationary_distribution,
    second_eigenvalue_modulus,
    second_order_chain,
    spectral_gap,
    stationary_distribution,
)


def _matrix(p_lh: float, p_hl: float) -> np.ndarray:
    return np.array([[1 - p_lh, p_lh], [p_hl, 1 - p_hl]])


@pytest.mark.parametrize(
    "p_lh, p_hl, expected",
    [(0.5, 0.5, (0.5, 0.5)), (0.1, 0.3, (0.75, 0.25)), (0.05, 0.05, (0.5, 0.5))],
)
def test_stationary_distribution(p_lh, p_hl, expected):
    # Act
    pi = stationary_distribution(_matrix(p_lh, p_hl))

    # Assert
    np.testing.assert_allclose(pi, expected, atol=1e-12)
    np.testing.assert_allclose(pi @ _matrix(p_lh, p_hl), pi, atol=1e-12)


def test_stationary_distribution_rejects_reducible_chain():
    # Act & Assert
    with pytest.raises(InvalidSpecError):
        stationary_distribution(np.array([[1.0, 0.0], [0.3, 0.7]]))


def test_second_order_chain_structure():
    # Act
    M = second_order_chain(_matrix(0.5, 0.5))

    # Assert
    np.testing.assert_allclose(M.sum(axis=1), 1.0)
    for i in range(2):
        for j in range(2):
            row = M[2 * i + j]
            assert np.count_nonzero(row == 0.5) == 2
            assert row[2 * j] == 0.5 and row[2 * j + 1] == 0.5


def test_pair_chain_stationary_mass():
    # Arrange
    P = _matrix(0.1, 0.3)

    # Act
    pair = pair_stationary_distribution(P)
    eigen = limiting_distribution(second_order_chain(P))

    # Assert
    assert pair[0] == pytest.approx(0.675)
    np.testing.assert_allclose(eigen, pair, atol=1e-10)


@pytest.mark.parametrize("p, gap", [(0.5, 1.0), (0.05, 0.1)])
def test_spectral_gap_of_two_state_chain(p, gap):
    # Act
    value = spectral_gap(_matrix(p, p))
    lifted = spectral_gap(second_order_chain(_matrix(p, p)))

    # Assert
    assert value == pytest.approx(gap, abs=1e-10)
    assert lifted == pytest.approx(gap, abs=1e-10)


def test_lifted_gap_equals_base_gap_for_random_chains():
    # Arrange
    rng = np.random.default_rng(11)

    for _ in range(100):
        p_lh, p_hl = rng.uniform(0.01, 0.99, size=2)
        P = _matrix(p_lh, p_hl)

        # Act
        lifted = spectral_gap(second_order_chain(P))

        # Assert
        assert lifted == pytest.approx(1 - abs(1 - p_lh - p_hl), abs=1e-10)
        assert second_eigenvalue_modulus(P) == pytest.approx(abs(1 - p_lh - p_hl), abs=1e-10)


@pytest.mark.parametrize("p_lh", [0.05 * k for k in range(1, 20)])
def test_lifted_gap_is_exact_when_second_eigenvalue_vanishes(p_lh):
    # Arrange
    P = _matrix(p_lh, 1.0 - p_lh)

    # Act
    base = spectral_gap(P)
    lifted = spectral_gap(second_order_chain(P))

    # Assert
    assert base == pytest.approx(1.0, abs=1e-12)
    assert lifted == pytest.approx(base, abs=1e-10)


def test_second_eigenvalue_of_larger_chain():
    # Arrange
    M = np.array([[0.5, 0.5, 0.0], [0.25, 0.5, 0.25], [0.0, 0.5, 0.5]])

    # Act
    value = second_eigenvalue_modulus(M)

    # Assert
    assert value == pytest.approx(0.5, abs=1e-10)
