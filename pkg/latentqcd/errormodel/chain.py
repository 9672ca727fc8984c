import logging

import numpy as np
import scipy.linalg

from ..common.errors import ConvergenceError, InvalidSpecError
from .spec import validate_transition


def _check_stochastic(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidSpecError(f"Expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)) or np.any(M < 0):
        raise InvalidSpecError(
            "Transition matrix entries must be finite and non-negative"
        )
    if np.any(np.abs(M.sum(axis=1) - 1.0) > 1e-10):
        raise InvalidSpecError("Transition matrix rows must sum to 1")
    return M


def stationary_distribution(P: np.ndarray) -> np.ndarray:
    """Closed form stationary distribution of a two-state chain.

    Args:
        P (np.ndarray): 2x2 transition matrix with strictly positive entries.

    Returns:
        np.ndarray: `(pi_L, pi_H)` with `pi_L = P_HL / (P_LH + P_HL)`.
    """
    P = validate_transition(P)
    p_lh, p_hl = P[0, 1], P[1, 0]
    pi_l = p_hl / (p_lh + p_hl)
    return np.array([pi_l, 1.0 - pi_l])


def limiting_distribution(M: np.ndarray) -> np.ndarray:
    """Stationary distribution of an irreducible chain from its left Perron vector."""
    M = _check_stochastic(M)
    try:
        values, vectors = scipy.linalg.eig(M, left=True, right=False)
    except scipy.linalg.LinAlgError as e:
        raise ConvergenceError(f"Eigen-decomposition failed: {e}") from e
    index = int(np.argmin(np.abs(values - 1.0)))
    # the Perron vector of an irreducible chain has entries of one sign
    pi = np.abs(np.real(vectors[:, index]))
    return pi / pi.sum()


def second_order_chain(P: np.ndarray) -> np.ndarray:
    """Lifts a two-state chain to the chain of consecutive mode pairs.

    Pair `(i, j)` has index `2 * i + j` and moves to `(j, k)` with probability
    `P[j, k]`.

    Args:
        P (np.ndarray): 2x2 transition matrix.

    Returns:
        np.ndarray: The 4x4 row-stochastic pair chain.
    """
    P = validate_transition(P)
    M = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            for k in range(2):
                M[2 * i + j, 2 * j + k] = P[j, k]
    return M


def _base_of_pair_chain(M: np.ndarray) -> np.ndarray | None:
    """Returns the 2x2 chain `M` was lifted from, or None if `M` is no pair chain."""
    if M.shape != (4, 4):
        return None
    P = np.vstack([M[0, :2], M[1, 2:]])
    if np.any(P <= 0):
        return None
    lifted = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            lifted[2 * i + j, 2 * j : 2 * j + 2] = P[j]
    return P if np.array_equal(lifted, M) else None


def second_eigenvalue_modulus(M: np.ndarray) -> float:
    """Returns |lambda_2|, the second largest eigenvalue modulus of `M`.

    Two-state chains use the exact value `|trace - 1|`. Pair chains built by
    `second_order_chain` carry the spectrum of their base chain plus a defective
    zero eigenvalue, so they are reduced to the base chain first.

    Raises:
        ConvergenceError: If the eigen-decomposition fails.
    """
    M = _check_stochastic(M)
    base = _base_of_pair_chain(M)
    if base is not None:
        M = base
    if M.shape == (1, 1):
        return 0.0
    if M.shape == (2, 2):
        return float(abs(M[0, 0] + M[1, 1] - 1.0))
    try:
        values = scipy.linalg.eigvals(M)
    except scipy.linalg.LinAlgError as e:
        raise ConvergenceError(f"Eigen-decomposition failed: {e}") from e
    if not np.all(np.isfinite(values)):
        raise ConvergenceError("Eigen-decomposition returned non-finite eigenvalues")
    moduli = np.sort(np.abs(values))[::-1]
    if moduli[1] > 1.0 + 1e-9:
        logging.warning(f"Second eigenvalue modulus {moduli[1]} exceeds 1")
    return float(min(moduli[1], 1.0))


def spectral_gap(M: np.ndarray) -> float:
    """Returns 1 - |lambda_2| of a row-stochastic matrix.

    Lifting a two-state chain with `second_order_chain` adds only zero eigenvalues,
    so the gap of the lift equals the gap of the base chain.
    """
    return 1.0 - second_eigenvalue_modulus(M)


def pair_stationary_distribution(P: np.ndarray) -> np.ndarray:
    """Stationary mass `pi_i * P_ij` of the pair chain.

    Indexed as in `second_order_chain`.
    """
    P = validate_transition(P)
    pi = stationary_distribution(P)
    return (pi[:, None] * P).ravel()
