from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..common.errors import DegenerateFitError, DegenerateSampleError
from ..common.utils import ensure_finite
from .chain import stationary_distribution
from .emissions import Gaussian
from .spec import HmmSpec, LatentMode

MIN_OBSERVATIONS = 100
MIN_STD = 1e-6
TRANSITION_FLOOR = 1e-10


@dataclass(frozen=True)
class FitResult:
    spec: HmmSpec
    log_likelihoods: list[float]
    converged: bool
    n_iter: int
    initial_distribution: np.ndarray

    @property
    def log_likelihood(self) -> float:
        return self.log_likelihoods[-1]


def _emission_log_densities(errors: np.ndarray, spec: HmmSpec) -> np.ndarray:
    return np.stack(
        [np.asarray(e.logpdf(errors), dtype=float) for e in spec.emissions], axis=1
    )


def _forward_backward(
    log_b: np.ndarray, P: np.ndarray, initial: np.ndarray
) -> tuple[np.ndarray, np.ndarray, float]:
    """Scaled forward-backward pass.

    Args:
        log_b (np.ndarray): `(T, 2)` emission log densities.
        P (np.ndarray): Transition matrix.
        initial (np.ndarray): Distribution of the first mode.

    Returns:
        tuple[np.ndarray, np.ndarray, float]: Posterior mode probabilities `(T, 2)`, expected
            transition counts `(2, 2)` and the log-likelihood.
    """
    T = log_b.shape[0]
    shift = log_b.max(axis=1)
    b = np.exp(log_b - shift[:, None])

    alpha = np.empty((T, 2))
    scale = np.empty(T)
    alpha[0] = initial * b[0]
    scale[0] = alpha[0].sum()
    alpha[0] /= scale[0]
    for t in range(1, T):
        alpha[t] = (alpha[t - 1] @ P) * b[t]
        scale[t] = alpha[t].sum()
        alpha[t] /= scale[t]

    beta = np.empty((T, 2))
    beta[-1] = 1.0
    for t in range(T - 2, -1, -1):
        beta[t] = P @ (b[t + 1] * beta[t + 1]) / scale[t + 1]

    gamma = alpha * beta
    gamma /= gamma.sum(axis=1, keepdims=True)

    forward = alpha[:-1, :, None] * P[None, :, :]
    xi = forward * (b[1:] * beta[1:])[:, None, :] / scale[1:, None, None]
    log_likelihood = float(np.sum(np.log(scale)) + np.sum(shift))
    return gamma, xi.sum(axis=0), log_likelihood


def _check_observations(errors) -> np.ndarray:
    errors = np.asarray(errors, dtype=float).ravel()
    ensure_finite(errors, "error observation")
    return errors


def log_likelihood(errors, spec: HmmSpec, initial: np.ndarray | None = None) -> float:
    """Log-likelihood of an error sequence under `spec`, started in the stationary distribution by default."""
    errors = _check_observations(errors)
    if errors.size == 0:
        raise DegenerateSampleError(
            "Cannot evaluate the likelihood of an empty sequence"
        )
    if initial is None:
        initial = stationary_distribution(spec.P)
    else:
        initial = np.asarray(initial, dtype=float)
    _, _, ll = _forward_backward(_emission_log_densities(errors, spec), spec.P, initial)
    return ll


def map_mode_assignment(errors, spec: HmmSpec) -> list[LatentMode]:
    """Assigns each time step the mode with the highest posterior responsibility.

    Ties go to the mode listed first, which is the prior dominant one when the emissions coincide.
    """
    errors = _check_observations(errors)
    if errors.size == 0:
        return []
    gamma, _, _ = _forward_backward(
        _emission_log_densities(errors, spec), spec.P, stationary_distribution(spec.P)
    )
    prior = stationary_distribution(spec.P)
    order = np.argsort(-prior, kind="stable")
    best = order[np.argmax(gamma[:, order], axis=1)]
    return [LatentMode(int(z)) for z in best]


def _initial_spec(errors: np.ndarray) -> tuple[HmmSpec, np.ndarray]:
    median = np.median(errors)
    low, high = errors[errors <= median], errors[errors > median]
    if high.size == 0:
        low, high = errors[errors < median], errors[errors >= median]
    if low.size == 0 or high.size == 0:
        raise DegenerateFitError("Observations cannot be split into two modes")
    within = np.sum((low - low.mean()) ** 2) + np.sum((high - high.mean()) ** 2)
    pooled = np.sqrt(within / errors.size)
    pooled = max(float(pooled), MIN_STD)
    spec = HmmSpec(
        transition=((0.9, 0.1), (0.1, 0.9)),
        emission_L=Gaussian(mean=float(low.mean()), std=pooled),
        emission_H=Gaussian(mean=float(high.mean()), std=pooled),
    )
    return spec, np.array([0.5, 0.5])


def fit_two_state_hmm(errors, max_iters: int = 200, tol: float = 1e-6) -> FitResult:
    """Fits a two-state Gaussian-emission HMM with Baum-Welch.

    Args:
        errors (array-like): At least 100 finite observations.
        max_iters (int, optional): Maximum number of EM iterations. Defaults to 200.
        tol (float, optional): Stop once the log-likelihood improves by less than this. Defaults to 1e-6.

    Raises:
        DegenerateSampleError: If fewer than 100 observations are given.
        DegenerateFitError: If an estimated standard deviation collapses below 1e-6.

    Returns:
        FitResult: The fit, with `converged=False` if `max_iters` was exhausted.
    """
    errors = _check_observations(errors)
    if errors.size < MIN_OBSERVATIONS:
        raise DegenerateSampleError(
            f"At least {MIN_OBSERVATIONS} observations are required, got {errors.size}"
        )
    if np.std(errors) < MIN_STD:
        raise DegenerateFitError("Observations are constant")

    spec, initial = _initial_spec(errors)
    P = spec.P
    means = np.array([spec.emission_L.mean, spec.emission_H.mean])
    stds = np.array([spec.emission_L.std, spec.emission_H.std])

    history: list[float] = []
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iters + 1):
        log_b = stats.norm.logpdf(
            errors[:, None], loc=means[None, :], scale=stds[None, :]
        )
        gamma, xi_sum, ll = _forward_backward(log_b, P, initial)
        history.append(ll)

        weights = gamma.sum(axis=0)
        means = gamma.T @ errors / weights
        squared = (errors[:, None] - means[None, :]) ** 2
        stds = np.sqrt(np.sum(gamma * squared, axis=0) / weights)
        if np.any(stds < MIN_STD):
            raise DegenerateFitError(
                f"Estimated standard deviation collapsed: {stds.tolist()}"
            )
        P = np.maximum(xi_sum / xi_sum.sum(axis=1, keepdims=True), TRANSITION_FLOOR)
        P /= P.sum(axis=1, keepdims=True)
        initial = gamma[0]

        if len(history) > 1 and history[-1] - history[-2] < tol:
            converged = True
            break

    if not converged:
        logging.warning(f"Baum-Welch did not converge within {max_iters} iterations")

    if means[0] > means[1]:
        means, stds, initial = means[::-1], stds[::-1], initial[::-1]
        P = P[::-1, ::-1]

    fitted = HmmSpec.from_matrix(
        P,
        emission_L=Gaussian(mean=float(means[0]), std=float(stds[0])),
        emission_H=Gaussian(mean=float(means[1]), std=float(stds[1])),
    )
    logging.info(
        f"Fitted two-state HMM after {n_iter} iterations, log-likelihood {history[-1]:.4f}"
    )
    return FitResult(
        spec=fitted,
        log_likelihoods=history,
        converged=converged,
        n_iter=n_iter,
        initial_distribution=np.asarray(initial, dtype=float),
    )
