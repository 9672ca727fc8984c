from __future__ import annotations

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from ..errormodel import Gaussian, HmmSpec, stationary_distribution

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def gaussian_logpdf(x: float, mean: float, std: float) -> float:
    """Scalar Gaussian log density in closed form, used on the per-step hot path."""
    z = (x - mean) / std
    return -0.5 * z * z - math.log(std) - _HALF_LOG_2PI


def marginal_gaussian(spec: HmmSpec) -> Gaussian:
    """Single Gaussian matching mean and variance of the stationary marginal of `spec`."""
    pi = stationary_distribution(spec.P)
    means = np.array([e.mean for e in spec.emissions])
    variances = np.array([e.variance for e in spec.emissions])
    mean = float(pi @ means)
    variance = float(pi @ (variances + means**2) - mean**2)
    return Gaussian(mean=mean, std=math.sqrt(variance))


class GaussianMixture(BaseModel):
    """Finite mixture of Gaussians. Components with zero weight are ignored by `logpdf`."""

    model_config = ConfigDict(frozen=True)

    weights: tuple[float, ...]
    components: tuple[Gaussian, ...]

    @model_validator(mode="after")
    def _check(self) -> GaussianMixture:
        if len(self.weights) != len(self.components) or not self.weights:
            raise ValueError("A mixture needs one weight per component")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError(
                f"Mixture weights must be non-negative and sum to 1, got {self.weights}"
            )
        return self

    @classmethod
    def from_spec(cls, spec: HmmSpec) -> GaussianMixture:
        """Mixture of the per-mode emissions weighted by the stationary distribution.

        Non-Gaussian emissions are replaced by the Gaussian with the same mean and variance.
        """
        pi = stationary_distribution(spec.P)
        return cls(
            weights=tuple(float(w) for w in pi),
            components=tuple(e.as_kind("gaussian") for e in spec.emissions),
        )

    @classmethod
    def single(cls, component: Gaussian) -> GaussianMixture:
        return cls(weights=(1.0,), components=(component,))

    def shifted(self, kappa: float) -> GaussianMixture:
        """Moves every component mean up by `kappa` of its own standard deviation."""
        return GaussianMixture(
            weights=self.weights,
            components=tuple(
                c.shifted(delta_mean=kappa * c.std) for c in self.components
            ),
        )

    def logpdf(self, x: float) -> float:
        terms = [
            math.log(w) + gaussian_logpdf(x, c.mean, c.std)
            for w, c in zip(self.weights, self.components)
            if w > 0
        ]
        return float(np.logaddexp.reduce(terms))
