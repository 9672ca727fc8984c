from __future__ import annotations

import math

from ..common.errors import InvalidSpecError, NonFiniteValueError
from ..errormodel import Gaussian, HmmSpec
from .densities import GaussianMixture, gaussian_logpdf, marginal_gaussian
from .detector import Detector


class CusumDetector(Detector):
    """Page CUSUM `W = max(0, W + log g(e) - log f(e))` with pre-change density f and post-change density g."""

    def log_ratio(self, e: float) -> float:
        raise NotImplementedError("Please implement this method")

    def _update(self, e: float) -> bool:
        increment = self.log_ratio(e)
        if not math.isfinite(increment):
            raise NonFiniteValueError(f"Non-finite log-likelihood ratio for error {e}")
        self.state.statistic = max(0.0, self.state.statistic + increment)
        return True


class GaussianCusumDetector(CusumDetector):
    label = "G-CUSUM"

    def __init__(self, pre: Gaussian, post: Gaussian, threshold: float = 5.0):
        """Classical CUSUM between two Gaussian error densities.

        Args:
            pre (Gaussian): Pre-change density.
            post (Gaussian): Assumed post-change density.
            threshold (float, optional): Alarm threshold. Defaults to 5.
        """
        super().__init__(threshold)
        self.pre = pre
        self.post = post

    def log_ratio(self, e: float) -> float:
        post = gaussian_logpdf(e, self.post.mean, self.post.std)
        return post - gaussian_logpdf(e, self.pre.mean, self.pre.std)

    @classmethod
    def from_specs(
        cls, pre: HmmSpec, post: HmmSpec, threshold: float = 5.0
    ) -> GaussianCusumDetector:
        """Builds the detector from the moment matched marginals of both error processes."""
        return cls(
            pre=marginal_gaussian(pre),
            post=marginal_gaussian(post),
            threshold=threshold,
        )


class GmmCusumDetector(CusumDetector):
    label = "GMM-CUSUM"

    def __init__(
        self, pre: GaussianMixture, post: GaussianMixture, threshold: float = 5.0
    ):
        """CUSUM between two Gaussian mixture densities.

        Args:
            pre (GaussianMixture): Pre-change mixture, usually weighted by the stationary mode distribution.
            post (GaussianMixture): Assumed post-change mixture.
            threshold (float, optional): Alarm threshold. Defaults to 5.
        """
        super().__init__(threshold)
        self.pre = pre
        self.post = post

    def log_ratio(self, e: float) -> float:
        return self.post.logpdf(e) - self.pre.logpdf(e)

    @classmethod
    def from_specs(
        cls,
        pre: HmmSpec,
        post: HmmSpec | None = None,
        threshold: float = 5.0,
        kappa: float = 2.0,
    ) -> GmmCusumDetector:
        """Builds the detector from error processes.

        Without `post` every pre-change component mean is moved up by `kappa` standard deviations.
        """
        pre_mixture = GaussianMixture.from_spec(pre)
        if post is None:
            post_mixture = pre_mixture.shifted(kappa)
        else:
            post_mixture = GaussianMixture.from_spec(post)
        return cls(pre=pre_mixture, post=post_mixture, threshold=threshold)


class RobustCusumDetector(CusumDetector):
    label = "Robust CUSUM"

    def __init__(self, pre: Gaussian, kappa: float = 2.0, threshold: float = 5.0):
        """CUSUM against the surrogate post-change density `N(mean + kappa std, std)`.

        Args:
            pre (Gaussian): Pre-change density.
            kappa (float, optional): Shift in pre-change standard deviations, positive. Defaults to 2.
            threshold (float, optional): Alarm threshold. Defaults to 5.
        """
        super().__init__(threshold)
        if not kappa > 0:
            raise InvalidSpecError(f"kappa must be positive, got {kappa}")
        self.pre = pre
        self.kappa = kappa
        self.post = pre.shifted(delta_mean=kappa * pre.std)

    def log_ratio(self, e: float) -> float:
        post = gaussian_logpdf(e, self.post.mean, self.post.std)
        return post - gaussian_logpdf(e, self.pre.mean, self.pre.std)

    @classmethod
    def from_spec(
        cls, pre: HmmSpec, kappa: float = 2.0, threshold: float = 5.0
    ) -> RobustCusumDetector:
        return cls(pre=marginal_gaussian(pre), kappa=kappa, threshold=threshold)
