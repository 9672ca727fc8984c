from __future__ import annotations

import math

from ..errormodel import Emission, Gaussian, HmmSpec
from .densities import GaussianMixture, gaussian_logpdf, marginal_gaussian
from .detector import Detector


class PointwiseDetector(Detector):
    """Scores every error on its own as `-log f(e)` and alarms on the first score above the threshold.

    There is no accumulation over time, the statistic is the score of the latest error.
    """

    def score(self, e: float) -> float:
        raise NotImplementedError("Please implement this method")

    def _update(self, e: float) -> bool:
        score = self.score(e)
        # zero density scores +inf and alarms
        self.state.statistic = math.inf if math.isnan(score) else score
        return True


class NllDetector(PointwiseDetector):
    label = "NLL"

    def __init__(self, pre: Emission, threshold: float = 5.0):
        """Negative log-likelihood of each error under the pre-change density.

        Args:
            pre (Emission): Pre-change error density.
            threshold (float, optional): Alarm threshold. Defaults to 5.
        """
        super().__init__(threshold)
        self.pre = pre

    def score(self, e: float) -> float:
        if isinstance(self.pre, Gaussian):
            return -gaussian_logpdf(e, self.pre.mean, self.pre.std)
        return -float(self.pre.logpdf(e))

    @classmethod
    def from_spec(cls, pre: HmmSpec, threshold: float = 5.0) -> NllDetector:
        return cls(pre=marginal_gaussian(pre), threshold=threshold)


class LatentGmmDetector(PointwiseDetector):
    label = "lGMM"

    def __init__(self, pre: GaussianMixture, threshold: float = 5.0):
        """Negative log-likelihood under a fitted two-component latent mixture.

        Args:
            pre (GaussianMixture): Pre-change mixture with stationary mode weights.
            threshold (float, optional): Alarm threshold. Defaults to 5.
        """
        super().__init__(threshold)
        self.pre = pre

    def score(self, e: float) -> float:
        return -self.pre.logpdf(e)

    @classmethod
    def from_spec(cls, pre: HmmSpec, threshold: float = 5.0) -> LatentGmmDetector:
        return cls(pre=GaussianMixture.from_spec(pre), threshold=threshold)
