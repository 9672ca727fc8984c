from __future__ import annotations

import math

import numpy as np
from scipy.spatial.distance import cdist, pdist

from ..common.errors import DegenerateSampleError, InvalidSpecError
from ..common.transferables import Transferable
from ..common.utils import ensure_finite

DEFAULT_CHUNK_SIZE = 2048


def as_pairs(samples) -> np.ndarray:
    """Coerces samples to a float array of shape `(n, 2)`."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1 and samples.size == 2:
        samples = samples[None, :]
    if samples.ndim != 2 or samples.shape[1] != 2:
        raise InvalidSpecError(
            f"Second-order samples must have shape (n, 2), got {samples.shape}"
        )
    return samples


class RbfKernel(Transferable, is_base_type=True):
    def __init__(self, bandwidth: float = 0.8):
        """Gaussian RBF kernel `k(x, y) = exp(-|x - y|^2 / (2 bandwidth^2))`.

        Args:
            bandwidth (float, optional): Kernel bandwidth sigma, strictly positive. Defaults to 0.8.
        """
        if not math.isfinite(bandwidth) or bandwidth <= 0:
            raise InvalidSpecError(
                f"Kernel bandwidth must be positive and finite, got {bandwidth}"
            )
        self.bandwidth = float(bandwidth)

    def gram(self, x, y) -> np.ndarray:
        x, y = as_pairs(x), as_pairs(y)
        return np.exp(-cdist(x, y, "sqeuclidean") / (2.0 * self.bandwidth**2))

    def __call__(self, x, y) -> float:
        return float(self.gram(x, y)[0, 0])

    def gram_mean(self, x, y, chunk_size: int = DEFAULT_CHUNK_SIZE) -> float:
        """Mean of the Gram matrix between `x` and `y` over all ordered pairs, computed in row chunks.

        Chunk sums are combined with compensated summation so the result does not depend on the
        order of the samples beyond round-off.
        """
        x, y = as_pairs(x), as_pairs(y)
        if x.shape[0] == 0 or y.shape[0] == 0:
            raise DegenerateSampleError("Kernel mean over an empty sample")
        partial_sums = [
            float(np.sum(self.gram(x[start : start + chunk_size], y)))
            for start in range(0, x.shape[0], chunk_size)
        ]
        return math.fsum(partial_sums) / (x.shape[0] * y.shape[0])

    def __repr__(self) -> str:
        return f"RbfKernel(bandwidth={self.bandwidth})"


def rbf_eval(x, y, sigma: float) -> float:
    """Evaluates the RBF kernel on two second-order samples.

    Args:
        x (array-like): First pair `(e_{t-1}, e_t)`.
        y (array-like): Second pair.
        sigma (float): Bandwidth, strictly positive.

    Returns:
        float: `exp(-|x - y|^2 / (2 sigma^2))` in (0, 1].
    """
    x, y = as_pairs(x), as_pairs(y)
    ensure_finite(x, "sample coordinate")
    ensure_finite(y, "sample coordinate")
    return RbfKernel(sigma)(x, y)


def median_heuristic(samples, max_samples: int = 2000, seed: int = 0) -> float:
    """Median of the pairwise Euclidean distances over distinct index pairs.

    Larger sets are subsampled to `max_samples` points with a fixed seed before the distances are taken.

    Raises:
        DegenerateSampleError: If fewer than two samples are given or all samples coincide.
    """
    samples = as_pairs(samples)
    ensure_finite(samples, "sample coordinate")
    if samples.shape[0] < 2:
        raise DegenerateSampleError("The median heuristic needs at least two samples")
    if samples.shape[0] > max_samples:
        rng = np.random.default_rng(seed)
        index = np.sort(rng.choice(samples.shape[0], max_samples, replace=False))
        samples = samples[index]
    median = float(np.median(pdist(samples)))
    if median <= 0:
        raise DegenerateSampleError(
            "All samples are identical, the median distance is zero"
        )
    return median
