from __future__ import annotations

import math
from collections import deque

import numpy as np

from ..common.errors import InvalidSpecError
from ..errormodel import HmmSpec, sample_path
from ..kernels import (
    ReferenceSet,
    block_pairs,
    mmd,
    mmd_between_samples,
    second_order_samples,
)
from .detector import Detector

MIN_BLOCKS_FOR_VARIANCE = 3


class DcMmdDetector(Detector):
    label = "DC-MMD"

    def __init__(
        self,
        reference: ReferenceSet,
        m: int = 50,
        offset: float = 0.05,
        threshold: float = 1.0,
        normalize: bool = False,
        var_window: int = 20,
        eps: float = 1e-6,
        fixed_variance: float | None = None,
    ):
        """Blockwise MMD CUSUM over second-order errors.

        Every `m` errors the `m - 1` consecutive pairs of the block are compared with the reference
        by MMD and the statistic is updated as `W = max(0, W + D - offset)`.

        Args:
            reference (ReferenceSet): In-distribution second-order samples with their kernel.
            m (int, optional): Block length, at least 2. Defaults to 50.
            offset (float, optional): Drift offset zeta, non-negative. Defaults to 0.05.
            threshold (float, optional): Alarm threshold b. Defaults to 1.0.
            normalize (bool, optional): Divide each increment by the root of the rolling increment
                variance. Defaults to False.
            var_window (int, optional): Number of recent block increments in the rolling variance. Defaults to 20.
            eps (float, optional): Variance floor of the normalization. Defaults to 1e-6.
            fixed_variance (float | None, optional): Pins the variance of the normalization. Defaults to None.
        """
        super().__init__(threshold)
        if int(m) != m or m < 2:
            raise InvalidSpecError(
                f"Block length must be an integer of at least 2, got {m}"
            )
        if not math.isfinite(offset) or offset < 0:
            raise InvalidSpecError(f"Offset must be non-negative, got {offset}")
        if var_window < 2:
            raise InvalidSpecError(
                f"Variance window must hold at least 2 blocks, got {var_window}"
            )
        if eps <= 0:
            raise InvalidSpecError(f"Variance floor must be positive, got {eps}")
        if fixed_variance is not None and fixed_variance < 0:
            raise InvalidSpecError(
                f"Fixed variance must be non-negative, got {fixed_variance}"
            )
        self.reference = reference
        self.m = int(m)
        self.granularity = self.m
        self.offset = float(offset)
        self.normalize = normalize
        self.var_window = var_window
        self.eps = eps
        self.fixed_variance = fixed_variance
        self.reset()

    def reset(self):
        super().reset()
        self._buffer = np.empty(self.m)
        self._filled = 0
        self._increments: deque[float] = deque(maxlen=self.var_window)
        self.last_discrepancy: float | None = None

    def _update(self, e: float) -> bool:
        self._buffer[self._filled] = e
        self._filled += 1
        if self._filled < self.m:
            return False
        discrepancy = mmd(second_order_samples(self._buffer), self.reference)
        self._filled = 0
        self.update_block(discrepancy)
        return True

    def update_block(self, discrepancy: float) -> float:
        """Applies the CUSUM recursion for one block with MMD value `discrepancy`.

        Returns:
            float: The increment added before the max with 0.
        """
        increment = discrepancy - self.offset
        if self.normalize:
            self._increments.append(increment)
            if self.fixed_variance is not None:
                increment /= math.sqrt(self.fixed_variance + self.eps)
            elif len(self._increments) >= MIN_BLOCKS_FOR_VARIANCE:
                variance = float(np.var(self._increments, ddof=1))
                increment /= math.sqrt(variance + self.eps)
        self.state.statistic = max(0.0, self.state.statistic + increment)
        self.state.block_index += 1
        self.last_discrepancy = discrepancy
        return increment


def calibrate_offset(
    reference: ReferenceSet,
    pre: HmmSpec,
    m: int = 50,
    n_blocks: int = 200,
    seed: int = 1,
    margin: float = 0.0,
) -> float:
    """Offset zeta as the sample mean of MMD values on held-out in-distribution blocks plus `margin`.

    Args:
        reference (ReferenceSet): The reference set of the detector.
        pre (HmmSpec): In-distribution error process, simulated with a seed distinct from the reference's.
        m (int, optional): Block length. Defaults to 50.
        n_blocks (int, optional): Number of held-out blocks. Defaults to 200.
        seed (int, optional): Seed of the held-out stream. Defaults to 1.
        margin (float, optional): Added to the mean. Defaults to 0.

    Returns:
        float: The offset.
    """
    errors = sample_path(pre, m * n_blocks, seed).errors
    values = [mmd(block, reference) for block in block_pairs(errors, m)]
    return float(np.mean(values)) + margin


def check_offset(
    offset: float,
    reference: ReferenceSet,
    post: HmmSpec,
    n_samples: int = 10_000,
    seed: int = 2,
) -> float:
    """Estimates `D(post, reference)` and checks `0 < offset < D`.

    Raises:
        InvalidSpecError: If the offset is not below the estimated post-change discrepancy.

    Returns:
        float: The estimated post-change discrepancy.
    """
    post_pairs = second_order_samples(sample_path(post, n_samples + 1, seed).errors)
    discrepancy = mmd_between_samples(post_pairs, reference.samples, reference.kernel)
    if not 0 < offset < discrepancy:
        raise InvalidSpecError(
            f"Offset {offset:.4f} must lie strictly between 0 and the post-change discrepancy {discrepancy:.4f}"
        )
    return discrepancy
