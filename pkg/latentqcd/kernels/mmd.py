from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from threading import Lock

import numpy as np

from ..common.errors import DegenerateSampleError, InvalidSpecError, NonFiniteValueError
from ..common.global_context import GlobalContext
from ..common.singleton import SingletonMeta
from ..common.transferables import Transferable
from ..common.utils import ensure_finite
from .kernel import DEFAULT_CHUNK_SIZE, RbfKernel, as_pairs, median_heuristic

SELF_TERM_TOLERANCE = 1e-12
CLAMP_WARNING_LEVEL = 1e-8


class KernelDiagnostics(metaclass=SingletonMeta):
    """Counts squared discrepancies that came out negative beyond round-off and had to be clamped."""

    def __init__(self):
        self._lock = Lock()
        self.clamped = 0
        self.worst = 0.0

    def record(self, squared: float):
        with self._lock:
            self.clamped += 1
            self.worst = min(self.worst, squared)
        logging.warning(f"Clamped negative squared MMD {squared:.3e} to 0")

    def reset(self):
        with self._lock:
            self.clamped = 0
            self.worst = 0.0


def second_order_samples(errors) -> np.ndarray:
    """Consecutive error pairs `(e_{t-1}, e_t)` as an array of shape `(len(errors) - 1, 2)`."""
    errors = np.asarray(errors, dtype=float).ravel()
    return np.column_stack((errors[:-1], errors[1:]))


def block_pairs(errors, m: int) -> list[np.ndarray]:
    """Splits `errors` into complete blocks of length `m` and returns the `m - 1` pairs inside each block.

    Pairs never span two blocks; a trailing incomplete block is dropped.
    """
    if m < 2:
        raise InvalidSpecError(f"Block length must be at least 2, got {m}")
    errors = np.asarray(errors, dtype=float).ravel()
    n_blocks = errors.size // m
    blocks = errors[: n_blocks * m].reshape(n_blocks, m)
    return [second_order_samples(block) for block in blocks]


def _discrepancy(squared: float) -> float:
    if squared < 0:
        if squared < -CLAMP_WARNING_LEVEL:
            KernelDiagnostics().record(squared)
        return 0.0
    return math.sqrt(squared)


class ReferenceSet(Transferable, is_base_type=True):
    def __init__(
        self,
        samples: list | np.ndarray,
        kernel: RbfKernel,
        self_term: float | None = None,
    ):
        """Finite sample of in-distribution second-order errors with its precomputed kernel self-term.

        Args:
            samples (list | np.ndarray): Pairs `(e_{t-1}, e_t)`, at least two.
            kernel (RbfKernel): Kernel used for every discrepancy against this set.
            self_term (float | None, optional): Stored mean of `k(y_i, y_j)` over all ordered pairs.
                Checked against the recomputed value when given. Defaults to None.
        """
        self.samples = as_pairs(samples)
        ensure_finite(self.samples, "reference sample")
        if self.samples.shape[0] < 2:
            raise DegenerateSampleError("A reference set needs at least two samples")
        self.kernel = kernel
        self.self_term = kernel.gram_mean(self.samples, self.samples)
        if (
            self_term is not None
            and abs(self_term - self.self_term) > SELF_TERM_TOLERANCE
        ):
            raise InvalidSpecError(
                f"Stored self-term {self_term} does not match the recomputed value {self.self_term}"
            )

    def __len__(self) -> int:
        return self.samples.shape[0]

    def cross_mean(self, block) -> float:
        return self.kernel.gram_mean(block, self.samples)

    def to_json(self) -> dict:
        return {
            "sigma": self.kernel.bandwidth,
            "samples": self.samples.tolist(),
            "self_term": self.self_term,
        }

    @classmethod
    def from_json(cls, data: dict) -> ReferenceSet:
        return cls(
            samples=data["samples"],
            kernel=RbfKernel(data["sigma"]),
            self_term=data["self_term"],
        )

    def save(self, path: str | Path):
        with open(path, "w") as f:
            json.dump(self.to_json(), f)

    @classmethod
    def load(cls, path: str | Path) -> ReferenceSet:
        with open(path, "r") as f:
            return cls.from_json(json.load(f))


def build_reference(
    errors,
    kernel: RbfKernel | None = None,
    max_samples: int | None = None,
    seed: int = 0,
) -> ReferenceSet:
    """Builds the reference set from an in-distribution error sequence.

    Args:
        errors (array-like): At least three in-distribution errors.
        kernel (RbfKernel | None, optional): Kernel to attach. The median heuristic over the pairs
            chooses the bandwidth when omitted.
        max_samples (int | None, optional): Cap on the number of pairs, larger sets are subsampled
            uniformly without replacement. Defaults to the `reference_size` of the global context.
        seed (int, optional): Subsampling seed. Defaults to 0.

    Returns:
        ReferenceSet: The reference set.
    """
    errors = np.asarray(errors, dtype=float).ravel()
    if errors.size < 3:
        raise DegenerateSampleError(
            f"A reference needs at least 3 errors, got {errors.size}"
        )
    ensure_finite(errors, "error")
    if max_samples is None:
        max_samples = int(GlobalContext().get("reference_size", 2000))
    pairs = second_order_samples(errors)
    if pairs.shape[0] > max_samples:
        rng = np.random.default_rng(seed)
        index = np.sort(rng.choice(pairs.shape[0], max_samples, replace=False))
        pairs = pairs[index]
    if kernel is None:
        kernel = RbfKernel(median_heuristic(pairs))
        logging.info(f"Median heuristic bandwidth {kernel.bandwidth:.4f}")
    return ReferenceSet(samples=pairs, kernel=kernel)


def mmd(block, ref: ReferenceSet) -> float:
    """V-statistic MMD between the pairs of one block and the reference set.

    Args:
        block (array-like): Second-order samples of one block, non-empty.
        ref (ReferenceSet): The reference set.

    Raises:
        NonFiniteValueError: If the block holds non-finite values.

    Returns:
        float: The discrepancy `D` in [0, 2].
    """
    block = as_pairs(block)
    if block.shape[0] == 0:
        raise DegenerateSampleError("Block is empty")
    if not np.all(np.isfinite(block)):
        raise NonFiniteValueError("Block contains non-finite values")
    squared = (
        ref.kernel.gram_mean(block, block)
        + ref.self_term
        - 2.0 * ref.cross_mean(block)
    )
    return _discrepancy(squared)


def mmd_between_samples(
    a, b, kernel: RbfKernel, chunk_size: int = DEFAULT_CHUNK_SIZE
) -> float:
    """V-statistic MMD between two samples with `b` in the reference role, computed in bounded memory."""
    a, b = as_pairs(a), as_pairs(b)
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise DegenerateSampleError("Both samples must be non-empty")
    ensure_finite(a, "sample")
    ensure_finite(b, "sample")
    squared = (
        kernel.gram_mean(a, a, chunk_size)
        + kernel.gram_mean(b, b, chunk_size)
        - 2.0 * kernel.gram_mean(a, b, chunk_size)
    )
    return _discrepancy(squared)
