from __future__ import annotations

import logging
import math
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..common.errors import InvalidSpecError
from ..common.utils import derive_seed
from ..errormodel import (
    HmmSpec,
    sample_path,
    second_eigenvalue_modulus,
    second_order_chain,
)
from ..kernels import (
    RbfKernel,
    ReferenceSet,
    mmd_between_samples,
    second_order_samples,
)


class BoundInputs(BaseModel):
    """Ingredients of the delay bound. The bound is vacuous unless `d_hat > a`."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=2)
    b: float = Field(gt=0)
    offset: float = Field(ge=0)
    delta: float = Field(ge=0, lt=1)
    R: float = Field(gt=0, le=1)
    d_hat: float

    @property
    def a(self) -> float:
        return bound_a(self.m, self.delta, self.R)


class BoundReport(BaseModel):
    a: float
    d_hat: float
    delta_gap: float
    delta_lambda2: float
    delta_used: Literal["gap", "lambda2"]
    R: float
    bound: float | Literal["vacuous"]
    bound_tight: float | Literal["vacuous"]


def bound_a(m: int, delta: float, R: float) -> float:
    """Mixing constant `a = sqrt((2 - 2 delta + 4 R) / ((m - 1)(1 - delta)))`.

    Args:
        m (int): Block length, at least 2.
        delta (float): Mixing coefficient in [0, 1).
        R (float): Kernel second-moment envelope in (0, 1].

    Returns:
        float: The constant a.
    """
    if m < 2:
        raise InvalidSpecError(f"Block length must be at least 2, got {m}")
    if not 0 <= delta < 1:
        raise InvalidSpecError(f"delta must lie in [0, 1), got {delta}")
    if not 0 < R <= 1:
        raise InvalidSpecError(f"R must lie in (0, 1], got {R}")
    return math.sqrt((2.0 - 2.0 * delta + 4.0 * R) / ((m - 1) * (1.0 - delta)))


def wadd_upper_bound(inputs: BoundInputs, tight: bool = False) -> float | None:
    """Upper bound on the worst-case average detection delay in raw time steps.

    `m b / (sqrt(d) - sqrt(a))^2 + m sqrt(d) / (sqrt(d) - sqrt(a))`, or only the first term when `tight`.

    Returns:
        float | None: The bound, or None if it is vacuous (`d_hat <= a`).
    """
    a = inputs.a
    if inputs.d_hat <= a:
        return None
    gap = math.sqrt(inputs.d_hat) - math.sqrt(a)
    bound = inputs.m * inputs.b / gap**2
    if not tight:
        bound += inputs.m * math.sqrt(inputs.d_hat) / gap
    return bound


def estimate_R(ref: ReferenceSet, grid_size: int = 10) -> float:
    """Empirical envelope `max_x mean_i k(x, y_i)^2`.

    The candidates are the reference points plus a `grid_size x grid_size` grid over their bounding box.
    """
    samples = ref.samples
    low, high = samples.min(axis=0), samples.max(axis=0)
    gx, gy = np.meshgrid(
        np.linspace(low[0], high[0], grid_size),
        np.linspace(low[1], high[1], grid_size),
    )
    candidates = np.vstack([samples, np.column_stack([gx.ravel(), gy.ravel()])])
    best = 0.0
    for start in range(0, candidates.shape[0], 1024):
        gram = ref.kernel.gram(candidates[start : start + 1024], samples)
        best = max(best, float(np.max(np.mean(gram**2, axis=1))))
    return min(best, 1.0)


def estimate_d_hat(
    pre: HmmSpec,
    post: HmmSpec,
    kernel: RbfKernel,
    offset: float,
    n_samples: int = 10_000,
    seed: int = 0,
) -> float:
    """Estimates `d = D(post, pre) - offset` from `n_samples` second-order samples of each regime."""

    def pairs(spec: HmmSpec, cell: int) -> np.ndarray:
        errors = sample_path(spec, n_samples + 1, derive_seed(seed, cell)).errors
        return second_order_samples(errors)

    pre_pairs, post_pairs = pairs(pre, 0), pairs(post, 1)
    return mmd_between_samples(post_pairs, pre_pairs, kernel) - offset


def order_optimal_threshold(gamma: float, m: int, q: float) -> float:
    """Threshold `(log gamma - log m) / q` that reaches a false alarm constraint `gamma` at order optimal delay."""
    if gamma <= m:
        raise InvalidSpecError(
            f"The false alarm constraint {gamma} must exceed the block length {m}"
        )
    if q <= 0:
        raise InvalidSpecError(f"The exponent q must be positive, got {q}")
    return (math.log(gamma) - math.log(m)) / q


def bound_report(
    pre: HmmSpec,
    post: HmmSpec,
    reference: ReferenceSet,
    m: int,
    b: float,
    offset: float,
    n_samples: int = 10_000,
    seed: int = 0,
    delta_used: Literal["gap", "lambda2"] = "lambda2",
) -> BoundReport:
    """Evaluates the delay bound for a scenario with both readings of the mixing coefficient.

    Args:
        pre (HmmSpec): Pre-change error process.
        post (HmmSpec): Post-change error process.
        reference (ReferenceSet): Reference set of the detector, provides the kernel.
        m (int): Block length.
        b (float): Threshold.
        offset (float): Drift offset zeta.
        n_samples (int, optional): Samples per regime for `d_hat`. Defaults to 10_000.
        seed (int, optional): Master seed. Defaults to 0.
        delta_used (str, optional): Which reading enters the bound. Defaults to "lambda2".

    Returns:
        BoundReport: Ingredients and bound values.
    """
    lifted = second_order_chain(pre.P)
    delta_lambda2 = second_eigenvalue_modulus(lifted)
    delta_gap = 1.0 - delta_lambda2
    R = estimate_R(reference)
    d_hat = estimate_d_hat(pre, post, reference.kernel, offset, n_samples, seed)
    delta = delta_lambda2 if delta_used == "lambda2" else delta_gap
    if delta >= 1:
        raise InvalidSpecError(
            f"The mixing coefficient {delta} leaves the bound undefined"
        )
    inputs = BoundInputs(m=m, b=b, offset=offset, delta=delta, R=R, d_hat=d_hat)
    bound = wadd_upper_bound(inputs)
    bound_tight = wadd_upper_bound(inputs, tight=True)
    if bound is None:
        logging.warning(
            f"Delay bound is vacuous: d_hat={d_hat:.4f} <= a={inputs.a:.4f}"
        )
    return BoundReport(
        a=inputs.a,
        d_hat=d_hat,
        delta_gap=delta_gap,
        delta_lambda2=delta_lambda2,
        delta_used=delta_used,
        R=R,
        bound="vacuous" if bound is None else bound,
        bound_tight="vacuous" if bound_tight is None else bound_tight,
    )
