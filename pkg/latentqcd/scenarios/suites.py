from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..common.utils import derive_seed
from ..detectors import (
    DcMmdDetector,
    Detector,
    GaussianCusumDetector,
    NllDetector,
    RobustCusumDetector,
    calibrate_offset,
    marginal_gaussian,
)
from ..errormodel import HmmSpec, sample_path, stationary_distribution
from ..evaluation import ScenarioSpec
from ..kernels import RbfKernel, build_reference
from .shifts import TailSwap


def heavy_tail_suite(base: ScenarioSpec) -> dict[str, ScenarioSpec]:
    """Gaussian, Laplace and Student-t(3) variants of `base` with matched per-mode mean and variance.

    The Gaussian member is `base` itself.
    """
    suite = {"gaussian": base}
    for target in ("laplace", "student_t"):
        swap = TailSwap(target=target, dof=3.0)
        suite[target] = ScenarioSpec(
            pre=swap.apply(base.pre),
            post=swap.apply(base.post),
            changepoint_grid=base.changepoint_grid,
            label=f"{base.label}/{target}",
        )
    return suite


def _iid(spec: HmmSpec) -> HmmSpec:
    marginal = marginal_gaussian(spec)
    return HmmSpec(transition=spec.transition, emission_L=marginal, emission_H=marginal)


def _static_mixture(spec: HmmSpec) -> HmmSpec:
    pi = stationary_distribution(spec.P)
    return spec.with_transition(np.vstack([pi, pi]))


def stationarity_suite(base: ScenarioSpec) -> dict[str, ScenarioSpec]:
    """Variants of `base` with decreasing temporal structure of the error process.

    "iid": a single Gaussian with the marginal mean and variance,
    "mixture": independent mode draws from the stationary distribution,
    "markov": the Markov switching base itself.
    """
    suite = {}
    for name, transform in (("iid", _iid), ("mixture", _static_mixture)):
        suite[name] = ScenarioSpec(
            pre=transform(base.pre),
            post=transform(base.post),
            changepoint_grid=base.changepoint_grid,
            label=f"{base.label}/{name}",
        )
    suite["markov"] = base
    return suite


@dataclass
class UnknownPostchangeSuite:
    scenario: ScenarioSpec
    detectors: dict[str, Detector]


def unknown_postchange_suite(
    base: ScenarioSpec,
    m: int = 50,
    kappa: float = 2.0,
    reference_size: int = 2000,
    kernel: RbfKernel | None = None,
    seed: int = 0,
) -> UnknownPostchangeSuite:
    """Detectors for a change whose post-change distribution is not known to the monitor.

    - "dc_mmd": reference and offset from in-distribution data only
    - "robust_cusum": surrogate post-change mean shifted by `kappa` standard deviations
    - "gcusum_misspecified": assumes twice the true mean shift of the marginal
    - "nll": point-wise negative log-likelihood

    Thresholds are placeholders, calibrate them before comparing delays.
    """
    reference_errors = sample_path(
        base.pre, reference_size + 1, derive_seed(seed, 0)
    ).errors
    reference = build_reference(
        reference_errors, kernel=kernel, max_samples=reference_size
    )
    offset = calibrate_offset(reference, base.pre, m=m, seed=derive_seed(seed, 1))

    pre_marginal = marginal_gaussian(base.pre)
    post_marginal = marginal_gaussian(base.post)
    assumed_post = post_marginal.shifted(
        delta_mean=post_marginal.mean - pre_marginal.mean
    )
    return UnknownPostchangeSuite(
        scenario=base,
        detectors={
            "dc_mmd": DcMmdDetector(
                reference=reference, m=m, offset=offset, threshold=1.0
            ),
            "robust_cusum": RobustCusumDetector(
                pre=pre_marginal, kappa=kappa, threshold=5.0
            ),
            "gcusum_misspecified": GaussianCusumDetector(
                pre=pre_marginal, post=assumed_post, threshold=5.0
            ),
            "nll": NllDetector(pre=pre_marginal, threshold=5.0),
        },
    )
