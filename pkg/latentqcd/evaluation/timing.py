from __future__ import annotations

import time
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import stats

from ..common.errors import DegenerateSampleError
from ..common.utils import derive_seed
from ..detectors import Detector
from ..errormodel import HmmSpec, sample_path


class TimingPercentiles(BaseModel):
    """Per-step latencies in microseconds."""

    model_config = ConfigDict(frozen=True)

    mean_us: float
    p50_us: float
    p90_us: float
    p99_us: float
    n_steps: int


class PerfReport(BaseModel):
    """Regression of the mean per-step latency on the stream length."""

    model_config = ConfigDict(frozen=True)

    lengths: list[int]
    mean_step_us: list[float]
    slope_us_per_step: float
    slope_ci_low: float
    slope_ci_high: float

    @property
    def constant_cost(self) -> bool:
        """Whether the 95% interval of the slope contains 0."""
        return self.slope_ci_low <= 0.0 <= self.slope_ci_high


def timing_percentiles(detector: Detector, errors: np.ndarray) -> TimingPercentiles:
    """Measures the latency of every `observe` call of a fresh clone of `detector`."""
    run = detector.clone()
    durations = np.empty(len(errors))
    for i, e in enumerate(errors):
        start = time.perf_counter_ns()
        run.observe(e)
        durations[i] = time.perf_counter_ns() - start
    durations /= 1e3
    p50, p90, p99 = np.percentile(durations, [50, 90, 99])
    return TimingPercentiles(
        mean_us=float(durations.mean()),
        p50_us=float(p50),
        p90_us=float(p90),
        p99_us=float(p99),
        n_steps=durations.size,
    )


def streaming_cost(
    detector: Detector,
    pre: HmmSpec,
    lengths: Sequence[int] = (10_000, 100_000, 1_000_000),
    repeats: int = 3,
    seed: int = 0,
) -> PerfReport:
    """Regresses the mean per-step time on the total stream length.

    Every length is measured `repeats` times on streams with derived seeds.

    Returns:
        PerfReport: Slope with its 95% confidence interval.
    """
    if len(lengths) < 2 or repeats < 1:
        raise DegenerateSampleError(
            "At least two stream lengths and one repeat are required"
        )
    xs, ys, means = [], [], []
    for i, length in enumerate(lengths):
        per_length = []
        for r in range(repeats):
            errors = sample_path(pre, int(length), derive_seed(seed, i, r)).errors
            run = detector.clone()
            start = time.perf_counter()
            for e in errors:
                run.observe(e)
            per_step = (time.perf_counter() - start) / length * 1e6
            xs.append(float(length))
            ys.append(per_step)
            per_length.append(per_step)
        means.append(float(np.mean(per_length)))
    fit = stats.linregress(xs, ys)
    dof = max(len(xs) - 2, 1)
    half_width = stats.t.ppf(0.975, dof) * fit.stderr
    return PerfReport(
        lengths=[int(n) for n in lengths],
        mean_step_us=means,
        slope_us_per_step=float(fit.slope),
        slope_ci_low=float(fit.slope - half_width),
        slope_ci_high=float(fit.slope + half_width),
    )
