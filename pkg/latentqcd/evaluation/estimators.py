from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict
from tqdm import tqdm

from ..common.errors import BracketingError, FalseAlarmDominatedError, InvalidSpecError
from ..common.global_context import GlobalContext
from ..common.utils import derive_seed, exact_mean, standard_error
from ..detectors import Detector, run_to_alarm
from ..errormodel import HmmSpec, LatentMode, sample_changed_path, sample_path
from .scenario import ScenarioSpec

MIN_MTFA_RUNS = 50
MAX_DISCARD_RATE = 0.5
# cell indices of the seed derivation, each estimator draws from its own family of streams
MTFA_CELL = 0
WADD_CELL_OFFSET = 1000


class MtfaEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    mtfa: float
    stderr: float
    censor_rate: float
    n_runs: int
    max_len: int

    @property
    def censored(self) -> bool:
        """Whether every run reached the horizon, so `mtfa` only equals the horizon."""
        return self.censor_rate >= 1.0

    @property
    def trustworthy(self) -> bool:
        return self.censor_rate < 0.5


class WaddCell(BaseModel):
    """Delay statistics for one changepoint and one latent mode right before the change."""

    model_config = ConfigDict(frozen=True)

    changepoint: int
    mode_before_change: str
    mean_delay: float
    stderr: float
    n_used: int
    n_discarded: int
    n_censored: int


class RunMetrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    wadd: float
    wadd_stderr: float
    n_runs: int
    censor_rate: float
    discard_rate: float
    worst_cell: WaddCell
    cells: list[WaddCell]
    mtfa: MtfaEstimate | None = None

    @property
    def trustworthy(self) -> bool:
        return self.censor_rate < 0.5


class FrontierPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    b: float
    mtfa: float
    wadd: float
    mtfa_stderr: float = 0.0
    wadd_stderr: float = 0.0
    censor_rate: float = 0.0


def _progress(iterable, desc: str, total: int | None = None):
    return tqdm(
        iterable,
        desc=desc,
        total=total,
        disable=not GlobalContext().get("progress", False),
        leave=False,
    )


def estimate_mtfa(
    detector: Detector,
    pre: HmmSpec,
    n_runs: int = 100,
    max_len: int = 10_000,
    seed: int = 0,
) -> MtfaEstimate:
    """Mean time to false alarm on change-free streams.

    Runs without alarm contribute `max_len`, so the estimate is a lower bound once runs are censored.

    Args:
        detector (Detector): Detector configuration, cloned for every run.
        pre (HmmSpec): In-distribution error process.
        n_runs (int, optional): Number of streams, at least 50. Defaults to 100.
        max_len (int, optional): Horizon of every stream. Defaults to 10_000.
        seed (int, optional): Master seed. Run r always consumes the same stream. Defaults to 0.

    Returns:
        MtfaEstimate: Mean stopping time, its standard error and the censor rate.
    """
    if n_runs < MIN_MTFA_RUNS:
        raise InvalidSpecError(
            f"At least {MIN_MTFA_RUNS} runs are required, got {n_runs}"
        )
    if max_len < 1:
        raise InvalidSpecError(f"max_len must be positive, got {max_len}")
    stopping_times = np.empty(n_runs)
    censored = 0
    for r in _progress(range(n_runs), desc="MTFA"):
        path = sample_path(pre, max_len, derive_seed(seed, MTFA_CELL, r))
        result = run_to_alarm(detector, path, max_len, record_trace=False)
        if result.censored:
            censored += 1
            stopping_times[r] = max_len
        else:
            stopping_times[r] = result.stopping_time
    return MtfaEstimate(
        mtfa=exact_mean(stopping_times),
        stderr=standard_error(stopping_times),
        censor_rate=censored / n_runs,
        n_runs=n_runs,
        max_len=max_len,
    )


def estimate_wadd(
    detector: Detector,
    scenario: ScenarioSpec,
    n_runs_per_cell: int = 100,
    seed: int = 0,
    horizon: int = 5_000,
) -> RunMetrics:
    """Worst-case average detection delay over changepoints and the latent mode before the change.

    Every cell `(changepoint, mode)` simulates `n_runs_per_cell` streams with the change at the
    changepoint. Runs that alarm before the change are discarded, runs without alarm within
    `horizon` post-change steps contribute the full horizon.

    Args:
        detector (Detector): Detector configuration, cloned for every run.
        scenario (ScenarioSpec): Pre- and post-change processes with the changepoint grid.
        n_runs_per_cell (int, optional): Runs per cell. Defaults to 100.
        seed (int, optional): Master seed. Defaults to 0.
        horizon (int, optional): Post-change steps simulated per run. Defaults to 5_000.

    Raises:
        FalseAlarmDominatedError: If more than half of the runs of a cell alarm before the change.

    Returns:
        RunMetrics: Maximum over the cell means, with the standard error of the maximizing cell.
    """
    if n_runs_per_cell < 1 or horizon < 1:
        raise InvalidSpecError("Runs per cell and horizon must be positive")

    cells: list[WaddCell] = []
    total_censored = total_discarded = total_runs = 0
    grid = [(t, mode) for t in scenario.changepoint_grid for mode in LatentMode]
    cell_iter = enumerate(_progress(grid, desc="WADD cells"))
    for cell_index, (changepoint, mode) in cell_iter:
        length = changepoint - 1 + horizon
        delays: list[float] = []
        discarded = censored = 0
        for r in range(n_runs_per_cell):
            path = sample_changed_path(
                scenario.pre,
                scenario.post,
                changepoint,
                length,
                derive_seed(seed, WADD_CELL_OFFSET + cell_index, r),
                mode_before_change=mode,
            )
            result = run_to_alarm(detector, path, length, record_trace=False)
            if result.censored:
                censored += 1
                delays.append(float(length - changepoint))
            elif result.stopping_time < changepoint:
                discarded += 1
            else:
                delays.append(float(result.stopping_time - changepoint))
        if discarded > MAX_DISCARD_RATE * n_runs_per_cell or not delays:
            raise FalseAlarmDominatedError(
                f"{discarded} of {n_runs_per_cell} runs alarmed before changepoint {changepoint} "
                f"(mode {mode.name}) in scenario '{scenario.label}'"
            )
        if discarded:
            logging.info(
                f"Discarded {discarded} pre-change alarms at changepoint {changepoint}, mode {mode.name}"
            )
        cells.append(
            WaddCell(
                changepoint=changepoint,
                mode_before_change=mode.name,
                mean_delay=exact_mean(delays),
                stderr=standard_error(delays),
                n_used=len(delays),
                n_discarded=discarded,
                n_censored=censored,
            )
        )
        total_censored += censored
        total_discarded += discarded
        total_runs += n_runs_per_cell

    worst = max(cells, key=lambda c: c.mean_delay)
    used = total_runs - total_discarded
    return RunMetrics(
        wadd=worst.mean_delay,
        wadd_stderr=worst.stderr,
        n_runs=total_runs,
        censor_rate=total_censored / used,
        discard_rate=total_discarded / total_runs,
        worst_cell=worst,
        cells=cells,
    )


def calibrate_threshold(
    detector: Detector,
    pre: HmmSpec,
    gamma: float,
    tol_rel: float = 0.1,
    b_lo: float = 0.1,
    b_hi: float = 20.0,
    n_runs: int = 100,
    max_len: int | None = None,
    seed: int = 0,
    max_iter: int = 40,
) -> float:
    """Bisection on the threshold until the Monte-Carlo MTFA is within `tol_rel` of `gamma`.

    All evaluations share the seed, so every candidate threshold sees the same streams.

    Args:
        detector (Detector): Detector template, rebuilt with each candidate threshold.
        pre (HmmSpec): In-distribution error process.
        gamma (float): Target mean time to false alarm.
        tol_rel (float, optional): Relative tolerance. Defaults to 0.1.
        b_lo (float, optional): Lower end of the bracket. Defaults to 0.1.
        b_hi (float, optional): Upper end of the bracket. Defaults to 20.
        n_runs (int, optional): Runs per MTFA estimate. Defaults to 100.
        max_len (int | None, optional): Horizon per run. Defaults to `10 * gamma`.
        seed (int, optional): Master seed. Defaults to 0.
        max_iter (int, optional): Maximum number of bisection steps. Defaults to 40.

    Raises:
        BracketingError: If `gamma` is not between the MTFAs at `b_lo` and `b_hi`.

    Returns:
        float: The calibrated threshold.
    """
    if not 0 < b_lo < b_hi:
        raise InvalidSpecError(f"Invalid threshold bracket [{b_lo}, {b_hi}]")
    max_len = int(max_len or math.ceil(10 * gamma))

    def mtfa(b: float) -> float:
        configured = detector.clone(threshold=b)
        return estimate_mtfa(configured, pre, n_runs, max_len, seed).mtfa

    def close(value: float) -> bool:
        return abs(value - gamma) / gamma <= tol_rel

    mtfa_lo, mtfa_hi = mtfa(b_lo), mtfa(b_hi)
    if close(mtfa_lo):
        return b_lo
    if close(mtfa_hi):
        return b_hi
    if not mtfa_lo < gamma < mtfa_hi:
        raise BracketingError(
            f"Target MTFA {gamma} is not bracketed by MTFA({b_lo})={mtfa_lo:.2f} and MTFA({b_hi})={mtfa_hi:.2f}"
        )

    lo, hi = b_lo, b_hi
    best_b, best_err = min(
        (b_lo, abs(mtfa_lo - gamma)), (b_hi, abs(mtfa_hi - gamma)), key=lambda c: c[1]
    )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        value = mtfa(mid)
        logging.info(f"Calibration: MTFA({mid:.5f}) = {value:.2f}, target {gamma}")
        if abs(value - gamma) < best_err:
            best_b, best_err = mid, abs(value - gamma)
        if close(value):
            return mid
        if value < gamma:
            lo = mid
        else:
            hi = mid
    logging.warning(
        f"Calibration stopped after {max_iter} steps, relative error {best_err / gamma:.3f}"
    )
    return best_b


def frontier(
    detector: Detector,
    scenario: ScenarioSpec,
    b_grid: Sequence[float],
    seed: int = 0,
    n_runs: int = 100,
    n_runs_per_cell: int = 50,
    max_len: int = 10_000,
    horizon: int = 5_000,
) -> list[FrontierPoint]:
    """Delay versus false alarm trade-off over a threshold grid, on matched streams for every threshold.

    Args:
        detector (Detector): Detector template, rebuilt with each threshold.
        scenario (ScenarioSpec): The change scenario.
        b_grid (Sequence[float]): Ascending thresholds, at least three.
        seed (int, optional): Master seed. Defaults to 0.
        n_runs (int, optional): Runs per MTFA estimate. Defaults to 100.
        n_runs_per_cell (int, optional): Runs per WADD cell. Defaults to 50.
        max_len (int, optional): MTFA horizon. Defaults to 10_000.
        horizon (int, optional): Post-change WADD horizon. Defaults to 5_000.

    Returns:
        list[FrontierPoint]: One point per threshold, sorted by b.
    """
    b_grid = [float(b) for b in b_grid]
    if len(b_grid) < 3:
        raise InvalidSpecError(
            f"A frontier needs at least 3 thresholds, got {len(b_grid)}"
        )
    if any(b2 <= b1 for b1, b2 in zip(b_grid, b_grid[1:])):
        raise InvalidSpecError(f"Thresholds must be strictly ascending, got {b_grid}")

    points = []
    for b in b_grid:
        configured = detector.clone(threshold=b)
        mtfa = estimate_mtfa(configured, scenario.pre, n_runs, max_len, seed)
        wadd = estimate_wadd(configured, scenario, n_runs_per_cell, seed, horizon)
        logging.info(
            f"{configured.label} b={b:.4f}: MTFA={mtfa.mtfa:.1f}, WADD={wadd.wadd:.1f}"
        )
        points.append(
            FrontierPoint(
                b=b,
                mtfa=mtfa.mtfa,
                wadd=wadd.wadd,
                mtfa_stderr=mtfa.stderr,
                wadd_stderr=wadd.wadd_stderr,
                censor_rate=mtfa.censor_rate,
            )
        )
    return points


def frontier_table(points: Sequence[FrontierPoint]) -> pd.DataFrame:
    columns = ["b", "mtfa", "wadd", "mtfa_stderr", "wadd_stderr", "censor_rate"]
    return pd.DataFrame([p.model_dump() for p in points])[columns]


def wadd_at_mtfa(points: Sequence[FrontierPoint], target_mtfa: float) -> float:
    """WADD at `target_mtfa`, interpolated linearly in log MTFA between frontier points.

    Raises:
        InvalidSpecError: If the target lies outside the MTFA range of the frontier.
    """
    if target_mtfa <= 0:
        raise InvalidSpecError(f"Target MTFA must be positive, got {target_mtfa}")
    ordered = sorted(points, key=lambda p: (p.mtfa, p.b))
    log_mtfa = np.log([p.mtfa for p in ordered])
    wadd = np.array([p.wadd for p in ordered])
    target = math.log(target_mtfa)
    if target < log_mtfa[0] - 1e-12 or target > log_mtfa[-1] + 1e-12:
        raise InvalidSpecError(
            f"Target MTFA {target_mtfa} lies outside the frontier range [{ordered[0].mtfa:.2f}, {ordered[-1].mtfa:.2f}]"
        )
    return float(np.interp(target, log_mtfa, wadd))


def compare_at_matched_mtfa(
    frontiers: dict[str, Sequence[FrontierPoint]],
    target_mtfa: float | None = None,
) -> dict[str, float]:
    """Interpolated WADD of several detectors at one common MTFA.

    Without `target_mtfa` the geometric mid point of the MTFA range shared by all frontiers is used.
    """
    if target_mtfa is None:
        low = max(min(p.mtfa for p in points) for points in frontiers.values())
        high = min(max(p.mtfa for p in points) for points in frontiers.values())
        if low > high:
            raise InvalidSpecError("The frontiers share no common MTFA range")
        target_mtfa = math.sqrt(low * high)
    return {
        label: wadd_at_mtfa(points, target_mtfa) for label, points in frontiers.items()
    }
