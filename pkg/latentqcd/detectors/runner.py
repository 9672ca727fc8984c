from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np
import pandas as pd

from ..common.errors import InvalidSpecError
from ..errormodel import ErrorPath
from .detector import Alarm, Detector


@dataclass
class RunResult:
    """Outcome of one monitored stream.

    `trace` holds one row `(step, block, W)` per statistic update.
    """

    alarm: Alarm | None
    n_steps: int
    max_steps: int
    trace: pd.DataFrame

    @property
    def censored(self) -> bool:
        return self.alarm is None

    @property
    def stopping_time(self) -> int | None:
        return None if self.alarm is None else self.alarm.stopping_time

    def report(self) -> dict:
        if self.alarm is None:
            return {"censored": self.max_steps}
        return self.alarm.report()


def run_to_alarm(
    detector: Detector,
    stream: ErrorPath | Iterable[float],
    max_steps: int,
    record_trace: bool = True,
) -> RunResult:
    """Feeds `stream` into a fresh clone of `detector` until it alarms or `max_steps` errors are consumed.

    Args:
        detector (Detector): Detector configuration, left untouched.
        stream (ErrorPath | Iterable[float]): Error source.
        max_steps (int): Horizon, at least 1.
        record_trace (bool, optional): Whether to record the statistic trace. Defaults to True.

    Returns:
        RunResult: The alarm, or a censored result if the horizon or the stream ended first.
    """
    if max_steps < 1:
        raise InvalidSpecError(f"max_steps must be at least 1, got {max_steps}")
    errors = stream.errors if isinstance(stream, ErrorPath) else stream
    run = detector.clone()
    steps: list[int] = []
    blocks: list[int] = []
    values: list[float] = []
    alarm = None
    for n, e in enumerate(errors, start=1):
        if n > max_steps:
            break
        alarm = run.step(e)
        if record_trace and run.state.n_steps % run.granularity == 0:
            steps.append(run.state.n_steps)
            blockwise = run.granularity > 1
            blocks.append(run.state.block_index if blockwise else run.state.n_steps)
            values.append(run.state.statistic)
        if alarm is not None:
            break
    trace = pd.DataFrame(
        {
            "step": np.asarray(steps, dtype=np.int64),
            "block": np.asarray(blocks, dtype=np.int64),
            "W": values,
        }
    )
    return RunResult(
        alarm=alarm, n_steps=run.state.n_steps, max_steps=max_steps, trace=trace
    )


def write_trace(path: str | Path, result: RunResult):
    result.trace.to_csv(path, index=False, float_format="%.17g")


def write_alarm(path: str | Path, result: RunResult):
    with open(path, "w") as f:
        json.dump(result.report(), f, indent=2)
