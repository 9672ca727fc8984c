from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..common.errors import AlarmedDetectorError, InvalidSpecError, NonFiniteValueError
from ..common.transferables import Transferable


class Alarm(BaseModel):
    """Declared change. `stopping_time` counts raw time steps starting at 1."""

    model_config = ConfigDict(frozen=True)

    stopping_time: int
    statistic_at_alarm: float
    block_index: int | None = None

    def report(self) -> dict:
        return {
            "stopping_time": self.stopping_time,
            "block": self.block_index,
            "W": self.statistic_at_alarm,
        }


@dataclass
class DetectorState:
    """Mutable streaming state, owned by exactly one detector."""

    statistic: float = 0.0
    n_steps: int = 0
    block_index: int = 0
    alarmed: bool = False
    stopping_time: int | None = None
    last_error: float | None = None
    extras: dict = field(default_factory=dict)


class Detector(Transferable, ABC, is_base_type=True):
    """Streaming change detector.

    `observe` updates the statistic without ever alarming, `step` additionally compares it with
    the threshold and freezes the detector on the first exceedance. A frozen detector has to be
    `reset` (or `clone`d) before it accepts data again.
    """

    #: number of time steps between two statistic updates
    granularity: int = 1
    label: str = "detector"

    def __init__(self, threshold: float):
        threshold = float(threshold)
        if not math.isfinite(threshold) or threshold <= 0:
            raise InvalidSpecError(
                f"Threshold must be positive and finite, got {threshold}"
            )
        self.threshold = threshold
        self.state = DetectorState()

    @property
    def statistic(self) -> float:
        return self.state.statistic

    @property
    def alarmed(self) -> bool:
        return self.state.alarmed

    def reset(self):
        self.state = DetectorState()

    def clone(self, **overrides) -> Detector:
        cloned = super().clone(**overrides)
        cloned.label = self.label
        return cloned

    @abstractmethod
    def _update(self, e: float) -> bool:
        """Consumes one error and returns whether the statistic was updated."""
        raise NotImplementedError("Please implement this method")

    def observe(self, e: float) -> bool:
        """Feeds one error without threshold check.

        Returns:
            bool: Whether the statistic was updated by this error.
        """
        if self.state.alarmed:
            raise AlarmedDetectorError()
        e = float(e)
        if not math.isfinite(e):
            raise NonFiniteValueError(
                f"Non-finite error {e} at step {self.state.n_steps + 1}"
            )
        self.state.n_steps += 1
        updated = self._update(e)
        self.state.last_error = e
        return updated

    def step(self, e: float) -> Alarm | None:
        """Feeds one error and returns an `Alarm` once the statistic exceeds the threshold."""
        updated = self.observe(e)
        if updated and self.state.statistic > self.threshold:
            self.state.alarmed = True
            self.state.stopping_time = self.state.n_steps
            return self.alarm()
        return None

    def alarm(self) -> Alarm:
        return Alarm(
            stopping_time=self.state.stopping_time,
            statistic_at_alarm=self.state.statistic,
            block_index=self.state.block_index if self.granularity > 1 else None,
        )

    def statistics(self, errors: np.ndarray) -> np.ndarray:
        """Statistic after every error of `errors`, starting from the current state, without alarms."""
        out = np.empty(len(errors))
        for i, e in enumerate(errors):
            self.observe(e)
            out[i] = self.state.statistic
        return out
