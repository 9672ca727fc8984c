from dataclasses import dataclass, field
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    import pandas as pd

    from ..detectors import RunResult


class WatcherNotification:
    """Base class for all notifications."""

    pass


@dataclass
class RunStartedNotification(WatcherNotification):
    """Notification that a command started writing into `run_name`."""

    run_name: str
    command: str
    config: dict = field(default_factory=dict)


@dataclass
class AlarmNotification(WatcherNotification):
    """Notification for the outcome of one monitored stream."""

    detector: str
    result: "RunResult"
    run_index: int | None = None


@dataclass
class MetricNotification(WatcherNotification):
    """Notification for scalar metrics such as MTFA, WADD or AUROC."""

    metrics: dict[str, float]
    metric_type: str
    detector: str | None = None
    scenario: str | None = None


@dataclass
class ReportNotification(WatcherNotification):
    """Notification for a JSON report, saved as `<name>.json`."""

    name: str
    payload: dict | list


@dataclass
class TraceNotification(WatcherNotification):
    """Notification for tabular output such as statistic traces or frontiers, saved as `<name>.csv`."""

    name: str
    table: "pd.DataFrame"
