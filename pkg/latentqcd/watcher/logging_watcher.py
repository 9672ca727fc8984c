import logging

from .notifications import (
    AlarmNotification,
    MetricNotification,
    ReportNotification,
    RunStartedNotification,
    TraceNotification,
)
from .watcher import Watcher


class LoggingWatcher(Watcher):
    def __init__(self) -> None:
        """Logs every notification on the `logging` root logger."""
        super().__init__(
            notification_of_interest={
                RunStartedNotification: self._started,
                AlarmNotification: self._alarm,
                MetricNotification: self._metric,
                ReportNotification: self._report,
                TraceNotification: self._trace,
            }
        )

    def _started(
        self, notification: RunStartedNotification, origin: Watcher | None = None
    ) -> None:
        logging.info(
            f"Started `{notification.command}` in run '{notification.run_name}'"
        )

    def _alarm(
        self, notification: AlarmNotification, origin: Watcher | None = None
    ) -> None:
        result = notification.result
        if result.censored:
            logging.info(
                f"{notification.detector}: no alarm within {result.max_steps} steps"
            )
        else:
            logging.info(
                f"{notification.detector}: alarm at step {result.stopping_time} "
                f"(W={result.alarm.statistic_at_alarm:.4f})"
            )

    def _metric(
        self, notification: MetricNotification, origin: Watcher | None = None
    ) -> None:
        values = ", ".join(
            f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}"
            for k, v in notification.metrics.items()
        )
        prefix = " / ".join(
            x for x in (notification.scenario, notification.detector) if x
        )
        logging.info(f"[{notification.metric_type}] {prefix}: {values}")

    def _report(
        self, notification: ReportNotification, origin: Watcher | None = None
    ) -> None:
        logging.info(f"Report '{notification.name}' ready")

    def _trace(
        self, notification: TraceNotification, origin: Watcher | None = None
    ) -> None:
        logging.info(
            f"Table '{notification.name}' with {len(notification.table)} rows ready"
        )
