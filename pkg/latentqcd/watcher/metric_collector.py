from .notifications import MetricNotification
from .watcher import Watcher


class MetricCollectionWatcher(Watcher):
    """Watcher that keeps every metric notification in memory, e.g. for a closing summary."""

    def __init__(self) -> None:
        super().__init__(
            notification_of_interest={MetricNotification: self._handle_metric}
        )
        self.metrics: list[MetricNotification] = []

    def _handle_metric(
        self, notification: MetricNotification, origin: Watcher | None = None
    ) -> None:
        # check if this object is the origin of the notification
        if origin is not self:
            self.metrics.append(notification)

    def rows(self) -> list[dict]:
        return [
            {
                "metric_type": n.metric_type,
                "scenario": n.scenario,
                "detector": n.detector,
            }
            | n.metrics
            for n in self.metrics
        ]
