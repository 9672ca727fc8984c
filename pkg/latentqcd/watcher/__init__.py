from .pool import WatcherPool
from .watcher import Watcher
from .notifications import (
    AlarmNotification,
    MetricNotification,
    ReportNotification,
    RunStartedNotification,
    TraceNotification,
    WatcherNotification,
)
from .logging_watcher import LoggingWatcher
from .metric_collector import MetricCollectionWatcher
from .report_saver import ReportSaverWatcher
