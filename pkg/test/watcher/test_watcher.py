import json

import pandas as pd
import pytest
from pathlib import Path
import sys, os

sys.path.insert(0, Path(os.path.dirname(__file__)).parent.parent.as_posix())

from latentqcd.detectors import NllDetector, run_to_alarm
from latentqcd.errormodel import Gaussian
from latentqcd.watcher import (
    AlarmNotification,
    LoggingWatcher,
    MetricCollectionWatcher,
    MetricNotification,
    ReportNotification,
    ReportSaverWatcher,
    RunStartedNotification,
    TraceNotification,
    Watcher,
    WatcherPool,
)


class _FailingWatcher(Watcher):
    def __init__(self):
        super().__init__(notification_of_interest={MetricNotification: self._fail})

    def _fail(self, notification, origin=None):
        raise RuntimeError("broken")


def _result(threshold: float):
    return run_to_alarm(NllDetector(pre=Gaussian(mean=0.0, std=1.0), threshold=threshold), [0.0, 3.0, 0.0], max_steps=3)


def test_pool_adds_watchers_once():
    # Arrange
    collector = MetricCollectionWatcher()

    # Act
    pool = WatcherPool("run").add([collector, collector]).add(collector)

    # Assert
    assert pool.watchers == [collector]
    assert collector.pool is pool


def test_pool_swallows_watcher_exceptions():
    # Arrange
    collector = MetricCollectionWatcher()
    pool = WatcherPool().add([_FailingWatcher(), collector])

    # Act
    pool.notify_all(MetricNotification(metrics={"wadd": 12.0}, metric_type="bench"))

    # Assert
    assert len(collector.metrics) == 1


def test_collector_ignores_its_own_notifications():
    # Arrange
    collector = MetricCollectionWatcher()

    # Act
    collector.listen(MetricNotification(metrics={"a": 1.0}, metric_type="x"), origin=collector)
    collector.listen(MetricNotification(metrics={"a": 2.0}, metric_type="x", detector="nll", scenario="s"))

    # Assert
    assert collector.rows() == [{"metric_type": "x", "scenario": "s", "detector": "nll", "a": 2.0}]


def test_fallback_handler_receives_unhandled_notifications():
    # Arrange
    received = []
    watcher = Watcher(fallback_handler=lambda notification, origin: received.append(notification))

    # Act
    watcher.listen(ReportNotification(name="r", payload={}))

    # Assert
    assert len(received) == 1


def test_report_saver_writes_into_the_run_directory(tmp_path):
    # Arrange
    saver = ReportSaverWatcher(tmp_path.as_posix())
    pool = WatcherPool("detect_0").add(saver)

    # Act
    pool.notify_all(RunStartedNotification(run_name="detect_0", command="detect", config={"seed": 0}))
    pool.notify_all(ReportNotification(name="detect", payload={"nll": {"stopping_time": 2}}))
    pool.notify_all(TraceNotification(name="frontier_nll", table=pd.DataFrame({"b": [1.0, 2.0]})))

    # Assert
    run_dir = tmp_path / "detect_0"
    assert json.loads((run_dir / "config.json").read_text()) == {"seed": 0}
    assert json.loads((run_dir / "detect.json").read_text())["nll"]["stopping_time"] == 2
    assert pd.read_csv(run_dir / "frontier_nll.csv")["b"].tolist() == [1.0, 2.0]


def test_report_saver_writes_alarm_and_trace_per_detector(tmp_path):
    # Arrange
    saver = ReportSaverWatcher(tmp_path.as_posix())
    pool = WatcherPool().add([saver, LoggingWatcher()])
    pool.notify_all(RunStartedNotification(run_name="run", command="detect"))

    # Act
    pool.notify_all(AlarmNotification(detector="nll", result=_result(2.0)))
    pool.notify_all(AlarmNotification(detector="quiet", result=_result(1e6), run_index=4))

    # Assert
    assert json.loads((tmp_path / "run" / "alarm_nll.json").read_text())["stopping_time"] == 2
    assert json.loads((tmp_path / "run" / "alarm_quiet_4.json").read_text()) == {"censored": 3}
    trace = pd.read_csv(tmp_path / "run" / "trace_quiet_4.csv")
    assert list(trace.columns) == ["step", "block", "W"]
    assert len(trace) == 3
