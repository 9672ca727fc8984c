from __future__ import annotations

import functools
import logging
from pathlib import Path

import pandas as pd
import typer
from pydantic import ValidationError

from ..common.errors import LatentQcdError, exit_code
from ..watcher import (
    LoggingWatcher,
    MetricCollectionWatcher,
    MetricNotification,
    ReportNotification,
    ReportSaverWatcher,
    RunStartedNotification,
    TraceNotification,
    WatcherPool,
)


class Session:
    def __init__(
        self, command: str, seed: int, output_folder: str, config: dict
    ) -> None:
        """One command invocation writing into `<output_folder>/<command>_<seed>/`.

        The resolved configuration is echoed as `config.json` before anything else is written.
        """
        self.command = command
        self.run_name = f"{command}_{seed}"
        self.saver = ReportSaverWatcher(output_folder)
        self.collector = MetricCollectionWatcher()
        self.pool = WatcherPool(self.run_name).add(
            [LoggingWatcher(), self.saver, self.collector]
        )
        self.pool.notify_all(
            RunStartedNotification(
                run_name=self.run_name, command=command, config=config
            )
        )

    @property
    def run_dir(self) -> Path:
        return self.saver.run_dir

    def report(self, name: str, payload: dict | list) -> None:
        self.pool.notify_all(ReportNotification(name=name, payload=payload))

    def table(self, name: str, table: pd.DataFrame) -> None:
        self.pool.notify_all(TraceNotification(name=name, table=table))

    def metric(
        self,
        metric_type: str,
        metrics: dict,
        detector: str | None = None,
        scenario: str | None = None,
    ) -> None:
        self.pool.notify_all(
            MetricNotification(
                metrics=metrics,
                metric_type=metric_type,
                detector=detector,
                scenario=scenario,
            )
        )

    def close(self) -> None:
        """Writes every metric sent during the session as `metrics.csv`."""
        rows = self.collector.rows()
        if rows:
            self.table("metrics", pd.DataFrame(rows))


def exits_on_error(func):
    """Turns library exceptions into exit codes: 2 configuration, 3 data, 4 numerical, 1 anything else."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ValidationError as e:
            logging.error(f"Invalid configuration: {e}")
            raise typer.Exit(code=2)
        except LatentQcdError as e:
            logging.error(f"{type(e).__name__}: {e.message}")
            raise typer.Exit(code=exit_code(e))
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            logging.error(f"Could not read input: {e}")
            raise typer.Exit(code=3)

    return wrapper
