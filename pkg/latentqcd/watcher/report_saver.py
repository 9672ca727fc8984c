import json
import logging
from pathlib import Path

from ..common import GlobalContext
from .notifications import (
    AlarmNotification,
    ReportNotification,
    RunStartedNotification,
    TraceNotification,
)
from .watcher import Watcher


class ReportSaverWatcher(Watcher):
    def __init__(self, save_folder: str | None = None) -> None:
        """Writes reports, tables and the resolved configuration into `<save_folder>/<run_name>/`.

        Args:
            save_folder (str | None, optional): Root output folder. Defaults to the `output_folder` of the global context.
        """
        super().__init__(
            notification_of_interest={
                RunStartedNotification: self._set_run_name,
                ReportNotification: self._save_report,
                TraceNotification: self._save_table,
                AlarmNotification: self._save_alarm,
            }
        )
        if save_folder is None:
            save_folder = GlobalContext()["output_folder"]
        self.save_folder = save_folder
        self.run_name = ""

    @property
    def run_dir(self) -> Path:
        path = Path(self.save_folder)
        if self.run_name:
            path = path / self.run_name
        path.mkdir(parents=True, exist_ok=True)
        return path

    def _set_run_name(
        self, notification: RunStartedNotification, origin: Watcher | None = None
    ) -> None:
        self.run_name = notification.run_name
        self._write_json(self.run_dir / "config.json", notification.config)

    def _save_report(
        self, notification: ReportNotification, origin: Watcher | None = None
    ) -> None:
        self._write_json(
            self.run_dir / f"{notification.name}.json", notification.payload
        )

    def _save_table(
        self, notification: TraceNotification, origin: Watcher | None = None
    ) -> None:
        path = self.run_dir / f"{notification.name}.csv"
        notification.table.to_csv(path, index=False, float_format="%.17g")
        logging.info(f"Saved '{path.as_posix()}'")

    def _save_alarm(
        self, notification: AlarmNotification, origin: Watcher | None = None
    ) -> None:
        suffix = f"_{notification.detector}"
        if notification.run_index is not None:
            suffix += f"_{notification.run_index}"
        result = notification.result
        self._write_json(self.run_dir / f"alarm{suffix}.json", result.report())
        result.trace.to_csv(
            self.run_dir / f"trace{suffix}.csv", index=False, float_format="%.17g"
        )

    @staticmethod
    def _write_json(path: Path, payload) -> None:
        with open(path, "w") as f:
            json.dump(payload, f, indent=2)
        logging.info(f"Saved '{path.as_posix()}'")
