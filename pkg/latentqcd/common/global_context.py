from pathlib import Path
from threading import Lock

import yaml

from .singleton import SingletonMeta

DEFAULTS: dict[str, any] = {
    "preset_file": (
        Path(__file__).parent.parent / "scenarios" / "presets.json"
    ).as_posix(),
    "output_folder": "runs",
    "progress": False,
    "reference_size": 2000,
}


class GlobalContext(metaclass=SingletonMeta):
    """Process wide settings such as the preset registry path and the output folder."""

    def __init__(self):
        self._lock = Lock()
        self._context: dict[str, any] = dict(DEFAULTS)

    def set(self, key: str, value: any):
        with self._lock:
            self._context[key] = value

    def get(self, key: str, default: any = ...) -> any:
        if key not in self._context:
            if default is ...:
                raise KeyError(f"Key `{key}` not found in global context")
            else:
                return default
        return self._context[key]

    def __getitem__(self, key: str) -> any:
        return self.get(key)

    def __setitem__(self, key, value):
        self.set(key, value)

    def __contains__(self, key: str) -> bool:
        return key in self._context

    def load_from_yaml(self, path: str | Path):
        """Loads settings from a yaml file on top of the defaults.

        Args:
            path (str | Path): Path to the yaml file.
        """
        with open(path, "r") as f:
            loaded = yaml.safe_load(f) or {}
        # empty entries keep their default
        loaded = {k: v for k, v in loaded.items() if v is not None}
        with self._lock:
            self._context = dict(DEFAULTS) | loaded

    def reset(self):
        with self._lock:
            self._context = dict(DEFAULTS)
