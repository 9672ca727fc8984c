from pathlib import Path

import numpy as np
import pandas as pd

from ..common.errors import (
    DegenerateSampleError,
    InvalidSpecError,
    MalformedLogError,
    NonFiniteValueError,
)
from .spec import ErrorPath, LatentMode

ERROR_LOG_COLUMNS = ["t", "e"]
TRAJECTORY_COLUMNS = ["t", "px", "py", "tx", "ty"]
FLOAT_FORMAT = "%.17g"


def _read_checked(path: str | Path, columns: list[str]) -> pd.DataFrame:
    # round_trip parsing returns the exact doubles written with FLOAT_FORMAT
    df = pd.read_csv(path, float_precision="round_trip")
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise MalformedLogError(
            f"{path} lacks the columns {missing}, expected header {','.join(columns)}"
        )
    if df.empty:
        raise DegenerateSampleError(f"{path} contains no rows")
    t = df["t"].to_numpy()
    if not np.issubdtype(t.dtype, np.integer) or np.any(np.diff(t) <= 0):
        raise MalformedLogError(
            f"Column t of {path} must hold strictly increasing integers"
        )
    values = df[columns[1:]].to_numpy(dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFiniteValueError(f"{path} contains non-finite values")
    return df


def read_error_log(path: str | Path) -> np.ndarray:
    """Reads an error log with header `t,e` and returns the errors in time order."""
    return _read_checked(path, ERROR_LOG_COLUMNS)["e"].to_numpy(dtype=float)


def write_error_log(
    path: str | Path,
    path_or_errors: ErrorPath | np.ndarray,
    include_modes: bool = False,
):
    """Writes an error log, optionally with a `mode` column holding `L`/`H`.

    Args:
        path (str | Path): Target CSV file.
        path_or_errors (ErrorPath | np.ndarray): Simulated path or plain errors.
        include_modes (bool, optional): Whether to add the latent modes. Requires an
            `ErrorPath`.
    """
    if isinstance(path_or_errors, ErrorPath):
        errors = path_or_errors.errors
    else:
        errors = np.asarray(path_or_errors)
    df = pd.DataFrame({"t": np.arange(1, errors.size + 1), "e": errors})
    if include_modes:
        if not isinstance(path_or_errors, ErrorPath):
            raise InvalidSpecError("Modes can only be written for simulated paths")
        df["mode"] = [LatentMode(int(z)).name for z in path_or_errors.modes]
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)


def write_mode_assignment(
    path: str | Path, errors: np.ndarray, modes: list[LatentMode]
):
    df = pd.DataFrame(
        {
            "t": np.arange(1, len(errors) + 1),
            "e": errors,
            "mode": [m.name for m in modes],
        }
    )
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)


def read_trajectory(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Reads a trajectory CSV with header `t,px,py,tx,ty`.

    Returns:
        tuple[np.ndarray, np.ndarray]: Predicted and true positions, each of shape
            `(T, 2)`.
    """
    df = _read_checked(path, TRAJECTORY_COLUMNS)
    return (
        df[["px", "py"]].to_numpy(dtype=float),
        df[["tx", "ty"]].to_numpy(dtype=float),
    )
