from __future__ import annotations

import logging
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.stats import linregress

from ..common.errors import DegenerateSampleError, InvalidSpecError

MIN_POINTS = 4


class ExponentFit(BaseModel):
    """Least squares fit `log MTFA = intercept + q b`."""

    model_config = ConfigDict(frozen=True)

    q: float
    intercept: float
    r_squared: float
    n_points: int

    @property
    def consistent(self) -> bool:
        """Whether the false alarm time grows with the threshold."""
        return self.q > 0


def fit_mtfa_exponent(
    points: Sequence[tuple[float, float]],
    censored: Sequence[bool] | None = None,
) -> ExponentFit:
    """Fits the exponential growth rate of the mean time to false alarm in the threshold.

    Args:
        points (Sequence[tuple[float, float]]): `(b, mtfa)` pairs, at least four with distinct b.
        censored (Sequence[bool] | None, optional): Censoring flags per point, censored points are rejected.

    Raises:
        InvalidSpecError: If a point is censored, an MTFA is not positive or the b values repeat.
        DegenerateSampleError: If fewer than four points are given.

    Returns:
        ExponentFit: Slope, intercept and coefficient of determination.
    """
    data = np.asarray(points, dtype=float).reshape(-1, 2)
    if data.shape[0] < MIN_POINTS:
        raise DegenerateSampleError(
            f"At least {MIN_POINTS} points are required, got {data.shape[0]}"
        )
    if censored is not None and any(censored):
        raise InvalidSpecError(
            "Censored MTFA estimates must be excluded before fitting"
        )
    b, mtfa = data[:, 0], data[:, 1]
    if np.any(mtfa <= 0):
        raise InvalidSpecError("MTFA values must be positive")
    if np.unique(b).size != b.size:
        raise InvalidSpecError("Threshold values must be distinct")

    log_mtfa = np.log(mtfa)
    if np.ptp(log_mtfa) == 0:
        logging.warning(
            "MTFA does not vary with the threshold, the exponential growth is not reproduced"
        )
        return ExponentFit(
            q=0.0, intercept=float(log_mtfa[0]), r_squared=0.0, n_points=b.size
        )
    fit = linregress(b, log_mtfa)
    fitted = ExponentFit(
        q=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=float(fit.rvalue**2),
        n_points=b.size,
    )
    if not fitted.consistent:
        logging.warning(f"Fitted MTFA exponent {fitted.q:.4f} is not positive")
    return fitted
