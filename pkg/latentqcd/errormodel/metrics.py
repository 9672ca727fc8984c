import numpy as np

from ..common.errors import DegenerateSampleError, LengthMismatchError
from ..common.utils import ensure_finite


def _distances(pred, truth) -> np.ndarray:
    pred = np.asarray(pred, dtype=float).reshape(-1, 2)
    truth = np.asarray(truth, dtype=float).reshape(-1, 2)
    if pred.shape[0] != truth.shape[0]:
        raise LengthMismatchError(
            f"Trajectories differ in length: {pred.shape[0]} != {truth.shape[0]}"
        )
    if pred.shape[0] == 0:
        raise DegenerateSampleError("Trajectories are empty")
    ensure_finite(pred, "predicted position")
    ensure_finite(truth, "true position")
    return np.linalg.norm(pred - truth, axis=1)


def compute_ade(pred, truth) -> float:
    """Average displacement error, the mean pointwise Euclidean distance."""
    return float(np.mean(_distances(pred, truth)))


def compute_fde(pred, truth) -> float:
    """Final displacement error, the distance at the last index."""
    return float(_distances(pred, truth)[-1])


def compute_rmse(pred, truth) -> float:
    return float(np.sqrt(np.mean(_distances(pred, truth) ** 2)))
