from __future__ import annotations

import math

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.stats import mannwhitneyu

from ..common.errors import DegenerateSampleError, InvalidSpecError
from ..common.utils import derive_seed, ensure_finite
from ..detectors import Detector
from ..errormodel import sample_changed_path, sample_path
from .estimators import _progress
from .scenario import ScenarioSpec

# 20 blocks of the default block length 50
DEFAULT_SCORE_WINDOW = 1000
SCORE_ID_CELL = 2000
SCORE_OOD_CELL = 2001


class OodReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    auroc: float
    fpr95: float
    n_id: int
    n_ood: int


def _check_scores(scores_id, scores_ood) -> tuple[np.ndarray, np.ndarray]:
    scores_id = np.asarray(scores_id, dtype=float).ravel()
    scores_ood = np.asarray(scores_ood, dtype=float).ravel()
    if scores_id.size == 0 or scores_ood.size == 0:
        raise DegenerateSampleError("Both score arrays must be non-empty")
    ensure_finite(scores_id, "in-distribution score")
    ensure_finite(scores_ood, "out-of-distribution score")
    return scores_id, scores_ood


def auroc(scores_id, scores_ood) -> float:
    """Area under the ROC curve, `P(s_ood > s_id) + P(s_ood = s_id) / 2`, from the Mann-Whitney U statistic."""
    scores_id, scores_ood = _check_scores(scores_id, scores_ood)
    u = mannwhitneyu(scores_ood, scores_id, alternative="two-sided").statistic
    return float(u) / (scores_id.size * scores_ood.size)


def fpr_at_tpr(scores_id, scores_ood, tpr_target: float = 0.95) -> float:
    """In-distribution false positive rate at the largest threshold that flags `tpr_target` of the OOD scores.

    A score is flagged when it is greater than or equal to the threshold.
    """
    if not 0 < tpr_target <= 1:
        raise InvalidSpecError(f"Target TPR must lie in (0, 1], got {tpr_target}")
    scores_id, scores_ood = _check_scores(scores_id, scores_ood)
    descending = np.sort(scores_ood)[::-1]
    k = max(1, math.ceil(tpr_target * descending.size - 1e-9))
    threshold = descending[k - 1]
    return float(np.mean(scores_id >= threshold))


def score_runs(
    detector: Detector,
    scenario: ScenarioSpec,
    n_runs: int = 200,
    window: int = DEFAULT_SCORE_WINDOW,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Scores change-free and changed streams by the maximum statistic over a fixed window.

    Out-of-distribution streams change at the first step. No alarms are raised while scoring.

    Returns:
        tuple[np.ndarray, np.ndarray]: In-distribution and out-of-distribution scores.
    """
    if n_runs < 1 or window < 1:
        raise InvalidSpecError("Runs and window must be positive")
    scores_id = np.empty(n_runs)
    scores_ood = np.empty(n_runs)
    for r in _progress(range(n_runs), desc="Scores"):
        id_path = sample_path(scenario.pre, window, derive_seed(seed, SCORE_ID_CELL, r))
        ood_path = sample_changed_path(
            scenario.pre,
            scenario.post,
            1,
            window,
            derive_seed(seed, SCORE_OOD_CELL, r),
        )
        scores_id[r] = np.max(detector.clone().statistics(id_path.errors))
        scores_ood[r] = np.max(detector.clone().statistics(ood_path.errors))
    return scores_id, scores_ood


def ood_scores_report(
    detector: Detector,
    scenario: ScenarioSpec,
    n_runs: int = 200,
    window: int = DEFAULT_SCORE_WINDOW,
    seed: int = 0,
) -> OodReport:
    scores_id, scores_ood = score_runs(detector, scenario, n_runs, window, seed)
    return OodReport(
        auroc=auroc(scores_id, scores_ood),
        fpr95=fpr_at_tpr(scores_id, scores_ood),
        n_id=scores_id.size,
        n_ood=scores_ood.size,
    )
