from .scenario import ScenarioSpec, check_distinguishable, default_changepoint_grid
from .estimators import (
    FrontierPoint,
    MtfaEstimate,
    RunMetrics,
    WaddCell,
    calibrate_threshold,
    compare_at_matched_mtfa,
    estimate_mtfa,
    estimate_wadd,
    frontier,
    frontier_table,
    wadd_at_mtfa,
)
from .scores import OodReport, auroc, fpr_at_tpr, ood_scores_report, score_runs
from .timing import PerfReport, TimingPercentiles, streaming_cost, timing_percentiles
