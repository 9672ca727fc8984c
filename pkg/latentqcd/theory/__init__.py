from .bounds import (
    BoundInputs,
    BoundReport,
    bound_a,
    bound_report,
    estimate_d_hat,
    estimate_R,
    order_optimal_threshold,
    wadd_upper_bound,
)
from .exponent import ExponentFit, fit_mtfa_exponent
