from .emissions import Emission, EmissionBase, Gaussian, Laplace, StudentT
from .spec import ErrorPath, HmmSpec, LatentMode, validate_transition
from .chain import (
    limiting_distribution,
    pair_stationary_distribution,
    second_eigenvalue_modulus,
    second_order_chain,
    spectral_gap,
    stationary_distribution,
)
from .sampling import sample_changed_path, sample_path
from .fitting import FitResult, fit_two_state_hmm, log_likelihood, map_mode_assignment
from .metrics import compute_ade, compute_fde, compute_rmse
from .io import read_error_log, read_trajectory, write_error_log, write_mode_assignment
