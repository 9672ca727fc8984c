import math

import numpy as np
import pytest
from pathlib import Path
import sys, os

sys.path.insert(0, Path(os.path.dirname(__file__)).parent.parent.as_posix())

from latentqcd.common.utils import derive_seed
from latentqcd.detectors import DcMmdDetector, Detector, GaussianCusumDetector, GmmCusumDetector, NllDetector
from latentqcd.errormodel import Gaussian, HmmSpec, sample_path
from latentqcd.evaluation import RunMetrics, ScenarioSpec, calibrate_threshold, estimate_mtfa, estimate_wadd, ood_scores_report
from latentqcd.kernels import RbfKernel, ReferenceSet, block_pairs, build_reference, mmd, rbf_eval
from latentqcd.scenarios import EmissionShift, TransitionShift, heavy_tail_suite, preset, unknown_postchange_suite
from latentqcd.theory import bound_report, fit_mtfa_exponent


def _brute_force_mmd(block, samples, sigma):
    def mean_kernel(a, b):
        return sum(rbf_eval(x, y, sigma) for x in a for y in b) / (len(a) * len(b))

    return math.sqrt(max(mean_kernel(block, block) + mean_kernel(samples, samples) - 2 * mean_kernel(block, samples), 0.0))


def _dc_mmd(pre: HmmSpec, m: int = 50, reference_size: int = 500, seed: int = 0, **kwargs) -> DcMmdDetector:
    reference = build_reference(
        sample_path(pre, reference_size + 1, derive_seed(seed, 0)).errors,
        kernel=RbfKernel(0.8),
        max_samples=reference_size,
    )
    return DcMmdDetector(reference=reference, m=m, **kwargs)


def _id_block_discrepancies(detector: DcMmdDetector, pre: HmmSpec, n_blocks: int = 400, seed: int = 1) -> np.ndarray:
    errors = sample_path(pre, detector.m * n_blocks, derive_seed(seed, 1)).errors
    return np.array([mmd(block, detector.reference) for block in block_pairs(errors, detector.m)])


@pytest.mark.slow
def test_blockwise_mmd_matches_the_double_sum():
    # Arrange
    rng = np.random.default_rng(0)

    for _ in range(200):
        n_block, n_ref = int(rng.integers(1, 60)), int(rng.integers(2, 60))
        block, samples = rng.normal(size=(n_block, 2)), rng.normal(size=(n_ref, 2))
        sigma = float(rng.uniform(0.2, 3.0))

        # Act
        value = mmd(block, ReferenceSet(samples=samples, kernel=RbfKernel(sigma)))

        # Assert
        assert value == pytest.approx(_brute_force_mmd(block, samples, sigma), abs=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("p, delta_mean", [(0.15, 2.0), (0.3, 2.0), (0.15, 3.0)])
def test_delay_stays_below_the_bound_for_strong_shifts(p, delta_mean):
    # Arrange
    pre = HmmSpec.symmetric(p, Gaussian(mean=0.0, std=0.3), Gaussian(mean=1.0, std=0.3))
    scenario = ScenarioSpec(pre=pre, post=EmissionShift(delta_mean=delta_mean).apply(pre), changepoint_grid=(1, 51, 251))
    detector = _dc_mmd(pre, threshold=1.0)
    offset = float(np.mean(_id_block_discrepancies(detector, pre)))
    detector = detector.clone(offset=offset)

    # Act
    report = bound_report(pre, scenario.post, detector.reference, m=50, b=1.0, offset=offset, n_samples=3000)
    metrics = estimate_wadd(detector, scenario, n_runs_per_cell=500, horizon=2000)

    # Assert
    assert report.bound != "vacuous"
    assert metrics.wadd - 2.33 * metrics.wadd_stderr <= report.bound


@pytest.mark.slow
def test_false_alarm_time_grows_exponentially_in_the_threshold():
    # Arrange
    pre = preset("highway_car_following", check=False).pre
    detector = _dc_mmd(pre)
    discrepancies = _id_block_discrepancies(detector, pre)
    spread = float(np.std(discrepancies, ddof=1))
    detector = detector.clone(
        offset=float(np.mean(discrepancies)) + 0.5 * spread,
        normalize=True,
        fixed_variance=spread**2,
    )

    # Act
    points = []
    for b in (0.5, 1.0, 1.5, 2.0, 2.5):
        estimate = estimate_mtfa(detector.clone(threshold=b), pre, n_runs=50, max_len=50_000, seed=3)
        assert estimate.censor_rate == 0
        points.append((b, estimate.mtfa))
    fit = fit_mtfa_exponent(points)

    # Assert
    assert fit.q > 0
    assert fit.r_squared >= 0.9


@pytest.mark.slow
def test_dc_mmd_separates_changed_streams_on_the_roundabout():
    # Arrange
    scenario = preset("urban_roundabout", check=False)
    detector = _dc_mmd(scenario.pre)
    detector = detector.clone(offset=float(np.mean(_id_block_discrepancies(detector, scenario.pre))))

    # Act
    report = ood_scores_report(detector, scenario, n_runs=100)

    # Assert
    assert report.auroc >= 0.9


def test_experiments_are_reproducible():
    # Arrange
    pre = HmmSpec.symmetric(0.15, Gaussian(mean=0.0, std=0.3), Gaussian(mean=1.0, std=0.3))
    scenario = ScenarioSpec(pre=pre, post=EmissionShift(delta_mean=1.0).apply(pre), changepoint_grid=(1, 51))
    detector = _dc_mmd(pre, m=20, reference_size=200, offset=0.1, threshold=0.5)

    # Act
    first = estimate_wadd(detector, scenario, n_runs_per_cell=5, horizon=400, seed=9)
    second = estimate_wadd(detector, scenario, n_runs_per_cell=5, horizon=400, seed=9)

    # Assert
    assert first == second


def _at_matched_mtfa(
    detector: Detector, scenario: ScenarioSpec, gamma: float, n_runs_per_cell: int, b_lo: float = 0.1, b_hi: float = 20.0
) -> RunMetrics:
    b = calibrate_threshold(detector, scenario.pre, gamma, b_lo=b_lo, b_hi=b_hi, n_runs=100, seed=derive_seed(0, 3))
    return estimate_wadd(detector.clone(threshold=b), scenario, n_runs_per_cell=n_runs_per_cell, seed=4)


def _auto_dc_mmd(pre: HmmSpec) -> DcMmdDetector:
    detector = _dc_mmd(pre)
    return detector.clone(offset=float(np.mean(_id_block_discrepancies(detector, pre))))


@pytest.mark.slow
@pytest.mark.xfail(
    strict=False,
    reason="block length 50 puts a floor of one block on the DC-MMD delay while the point-wise CUSUMs alarm "
    "within a few steps of this emission shift",
)
def test_unknown_postchange_ordering_at_matched_mtfa():
    # Arrange
    suite = unknown_postchange_suite(preset("highway_car_following"), reference_size=500)

    # Act
    metrics = {
        name: _at_matched_mtfa(detector, suite.scenario, 2000, 200, b_lo=0.01 if name == "dc_mmd" else 0.1)
        for name, detector in suite.detectors.items()
    }

    # Assert
    def upper(name):
        return metrics[name].wadd + 1.96 * metrics[name].wadd_stderr

    def lower(name):
        return metrics[name].wadd - 1.96 * metrics[name].wadd_stderr

    assert upper("dc_mmd") < lower("gcusum_misspecified")
    assert upper("robust_cusum") < lower("gcusum_misspecified")
    assert upper("gcusum_misspecified") < lower("nll")


@pytest.mark.slow
def test_dc_mmd_degrades_less_than_gaussian_cusum_under_heavy_tails():
    # Arrange
    suite = heavy_tail_suite(preset("highway_car_following"))

    # Act
    wadd = {}
    for member in ("gaussian", "student_t"):
        scenario = suite[member]
        wadd[member] = {
            "dc_mmd": _at_matched_mtfa(_auto_dc_mmd(scenario.pre), scenario, 2000, 500, b_lo=0.01).wadd,
            "gcusum": _at_matched_mtfa(
                GaussianCusumDetector.from_specs(scenario.pre, scenario.post), scenario, 2000, 500, b_hi=50.0
            ).wadd,
        }
    degradation = {k: wadd["student_t"][k] / wadd["gaussian"][k] - 1.0 for k in ("dc_mmd", "gcusum")}

    # Assert
    assert degradation["gcusum"] > 0
    assert degradation["dc_mmd"] <= 0.5 * degradation["gcusum"]


@pytest.mark.slow
@pytest.mark.parametrize("name, new_p", [("highway_car_following", 0.7), ("highway_stop_and_go", 0.85)])
def test_dc_mmd_dominates_gmm_cusum_on_transition_shifts(name, new_p):
    # Arrange
    scenario = preset(name, shift=TransitionShift(new_p=new_p))
    misspecified = GmmCusumDetector.from_specs(scenario.pre, None, kappa=2.0)

    # Act
    dc_mmd = _at_matched_mtfa(_auto_dc_mmd(scenario.pre), scenario, 1000, 100, b_lo=0.01)
    gmm_cusum = _at_matched_mtfa(misspecified, scenario, 1000, 100)

    # Assert
    assert dc_mmd.wadd <= 0.9 * gmm_cusum.wadd


@pytest.mark.slow
@pytest.mark.xfail(
    strict=False,
    reason="the window maximum of the point-wise NLL already separates this emission shift almost perfectly, "
    "so both scores sit at the top of the AUROC range and can tie or swap",
)
def test_nll_does_not_separate_better_than_dc_mmd_on_the_roundabout():
    # Arrange
    scenario = preset("urban_roundabout", check=False)
    nll = NllDetector.from_spec(scenario.pre)

    # Act
    dc_mmd_report = ood_scores_report(_auto_dc_mmd(scenario.pre), scenario, n_runs=100)
    nll_report = ood_scores_report(nll, scenario, n_runs=100)

    # Assert
    assert nll_report.auroc <= dc_mmd_report.auroc
