from __future__ import annotations

import json
import logging
from enum import Enum
from pathlib import Path

import numpy as np
import pandas as pd
import typer

from ..common import GlobalContext, Transferables, derive_seed
from ..common.errors import InvalidSpecError
from ..detectors import DcMmdDetector, Detector, run_to_alarm
from ..errormodel import (
    compute_ade,
    compute_fde,
    compute_rmse,
    fit_two_state_hmm,
    map_mode_assignment,
    read_error_log,
    read_trajectory,
    sample_changed_path,
    sample_path,
    stationary_distribution,
    write_error_log,
    write_mode_assignment,
)
from ..evaluation import (
    ScenarioSpec,
    calibrate_threshold,
    compare_at_matched_mtfa,
    estimate_mtfa,
    estimate_wadd,
    frontier,
    frontier_table,
    ood_scores_report,
    streaming_cost,
    timing_percentiles,
)
from ..scenarios import (
    heavy_tail_suite,
    load_registry,
    pre_change_spec,
    stationarity_suite,
    unknown_postchange_suite,
)
from ..theory import bound_report, fit_mtfa_exponent, order_optimal_threshold
from ..watcher import AlarmNotification
from .config import CALIBRATION_CELL, DetectorFactory, ExperimentConfig
from .session import Session, exits_on_error

app = typer.Typer(
    help="Latent-dynamics-aware change detection on prediction-error streams.",
    add_completion=False,
)

# seed cells of the evaluation commands
MTFA_CHECK_CELL = 10
SCORE_CELL = 11
TIMING_CELL = 12


class Suite(str, Enum):
    heavy_tail = "heavy_tail"
    unknown_post = "unknown_post"
    stationarity = "stationarity"


class DeltaReading(str, Enum):
    lambda2 = "lambda2"
    gap = "gap"


@app.callback()
def main(
    verbose: bool = typer.Option(
        False, "--verbose", "-v", help="Log progress on INFO level."
    ),
    context: str | None = typer.Option(None, help="YAML file with global settings."),
    progress: bool = typer.Option(
        False, help="Show progress bars over Monte-Carlo runs."
    ),
):
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(message)s",
    )
    if context is not None:
        GlobalContext().load_from_yaml(context)
    if progress:
        GlobalContext()["progress"] = True


def _load(
    config: str | None, seed: int | None, out: str | None, runs: int | None = None
) -> ExperimentConfig:
    return ExperimentConfig.from_file(config, seed=seed, out=out, n_runs=runs)


def _session(command: str, cfg: ExperimentConfig, **extra) -> Session:
    return Session(
        command, cfg.seed, cfg.output_folder, cfg.model_dump(mode="json") | extra
    )


def _output_folder(out: str | None) -> str:
    return out if out is not None else GlobalContext()["output_folder"]


@app.command()
@exits_on_error
def simulate(
    config: str | None = typer.Option(None, help="Experiment config JSON."),
    length: int = typer.Option(10_000, min=1, help="Number of errors per stream."),
    changepoint: int | None = typer.Option(
        None, min=1, help="First post-change step, none for change-free streams."
    ),
    modes: bool = typer.Option(False, help="Add the latent mode column."),
    seed: int | None = typer.Option(None, help="Master seed."),
    runs: int = typer.Option(1, min=1, help="Number of streams."),
    out: str | None = typer.Option(None, help="Output folder."),
):
    """Simulates error logs of the configured scenario."""
    cfg = _load(config, seed, out)
    scenario = cfg.resolve_scenario(check=changepoint is not None)
    session = _session(
        "simulate", cfg, length=length, changepoint=changepoint, runs=runs
    )
    session.report("scenario", scenario.model_dump(mode="json"))
    for r in range(runs):
        stream_seed = derive_seed(cfg.seed, r)
        if changepoint is None:
            path = sample_path(scenario.pre, length, stream_seed)
        else:
            path = sample_changed_path(
                scenario.pre, scenario.post, changepoint, length, stream_seed
            )
        name = "errors.csv" if runs == 1 else f"errors_{r}.csv"
        write_error_log(session.run_dir / name, path, include_modes=modes)
        logging.info(f"Wrote {length} errors to '{name}'")


@app.command()
@exits_on_error
def fit(
    errors: Path = typer.Argument(..., help="Error log with header t,e."),
    max_iters: int = typer.Option(200, min=1),
    tol: float = typer.Option(1e-6, min=0),
    seed: int = typer.Option(0, min=0, help="Names the run directory."),
    out: str | None = typer.Option(None, help="Output folder."),
):
    """Fits a two-state Gaussian HMM and assigns the most responsible mode to every step."""
    values = read_error_log(errors)
    session = Session(
        "fit",
        seed,
        _output_folder(out),
        {"errors": errors.as_posix(), "max_iters": max_iters, "tol": tol, "seed": seed},
    )
    result = fit_two_state_hmm(values, max_iters=max_iters, tol=tol)
    result.spec.save(session.run_dir / "spec.json")
    write_mode_assignment(
        session.run_dir / "modes.csv", values, map_mode_assignment(values, result.spec)
    )
    session.report(
        "fit",
        {
            "log_likelihood": result.log_likelihood,
            "log_likelihoods": result.log_likelihoods,
            "converged": result.converged,
            "n_iter": result.n_iter,
            "initial_distribution": result.initial_distribution.tolist(),
            "stationary_distribution": stationary_distribution(result.spec.P).tolist(),
        },
    )


@app.command()
@exits_on_error
def detect(
    errors: Path = typer.Argument(..., help="Error log with header t,e."),
    config: str | None = typer.Option(None, help="Experiment config JSON."),
    reference: Path | None = typer.Option(
        None, help="In-distribution error log replacing the simulated reference."
    ),
    seed: int | None = typer.Option(None, help="Master seed."),
    runs: int | None = typer.Option(
        None, min=1, help="Runs per MTFA estimate during calibration."
    ),
    out: str | None = typer.Option(None, help="Output folder."),
):
    """Streams an error log through every configured detector and writes traces and alarms."""
    cfg = _load(config, seed, out, runs)
    stream = read_error_log(errors)
    if reference is not None:
        reference_errors = read_error_log(reference)
        pre = fit_two_state_hmm(reference_errors).spec
        post = cfg.post_for(pre)
    else:
        scenario = cfg.resolve_scenario()
        reference_errors, pre, post = None, scenario.pre, scenario.post
    session = _session(
        "detect",
        cfg,
        errors=errors.as_posix(),
        reference=reference.as_posix() if reference else None,
    )
    factory = DetectorFactory(cfg, pre, post, reference_errors)
    summary = {}
    for key, detector in factory.build_all().items():
        result = run_to_alarm(detector, stream, max_steps=stream.size)
        session.pool.notify_all(AlarmNotification(detector=key, result=result))
        summary[key] = {"threshold": detector.threshold} | result.report()
    session.report("detect", summary)


@app.command()
@exits_on_error
def calibrate(
    gamma: float = typer.Option(
        1_000.0, min=1, help="Target mean time to false alarm."
    ),
    config: str | None = typer.Option(None, help="Experiment config JSON."),
    seed: int | None = typer.Option(None, help="Master seed."),
    runs: int | None = typer.Option(None, min=1, help="Runs per MTFA estimate."),
    out: str | None = typer.Option(None, help="Output folder."),
):
    """Calibrates every detector threshold to the target MTFA and re-checks it on fresh streams."""
    cfg = _load(config, seed, out, runs)
    scenario = cfg.resolve_scenario(check=False)
    session = _session("calibrate", cfg, gamma=gamma)
    factory = DetectorFactory(cfg, scenario.pre, scenario.post)
    calibration = {}
    for detector_cfg in cfg.detectors:
        template = factory.template(detector_cfg)
        b = calibrate_threshold(
            template,
            scenario.pre,
            gamma,
            n_runs=cfg.n_runs,
            seed=derive_seed(cfg.seed, CALIBRATION_CELL),
        )
        check = estimate_mtfa(
            template.clone(threshold=b),
            scenario.pre,
            n_runs=cfg.n_runs,
            max_len=int(np.ceil(10 * gamma)),
            seed=derive_seed(cfg.seed, MTFA_CHECK_CELL),
        )
        calibration[detector_cfg.key] = {"threshold": b} | check.model_dump()
        if isinstance(template, DcMmdDetector):
            calibration[detector_cfg.key]["offset"] = template.offset
        session.metric(
            "calibration",
            {"threshold": b, "mtfa": check.mtfa},
            detector=detector_cfg.key,
            scenario=scenario.label,
        )
    session.report("calibration", calibration)
    session.close()


@app.command(name="frontier")
@exits_on_error
def frontier_command(
    config: str | None = typer.Option(
        None, help="Experiment config JSON, every detector needs a b_grid."
    ),
    target_mtfa: float | None = typer.Option(
        None, help="MTFA of the matched comparison, defaults to the shared range."
    ),
    seed: int | None = typer.Option(None, help="Master seed."),
    runs: int | None = typer.Option(None, min=1, help="Runs per MTFA estimate."),
    out: str | None = typer.Option(None, help="Output folder."),
):
    """Sweeps the threshold grid of every detector and writes the WADD versus MTFA frontier."""
    cfg = _load(config, seed, out, runs)
    missing = [d.key for d in cfg.detectors if not d.b_grid]
    if missing:
        raise InvalidSpecError(f"Detectors {missing} lack a b_grid")
    scenario = cfg.resolve_scenario()
    session = _session("frontier", cfg, target_mtfa=target_mtfa)
    factory = DetectorFactory(cfg, scenario.pre, scenario.post)
    frontiers, exponents = {}, {}
    for detector_cfg in cfg.detectors:
        points = frontier(
            factory.template(detector_cfg),
            scenario,
            detector_cfg.b_grid,
            seed=cfg.seed,
            n_runs=cfg.n_runs,
            n_runs_per_cell=cfg.n_runs_per_cell,
            max_len=cfg.max_len,
            horizon=cfg.horizon,
        )
        frontiers[detector_cfg.key] = points
        session.table(f"frontier_{detector_cfg.key}", frontier_table(points))
        uncensored = [(p.b, p.mtfa) for p in points if p.censor_rate == 0]
        if len(uncensored) >= 4:
            exponents[detector_cfg.key] = fit_mtfa_exponent(uncensored).model_dump()
        else:
            logging.warning(
                f"{detector_cfg.key}: only {len(uncensored)} uncensored points, MTFA exponent not fitted"
            )
            exponents[detector_cfg.key] = None
    session.report("exponents", exponents)
    if len(frontiers) > 1:
        try:
            session.report("matched", compare_at_matched_mtfa(frontiers, target_mtfa))
        except InvalidSpecError as e:
            logging.warning(f"No matched comparison: {e.message}")


def _bench_members(
    suite: Suite, cfg: ExperimentConfig
) -> list[tuple[ScenarioSpec, dict[str, Detector]]]:
    base = cfg.resolve_scenario()
    if suite == Suite.unknown_post:
        built = unknown_postchange_suite(
            base,
            m=cfg.m,
            reference_size=cfg.reference_size or GlobalContext()["reference_size"],
            seed=cfg.seed,
        )
        return [(built.scenario, built.detectors)]
    if suite == Suite.heavy_tail:
        members = heavy_tail_suite(base)
    else:
        members = stationarity_suite(base)
    out = []
    for name, scenario in members.items():
        factory = DetectorFactory(cfg, scenario.pre, scenario.post)
        detectors = {d.key: factory.template(d) for d in cfg.detectors}
        out.append((scenario.relabel(name), detectors))
    return out


@app.command()
@exits_on_error
def bench(
    suite: Suite = typer.Option(Suite.unknown_post, help="Scenario suite."),
    gamma: float = typer.Option(
        1_000.0, min=1, help="MTFA every detector is calibrated to."
    ),
    score_runs: int = typer.Option(
        200, min=1, help="Streams per class of the AUROC protocol."
    ),
    timing_steps: int = typer.Option(
        10_000, min=1, help="Steps of the latency measurement."
    ),
    config: str | None = typer.Option(None, help="Experiment config JSON."),
    seed: int | None = typer.Option(None, help="Master seed."),
    runs: int | None = typer.Option(None, min=1, help="Runs per MTFA estimate."),
    out: str | None = typer.Option(None, help="Output folder."),
):
    """Calibrates, then measures delay, separability and latency of every detector on a scenario suite."""
    cfg = _load(config, seed, out, runs)
    session = _session(
        "bench", cfg, suite=suite.value, gamma=gamma, score_runs=score_runs
    )
    rows = []
    for scenario, detectors in _bench_members(suite, cfg):
        for key, template in detectors.items():
            b = calibrate_threshold(
                template,
                scenario.pre,
                gamma,
                n_runs=cfg.n_runs,
                seed=derive_seed(cfg.seed, CALIBRATION_CELL),
            )
            detector = template.clone(threshold=b)
            mtfa = estimate_mtfa(
                detector,
                scenario.pre,
                cfg.n_runs,
                int(np.ceil(10 * gamma)),
                derive_seed(cfg.seed, MTFA_CHECK_CELL),
            )
            wadd = estimate_wadd(
                detector, scenario, cfg.n_runs_per_cell, cfg.seed, cfg.horizon
            )
            scores = ood_scores_report(
                template,
                scenario,
                n_runs=score_runs,
                seed=derive_seed(cfg.seed, SCORE_CELL),
            )
            timing_errors = sample_path(
                scenario.pre, timing_steps, derive_seed(cfg.seed, TIMING_CELL)
            ).errors
            timing = timing_percentiles(template, timing_errors)
            row = {
                "scenario": scenario.label,
                "detector": key,
                "threshold": b,
                "mtfa": mtfa.mtfa,
                "mtfa_censor_rate": mtfa.censor_rate,
                "wadd": wadd.wadd,
                "wadd_stderr": wadd.wadd_stderr,
                "wadd_censor_rate": wadd.censor_rate,
                "auroc": scores.auroc,
                "fpr95": scores.fpr95,
            } | timing.model_dump()
            session.metric(
                "bench",
                {"wadd": wadd.wadd, "mtfa": mtfa.mtfa, "auroc": scores.auroc},
                key,
                scenario.label,
            )
            rows.append(row)
    session.table("bench", pd.DataFrame(rows))
    session.report("bench", rows)
    session.close()


@app.command()
@exits_on_error
def perf(
    length: list[int] = typer.Option(
        [10_000, 100_000, 1_000_000], help="Stream lengths, repeat the flag."
    ),
    repeats: int = typer.Option(3, min=1),
    config: str | None = typer.Option(None, help="Experiment config JSON."),
    seed: int | None = typer.Option(None, help="Master seed."),
    out: str | None = typer.Option(None, help="Output folder."),
):
    """Regresses the per-step latency of every detector on the stream length."""
    cfg = _load(config, seed, out)
    scenario = cfg.resolve_scenario(check=False)
    session = _session("perf", cfg, lengths=length, repeats=repeats)
    factory = DetectorFactory(cfg, scenario.pre, scenario.post)
    reports = {}
    for detector_cfg in cfg.detectors:
        report = streaming_cost(
            factory.template(detector_cfg),
            scenario.pre,
            lengths=length,
            repeats=repeats,
            seed=cfg.seed,
        )
        reports[detector_cfg.key] = report.model_dump() | {
            "constant_cost": report.constant_cost
        }
        session.metric(
            "perf",
            {"slope_us_per_step": report.slope_us_per_step},
            detector=detector_cfg.key,
        )
    session.report("perf", reports)
    session.close()


@app.command()
@exits_on_error
def bounds(
    b: float | None = typer.Option(
        None, help="Threshold, defaults to the configured one."
    ),
    samples: int = typer.Option(
        10_000, min=2, help="Samples per regime for the post-change discrepancy."
    ),
    delta: DeltaReading = typer.Option(
        DeltaReading.lambda2, help="Mixing coefficient entering the bound."
    ),
    gamma: float | None = typer.Option(
        None, help="False alarm constraint of the order optimal threshold."
    ),
    q: float | None = typer.Option(
        None, help="MTFA exponent of the order optimal threshold."
    ),
    config: str | None = typer.Option(None, help="Experiment config JSON."),
    seed: int | None = typer.Option(None, help="Master seed."),
    out: str | None = typer.Option(None, help="Output folder."),
):
    """Evaluates the delay bound of every configured DC-MMD detector."""
    cfg = _load(config, seed, out)
    scenario = cfg.resolve_scenario()
    session = _session(
        "bounds", cfg, b=b, samples=samples, delta=delta.value, gamma=gamma, q=q
    )
    factory = DetectorFactory(cfg, scenario.pre, scenario.post)
    reports = {}
    for detector_cfg in cfg.detectors:
        if detector_cfg.type != "dc_mmd":
            continue
        if b is None:
            detector = factory.build(detector_cfg)
        else:
            detector = factory.template(detector_cfg)
        report = bound_report(
            scenario.pre,
            scenario.post,
            detector.reference,
            m=detector.m,
            b=detector.threshold if b is None else b,
            offset=detector.offset,
            n_samples=samples,
            seed=cfg.seed,
            delta_used=delta.value,
        )
        reports[detector_cfg.key] = report.model_dump()
    if not reports:
        raise InvalidSpecError(
            "The bound applies to DC-MMD detectors only, none is configured"
        )
    if gamma is not None and q is not None:
        reports["order_optimal_threshold"] = order_optimal_threshold(gamma, cfg.m, q)
    session.report("bounds", reports)


@app.command()
@exits_on_error
def metrics(
    trajectory: Path = typer.Argument(
        ..., help="Trajectory CSV with header t,px,py,tx,ty."
    ),
    seed: int = typer.Option(0, min=0, help="Names the run directory."),
    out: str | None = typer.Option(None, help="Output folder."),
):
    """Computes ADE, FDE and RMSE of a predicted trajectory."""
    pred, truth = read_trajectory(trajectory)
    session = Session(
        "metrics",
        seed,
        _output_folder(out),
        {"trajectory": trajectory.as_posix(), "seed": seed},
    )
    values = {
        "ade": compute_ade(pred, truth),
        "fde": compute_fde(pred, truth),
        "rmse": compute_rmse(pred, truth),
    }
    session.metric("trajectory", values)
    session.report("metrics", values)
    session.close()


@app.command()
@exits_on_error
def presets(
    interpretation: str = typer.Option(
        "switching", help="Reading of p: switching or self_transition."
    ),
    seed: int = typer.Option(0, min=0, help="Names the run directory."),
    out: str | None = typer.Option(None, help="Output folder."),
):
    """Lists the registered scenes with their in-distribution error processes."""
    if interpretation not in ("switching", "self_transition"):
        raise InvalidSpecError(f"Unknown interpretation '{interpretation}'")
    registry = load_registry()
    session = Session(
        "presets",
        seed,
        _output_folder(out),
        {"interpretation": interpretation, "seed": seed},
    )
    listing = []
    for scene in registry.scenes:
        pre = pre_change_spec(scene, interpretation, registry)
        listing.append(
            scene.model_dump(mode="json") | {"pre": pre.model_dump(mode="json")}
        )
        typer.echo(
            f"{scene.name:<28} {scene.group:<10} mean gap {scene.mean_gap.value:<9} "
            f"variance {scene.variance.value:<9} p={scene.p}"
        )
    session.report("presets", listing)


@app.command()
def describe():
    """Prints the registered detector types with their documented constructor arguments."""
    overview = Transferables().overview(Detector)
    typer.echo(json.dumps(overview, indent=2, default=str))
