from __future__ import annotations

import json
import logging
import re
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..common import GlobalContext, derive_seed
from ..common.errors import InvalidSpecError
from ..detectors import (
    DcMmdDetector,
    Detector,
    GaussianCusumDetector,
    GmmCusumDetector,
    LatentGmmDetector,
    NllDetector,
    RobustCusumDetector,
    calibrate_offset,
    check_offset,
    marginal_gaussian,
)
from ..errormodel import HmmSpec, sample_path
from ..evaluation import ScenarioSpec, calibrate_threshold
from ..kernels import RbfKernel, ReferenceSet, build_reference
from ..scenarios import ShiftKind, calibrated_emission_shift, load_registry, preset

CALIBRATE_PATTERN = re.compile(r"^calibrate:([0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)$")

DEFAULT_THRESHOLDS = {
    "dc_mmd": 1.0,
    "gcusum": 5.0,
    "gmm_cusum": 5.0,
    "robust_cusum": 5.0,
    "nll": 5.0,
    "lgmm": 5.0,
}

# seed cells of the detector factory
REFERENCE_CELL = 0
OFFSET_CELL = 1
OFFSET_CHECK_CELL = 2
CALIBRATION_CELL = 3


class DetectorConfig(BaseModel):
    """One detector of an experiment.

    `threshold` is either a number or `"calibrate:<gamma>"`, which bisects the threshold
    until the MTFA is close to gamma. `offset="auto"` uses the mean MMD on held-out
    in-distribution blocks, `bandwidth="median"` the median heuristic on the reference
    pairs. An explicit offset must lie below the post-change discrepancy.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    type: Literal["dc_mmd", "gcusum", "gmm_cusum", "robust_cusum", "nll", "lgmm"]
    name: str | None = None
    threshold: float | str | None = None
    b_grid: list[float] | None = None
    # dc_mmd
    offset: float | Literal["auto"] = "auto"
    margin: float = 0.0
    bandwidth: float | Literal["median"] = 0.8
    normalize: bool = False
    var_window: int = Field(default=20, ge=3)
    # cusum family
    kappa: float = Field(default=2.0, gt=0)
    assumed_post: Literal["true", "misspecified"] = "true"

    @field_validator("threshold")
    @classmethod
    def _check_threshold(cls, value: float | str | None) -> float | str | None:
        if value is None:
            return value
        if isinstance(value, str):
            match = CALIBRATE_PATTERN.match(value)
            if match is None or float(match.group(1)) <= 0:
                raise ValueError(
                    f"Threshold must be a number or 'calibrate:<gamma>', got '{value}'"
                )
            return value
        if not np.isfinite(value) or value <= 0:
            raise ValueError(f"Threshold must be positive and finite, got {value}")
        return float(value)

    @field_validator("bandwidth")
    @classmethod
    def _check_bandwidth(cls, value: float | str) -> float | str:
        if not isinstance(value, str) and value <= 0:
            raise ValueError(f"Bandwidth must be positive, got {value}")
        return value

    @property
    def key(self) -> str:
        return self.name or self.type

    @property
    def calibration_target(self) -> float | None:
        if isinstance(self.threshold, str):
            return float(CALIBRATE_PATTERN.match(self.threshold).group(1))
        return None


class ExperimentConfig(BaseModel):
    """A single JSON document configuring every command."""

    model_config = ConfigDict(extra="forbid")

    scenario: str | ScenarioSpec = "highway_car_following"
    shift: ShiftKind | None = None
    interpretation: Literal["switching", "self_transition"] = "switching"
    detectors: list[DetectorConfig] = Field(
        default_factory=lambda: [DetectorConfig(type="dc_mmd")]
    )
    m: int = Field(default=50, ge=2)
    reference_size: int | None = Field(default=None, ge=2)
    n_runs: int = Field(default=100, ge=1)
    n_runs_per_cell: int = Field(default=50, ge=1)
    max_len: int = Field(default=10_000, ge=1)
    horizon: int = Field(default=5_000, ge=1)
    seed: int = Field(default=0, ge=0)
    out: str | None = None

    @model_validator(mode="after")
    def _check_detectors(self) -> ExperimentConfig:
        keys = [d.key for d in self.detectors]
        if not keys:
            raise ValueError("At least one detector is required")
        if len(set(keys)) != len(keys):
            raise ValueError(f"Detector names must be unique, got {keys}")
        return self

    @classmethod
    def from_file(cls, path: str | Path | None, **overrides) -> ExperimentConfig:
        """Reads the JSON config at `path` (or starts from the defaults) and applies the non-None overrides."""
        data = {}
        if path is not None:
            try:
                with open(path, "r") as f:
                    data = json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                raise InvalidSpecError(f"Could not read config '{path}': {e}") from e
        data |= {k: v for k, v in overrides.items() if v is not None}
        return cls.model_validate(data)

    @property
    def output_folder(self) -> str:
        return self.out if self.out is not None else GlobalContext()["output_folder"]

    def resolve_scenario(self, check: bool = True) -> ScenarioSpec:
        """The scenario named by a preset or given inline, with `shift` applied to its pre-change process if set."""
        if isinstance(self.scenario, str):
            return preset(
                self.scenario,
                shift=self.shift,
                interpretation=self.interpretation,
                m=self.m,
                check=check,
            )
        if self.shift is None:
            return self.scenario
        fields = dict(
            pre=self.scenario.pre,
            post=self.shift.apply(self.scenario.pre),
            changepoint_grid=self.scenario.changepoint_grid,
            label=self.scenario.label,
        )
        if check:
            return ScenarioSpec(**fields)
        return ScenarioSpec.unchecked(**fields)

    def post_for(self, pre: HmmSpec) -> HmmSpec:
        """Post-change process for a pre-change process that was fitted rather than configured."""
        if self.shift is not None:
            return self.shift.apply(pre)
        default = load_registry().default_shift
        if not pre.is_gaussian:
            raise InvalidSpecError(
                "A shift must be configured for non-Gaussian pre-change processes"
            )
        shift = calibrated_emission_shift(
            pre, default.sigma_scale, default.ade_inflation
        )
        return shift.apply(pre)


class DetectorFactory:
    def __init__(
        self,
        config: ExperimentConfig,
        pre: HmmSpec,
        post: HmmSpec,
        reference_errors: np.ndarray | None = None,
    ) -> None:
        """Builds configured detectors for one pre- and post-change pair.

        Args:
            config (ExperimentConfig): The experiment.
            pre (HmmSpec): In-distribution error process.
            post (HmmSpec): Post-change error process, used by detectors that assume a known change
                and to check explicit DC-MMD offsets.
            reference_errors (np.ndarray | None, optional): In-distribution errors for the DC-MMD reference.
                Defaults to a stream simulated from `pre`.
        """
        self.config = config
        self.pre = pre
        self.post = post
        self.reference_errors = reference_errors
        self._references: dict[float | str, ReferenceSet] = {}

    @property
    def reference_size(self) -> int:
        return self.config.reference_size or GlobalContext()["reference_size"]

    def _seed(self, cell: int) -> int:
        return derive_seed(self.config.seed, cell)

    def reference(self, bandwidth: float | str) -> ReferenceSet:
        if bandwidth not in self._references:
            errors = self.reference_errors
            if errors is None:
                errors = sample_path(
                    self.pre, self.reference_size + 1, self._seed(REFERENCE_CELL)
                ).errors
            if bandwidth == "median":
                kernel = None
            else:
                kernel = RbfKernel(bandwidth=float(bandwidth))
            self._references[bandwidth] = build_reference(
                errors, kernel=kernel, max_samples=self.reference_size
            )
        return self._references[bandwidth]

    def _dc_mmd(self, detector: DetectorConfig, threshold: float) -> DcMmdDetector:
        reference = self.reference(detector.bandwidth)
        offset = detector.offset
        if offset == "auto":
            offset = calibrate_offset(
                reference,
                self.pre,
                m=self.config.m,
                seed=self._seed(OFFSET_CELL),
                margin=detector.margin,
            )
            logging.info(
                f"{detector.key}: offset {offset:.6f} from in-distribution blocks"
            )
        else:
            discrepancy = check_offset(
                offset, reference, self.post, seed=self._seed(OFFSET_CHECK_CELL)
            )
            logging.info(
                f"{detector.key}: offset {offset:.6f} below post-change discrepancy {discrepancy:.6f}"
            )
        return DcMmdDetector(
            reference=reference,
            m=self.config.m,
            offset=offset,
            threshold=threshold,
            normalize=detector.normalize,
            var_window=detector.var_window,
        )

    def template(self, detector: DetectorConfig) -> Detector:
        """The detector with a numeric or placeholder threshold.

        Raises:
            InvalidSpecError: If an explicit DC-MMD offset is not below the post-change discrepancy.
        """
        if isinstance(detector.threshold, float):
            threshold = detector.threshold
        else:
            threshold = DEFAULT_THRESHOLDS[detector.type]
        misspecified = detector.assumed_post == "misspecified"
        if detector.type == "dc_mmd":
            built = self._dc_mmd(detector, threshold)
        elif detector.type == "gcusum" and not misspecified:
            built = GaussianCusumDetector.from_specs(
                self.pre, self.post, threshold=threshold
            )
        elif detector.type == "gcusum":
            pre_marginal = marginal_gaussian(self.pre)
            post_marginal = marginal_gaussian(self.post)
            built = GaussianCusumDetector(
                pre=pre_marginal,
                post=post_marginal.shifted(
                    delta_mean=post_marginal.mean - pre_marginal.mean
                ),
                threshold=threshold,
            )
        elif detector.type == "gmm_cusum":
            built = GmmCusumDetector.from_specs(
                self.pre,
                None if misspecified else self.post,
                threshold=threshold,
                kappa=detector.kappa,
            )
        elif detector.type == "robust_cusum":
            built = RobustCusumDetector.from_spec(
                self.pre, kappa=detector.kappa, threshold=threshold
            )
        elif detector.type == "nll":
            built = NllDetector.from_spec(self.pre, threshold=threshold)
        else:
            built = LatentGmmDetector.from_spec(self.pre, threshold=threshold)
        built.label = detector.key
        return built

    def build(self, detector: DetectorConfig) -> Detector:
        """The detector with its threshold resolved, calibrating it on `pre` when requested."""
        built = self.template(detector)
        gamma = detector.calibration_target
        if gamma is None:
            return built
        threshold = calibrate_threshold(
            built,
            self.pre,
            gamma,
            n_runs=self.config.n_runs,
            seed=self._seed(CALIBRATION_CELL),
        )
        logging.info(
            f"{detector.key}: calibrated threshold {threshold:.6f} for MTFA {gamma}"
        )
        return built.clone(threshold=threshold)

    def build_all(self) -> dict[str, Detector]:
        return {d.key: self.build(d) for d in self.config.detectors}
