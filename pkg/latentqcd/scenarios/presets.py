from __future__ import annotations

import json
import math
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from ..common.errors import UnknownPresetError
from ..common.global_context import GlobalContext
from ..errormodel import Gaussian, HmmSpec
from ..evaluation import ScenarioSpec, default_changepoint_grid
from .shifts import ShiftKind, calibrated_emission_shift


class Difficulty(str, Enum):
    EASY = "Easy"
    MODERATE = "Moderate"
    HARD = "Hard"


class ScenePreset(BaseModel):
    """One driving scene of the registry with its categorical emission difficulty and switching probability."""

    model_config = ConfigDict(frozen=True)

    name: str
    group: str
    description: str = ""
    sources: list[str] = Field(default_factory=list)
    mean_gap: Difficulty
    variance: Difficulty
    p: float = Field(gt=0, lt=1)


class DifficultyMapping(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean_gap: dict[Difficulty, float]
    variance: dict[Difficulty, float]


class DefaultShift(BaseModel):
    model_config = ConfigDict(frozen=True)

    sigma_scale: float = Field(ge=1)
    ade_inflation: float = Field(gt=0)


class PresetRegistry(BaseModel):
    """Schema of the preset registry file."""

    model_config = ConfigDict(frozen=True)

    version: int
    units: str
    mean_low: float
    difficulty: DifficultyMapping
    default_shift: DefaultShift
    scenes: list[ScenePreset]

    def scene(self, name: str) -> ScenePreset:
        for scene in self.scenes:
            if scene.name == name:
                return scene
        raise UnknownPresetError(
            f"Unknown preset '{name}', available: {', '.join(self.names())}"
        )

    def names(self) -> list[str]:
        return [scene.name for scene in self.scenes]


@lru_cache(maxsize=8)
def _load(path: str) -> PresetRegistry:
    with open(path, "r") as f:
        return PresetRegistry.model_validate(json.load(f))


def load_registry(path: str | Path | None = None) -> PresetRegistry:
    """Loads the registry from `path` or from the `preset_file` of the global context."""
    return _load(str(path if path is not None else GlobalContext()["preset_file"]))


def scene(name: str) -> ScenePreset:
    return load_registry().scene(name)


def scene_names() -> list[str]:
    return load_registry().names()


def pre_change_spec(
    preset: ScenePreset,
    interpretation: Literal["switching", "self_transition"] = "switching",
    registry: PresetRegistry | None = None,
) -> HmmSpec:
    """In-distribution error process of a scene.

    With the "switching" interpretation `p` is the probability of leaving a mode, with
    "self_transition" it is the probability of staying.
    """
    registry = registry or load_registry()
    mean_low = registry.mean_low
    std = math.sqrt(registry.difficulty.variance[preset.variance])
    mean_high = mean_low + registry.difficulty.mean_gap[preset.mean_gap]
    switch = preset.p if interpretation == "switching" else 1.0 - preset.p
    return HmmSpec.symmetric(
        switch,
        emission_L=Gaussian(mean=mean_low, std=std),
        emission_H=Gaussian(mean=mean_high, std=std),
    )


def preset(
    name: str,
    shift: ShiftKind | None = None,
    interpretation: Literal["switching", "self_transition"] = "switching",
    m: int = 50,
    check: bool = True,
) -> ScenarioSpec:
    """Scenario of a registered scene.

    Args:
        name (str): Scene name, see `scene_names()`.
        shift (ShiftKind | None, optional): Post-change shift. Defaults to the emission shift
            calibrated to the registry's ADE inflation.
        interpretation (str, optional): Reading of the scene's `p`. Defaults to "switching".
        m (int, optional): Block length for the changepoint grid. Defaults to 50.
        check (bool, optional): Run the distinguishability guard, disable it for change-free
            streams. Defaults to True.

    Raises:
        UnknownPresetError: If the name is not registered.
        IndistinguishableScenarioError: If `check` is set and the shift is not detectable.

    Returns:
        ScenarioSpec: The scenario, labeled with the scene name.
    """
    registry = load_registry()
    scene_ = registry.scene(name)
    pre = pre_change_spec(scene_, interpretation, registry)
    if shift is None:
        shift = calibrated_emission_shift(
            pre,
            sigma_scale=registry.default_shift.sigma_scale,
            inflation=registry.default_shift.ade_inflation,
        )
    fields = dict(
        pre=pre,
        post=shift.apply(pre),
        changepoint_grid=default_changepoint_grid(m),
        label=name,
    )
    return ScenarioSpec(**fields) if check else ScenarioSpec.unchecked(**fields)
