from __future__ import annotations

import logging

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationInfo,
    field_validator,
    model_validator,
)

from ..common.errors import IndistinguishableScenarioError
from ..common.utils import derive_seed
from ..errormodel import HmmSpec, sample_path
from ..kernels import (
    RbfKernel,
    median_heuristic,
    mmd_between_samples,
    second_order_samples,
)

DEFAULT_BLOCK_LENGTH = 50
GUARD_SAMPLES = 2000
# validation context key that skips the distinguishability guard
SKIP_GUARD = "skip_distinguishability_guard"


def default_changepoint_grid(m: int = DEFAULT_BLOCK_LENGTH) -> tuple[int, ...]:
    """Changepoints `1, m + 1, 5 m + 1, 10 m + 1`."""
    return (1, m + 1, 5 * m + 1, 10 * m + 1)


class ScenarioSpec(BaseModel):
    """Pre- and post-change error processes plus the changepoints the worst case delay is taken over.

    Construction runs the distinguishability guard, so every scenario describes a change that
    can be detected in principle. `ScenarioSpec.unchecked` skips it for change-free uses.

    Raises:
        IndistinguishableScenarioError: If the post-change process cannot be told apart from the
            pre-change process.
    """

    model_config = ConfigDict(frozen=True)

    pre: HmmSpec
    post: HmmSpec
    changepoint_grid: tuple[int, ...] = Field(default_factory=default_changepoint_grid)
    label: str = "scenario"

    @field_validator("changepoint_grid")
    @classmethod
    def _check_grid(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if not value:
            raise ValueError("The changepoint grid must not be empty")
        if any(t < 1 for t in value):
            raise ValueError(f"Changepoints are 1-based, got {value}")
        return tuple(sorted(set(value)))

    @model_validator(mode="after")
    def _check_distinguishable(self, info: ValidationInfo) -> ScenarioSpec:
        if info.context and info.context.get(SKIP_GUARD, False):
            return self
        _regime_discrepancy(self.pre, self.post, self.label, GUARD_SAMPLES, seed=0)
        return self

    @classmethod
    def unchecked(cls, **fields) -> ScenarioSpec:
        """Builds a scenario without the distinguishability guard."""
        return cls.model_validate(fields, context={SKIP_GUARD: True})

    def relabel(self, label: str) -> ScenarioSpec:
        return self.model_copy(update={"label": label})

    def with_post(self, post: HmmSpec, label: str | None = None) -> ScenarioSpec:
        return ScenarioSpec(
            pre=self.pre,
            post=post,
            changepoint_grid=self.changepoint_grid,
            label=label or self.label,
        )


def _regime_discrepancy(
    pre: HmmSpec,
    post: HmmSpec,
    label: str,
    n_samples: int,
    seed: int,
    kernel: RbfKernel | None = None,
) -> float:
    if pre == post:
        raise IndistinguishableScenarioError(
            f"Scenario '{label}' has identical pre- and post-change models"
        )

    def pairs(spec: HmmSpec, cell: int):
        errors = sample_path(spec, n_samples + 1, derive_seed(seed, cell)).errors
        return second_order_samples(errors)

    pre_a, pre_b, post_pairs = pairs(pre, 0), pairs(pre, 1), pairs(post, 2)
    kernel = kernel or RbfKernel(median_heuristic(pre_a))
    between = mmd_between_samples(post_pairs, pre_a, kernel)
    within = mmd_between_samples(pre_b, pre_a, kernel)
    if between <= within:
        raise IndistinguishableScenarioError(
            f"Scenario '{label}': post-change discrepancy {between:.4f} does not exceed the "
            f"sampling noise level {within:.4f}"
        )
    logging.info(
        f"Scenario '{label}' discrepancy {between:.4f} (noise level {within:.4f})"
    )
    return between


def check_distinguishable(
    scenario: ScenarioSpec,
    n_samples: int = 4000,
    seed: int = 0,
    kernel: RbfKernel | None = None,
) -> float:
    """Guards against scenarios whose change cannot be told apart from sampling noise.

    Compares the MMD between pre- and post-change second-order samples with the MMD between two
    independent pre-change samples of the same size. Scenarios run this guard on construction,
    call it directly to repeat it with more samples, another seed or another kernel.

    Raises:
        IndistinguishableScenarioError: If both regimes coincide or the between-regime discrepancy
            does not exceed the within-regime one.

    Returns:
        float: The estimated discrepancy between the regimes.
    """
    return _regime_discrepancy(
        scenario.pre, scenario.post, scenario.label, n_samples, seed, kernel
    )
