from __future__ import annotations

import math
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import brentq

from ..common.errors import InvalidSpecError
from ..errormodel import Gaussian, HmmSpec, stationary_distribution


class ShiftBase(BaseModel):
    """Turns a pre-change error process into a post-change one."""

    model_config = ConfigDict(frozen=True)

    def apply(self, spec: HmmSpec) -> HmmSpec:
        raise NotImplementedError("Please implement this method")


class EmissionShift(ShiftBase):
    """Moves both mode means by `delta_mean` and widens both modes by `sigma_scale`."""

    kind: Literal["emission"] = "emission"
    delta_mean: float
    sigma_scale: float = Field(default=1.0, ge=1.0)

    def apply(self, spec: HmmSpec) -> HmmSpec:
        return spec.with_emissions(
            spec.emission_L.shifted(self.delta_mean, self.sigma_scale),
            spec.emission_H.shifted(self.delta_mean, self.sigma_scale),
        )


class TransitionShift(ShiftBase):
    """Replaces the switching probability of both modes by `new_p`."""

    kind: Literal["transition"] = "transition"
    new_p: float = Field(gt=0, lt=1)

    def apply(self, spec: HmmSpec) -> HmmSpec:
        p = self.new_p
        return spec.with_transition(np.array([[1.0 - p, p], [p, 1.0 - p]]))


class TailSwap(ShiftBase):
    """Replaces both emissions by another family with the same mean and variance."""

    kind: Literal["tail"] = "tail"
    target: Literal["gaussian", "laplace", "student_t"]
    dof: float = Field(default=3.0, gt=2)

    def apply(self, spec: HmmSpec) -> HmmSpec:
        return spec.with_emissions(
            spec.emission_L.as_kind(self.target, self.dof),
            spec.emission_H.as_kind(self.target, self.dof),
        )


class Combined(ShiftBase):
    """Applies `shifts` in order."""

    kind: Literal["combined"] = "combined"
    shifts: list[ShiftKind]

    def apply(self, spec: HmmSpec) -> HmmSpec:
        for shift in self.shifts:
            spec = shift.apply(spec)
        return spec


ShiftKind = Annotated[
    Union[EmissionShift, TransitionShift, TailSwap, Combined],
    Field(discriminator="kind"),
]
Combined.model_rebuild()


def ade_scale_mean(spec: HmmSpec) -> float:
    """Stationary mean of `exp(e)`, the mean error on the ADE scale of log-ADE emissions."""
    pi = stationary_distribution(spec.P)
    values = []
    for emission in spec.emissions:
        if not isinstance(emission, Gaussian):
            raise InvalidSpecError(
                "ADE scale means are only defined for Gaussian log-ADE emissions"
            )
        values.append(math.exp(emission.mean + 0.5 * emission.variance))
    return float(pi @ np.array(values))


def ade_inflation(pre: HmmSpec, post: HmmSpec) -> float:
    """Relative increase of the ADE scale mean error, e.g. 1.48 for +148%."""
    return ade_scale_mean(post) / ade_scale_mean(pre) - 1.0


def calibrated_emission_shift(
    pre: HmmSpec, sigma_scale: float = 1.5, inflation: float = 1.48
) -> EmissionShift:
    """Emission shift with spread factor `sigma_scale` whose mean move gives exactly `inflation`."""

    def residual(delta: float) -> float:
        post = EmissionShift(delta_mean=delta, sigma_scale=sigma_scale).apply(pre)
        return ade_inflation(pre, post) - inflation

    # residual is increasing in delta, the bracket covers any inflation up to e^10
    delta = brentq(residual, -10.0, 10.0, xtol=1e-14)
    return EmissionShift(delta_mean=delta, sigma_scale=sigma_scale)
