from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..common.errors import InvalidSpecError, LengthMismatchError
from .emissions import Emission, Gaussian

ROW_SUM_TOLERANCE = 1e-12


class LatentMode(IntEnum):
    """Latent error mode, L is the low-error and H the high-error mode."""

    L = 0
    H = 1


def validate_transition(P: np.ndarray | list) -> np.ndarray:
    """Checks that `P` is a 2x2 row-stochastic matrix with strictly positive entries.

    Args:
        P (np.ndarray | list): The candidate transition matrix.

    Raises:
        InvalidSpecError: If the shape, the entries or the row sums are invalid.

    Returns:
        np.ndarray: `P` as a float array.
    """
    P = np.asarray(P, dtype=float)
    if P.shape != (2, 2):
        raise InvalidSpecError(f"Transition matrix must be 2x2, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise InvalidSpecError("Transition matrix contains non-finite entries")
    if np.any(P <= 0):
        raise InvalidSpecError("Transition matrix entries must be strictly positive")
    if np.any(np.abs(P.sum(axis=1) - 1.0) > ROW_SUM_TOLERANCE):
        raise InvalidSpecError(
            f"Transition matrix rows must sum to 1, got {P.sum(axis=1).tolist()}"
        )
    return P


class HmmSpec(BaseModel):
    """Two-state hidden Markov error process.

    `transition[i][j]` is the probability of moving from mode i to mode j, the modes being
    ordered as `LatentMode`.
    """

    model_config = ConfigDict(frozen=True)

    transition: tuple[tuple[float, float], tuple[float, float]]
    emission_L: Emission
    emission_H: Emission

    @field_validator("transition")
    @classmethod
    def _check_transition(cls, value):
        validate_transition(value)
        return value

    @model_validator(mode="after")
    def _check_mode_order(self) -> HmmSpec:
        if self.emission_L.mean > self.emission_H.mean:
            raise InvalidSpecError(
                f"Mode L must carry the smaller mean error, got {self.emission_L.mean} > {self.emission_H.mean}"
            )
        return self

    @classmethod
    def symmetric(cls, p: float, emission_L: Emission, emission_H: Emission) -> HmmSpec:
        """Spec with equal switching probability `p` in both directions."""
        return cls(
            transition=((1.0 - p, p), (p, 1.0 - p)),
            emission_L=emission_L,
            emission_H=emission_H,
        )

    @classmethod
    def from_matrix(
        cls, P: np.ndarray, emission_L: Emission, emission_H: Emission
    ) -> HmmSpec:
        P = validate_transition(P)
        return cls(
            transition=tuple(tuple(float(x) for x in row) for row in P),
            emission_L=emission_L,
            emission_H=emission_H,
        )

    @property
    def P(self) -> np.ndarray:
        return np.asarray(self.transition, dtype=float)

    @property
    def emissions(self) -> tuple[Emission, Emission]:
        return self.emission_L, self.emission_H

    def emission(self, mode: LatentMode | int) -> Emission:
        return self.emissions[int(mode)]

    @property
    def is_gaussian(self) -> bool:
        return all(isinstance(e, Gaussian) for e in self.emissions)

    def with_transition(self, P: np.ndarray) -> HmmSpec:
        return HmmSpec.from_matrix(P, self.emission_L, self.emission_H)

    def with_emissions(self, emission_L: Emission, emission_H: Emission) -> HmmSpec:
        return HmmSpec(
            transition=self.transition, emission_L=emission_L, emission_H=emission_H
        )

    def to_json(self) -> str:
        return self.model_dump_json()

    @classmethod
    def from_json(cls, data: str | bytes) -> HmmSpec:
        return cls.model_validate_json(data)

    def save(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.model_dump(mode="json"), f, indent=2)

    @classmethod
    def load(cls, path) -> HmmSpec:
        with open(path, "r") as f:
            return cls.model_validate(json.load(f))


@dataclass(frozen=True)
class ErrorPath:
    """A simulated error stream together with the latent modes that generated it."""

    modes: np.ndarray
    errors: np.ndarray
    seed: int
    changepoint: int | None = field(default=None)

    def __post_init__(self):
        if len(self.modes) != len(self.errors):
            raise LengthMismatchError(
                f"modes and errors differ in length: {len(self.modes)} != {len(self.errors)}"
            )

    def __len__(self) -> int:
        return len(self.errors)

    def mode_sequence(self) -> list[LatentMode]:
        return [LatentMode(int(z)) for z in self.modes]
