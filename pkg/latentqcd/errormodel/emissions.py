from __future__ import annotations

import math
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import stats


class EmissionBase(BaseModel):
    """Per-mode error distribution.

    Every subclass is a location-scale family and exposes `mean`, `std` and `variance`
    (as fields or properties), `logpdf` and `sample`.
    """

    model_config = ConfigDict(frozen=True)

    def logpdf(self, x: np.ndarray | float) -> np.ndarray:
        raise NotImplementedError("Please implement this method")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError("Please implement this method")

    def shifted(self, delta_mean: float = 0.0, scale_factor: float = 1.0) -> Emission:
        """Returns the same family with the mean moved by `delta_mean` and the spread multiplied by `scale_factor`."""
        raise NotImplementedError("Please implement this method")

    def as_kind(self, kind: str, dof: float = 3.0) -> Emission:
        """Returns a distribution of another family with identical mean and variance.

        Args:
            kind (str): One of "gaussian", "laplace", "student_t".
            dof (float, optional): Degrees of freedom for "student_t". Defaults to 3.

        Returns:
            Emission: The variance matched distribution.
        """
        if kind == "gaussian":
            return Gaussian(mean=self.mean, std=self.std)
        if kind == "laplace":
            return Laplace(location=self.mean, scale=self.std / math.sqrt(2.0))
        if kind == "student_t":
            return StudentT(
                location=self.mean,
                scale=self.std / math.sqrt(dof / (dof - 2.0)),
                dof=dof,
            )
        raise ValueError(f"Unknown emission kind `{kind}`")


class Gaussian(EmissionBase):
    kind: Literal["gaussian"] = "gaussian"
    mean: float
    std: float = Field(gt=0)

    @property
    def variance(self) -> float:
        return self.std**2

    def logpdf(self, x: np.ndarray | float) -> np.ndarray:
        return stats.norm.logpdf(x, loc=self.mean, scale=self.std)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(self.mean, self.std, size=size)

    def shifted(self, delta_mean: float = 0.0, scale_factor: float = 1.0) -> Gaussian:
        return Gaussian(mean=self.mean + delta_mean, std=self.std * scale_factor)


class Laplace(EmissionBase):
    kind: Literal["laplace"] = "laplace"
    location: float
    scale: float = Field(gt=0)

    @property
    def mean(self) -> float:
        return self.location

    @property
    def variance(self) -> float:
        return 2.0 * self.scale**2

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def logpdf(self, x: np.ndarray | float) -> np.ndarray:
        return stats.laplace.logpdf(x, loc=self.location, scale=self.scale)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.laplace(self.location, self.scale, size=size)

    def shifted(self, delta_mean: float = 0.0, scale_factor: float = 1.0) -> Laplace:
        return Laplace(
            location=self.location + delta_mean, scale=self.scale * scale_factor
        )


class StudentT(EmissionBase):
    kind: Literal["student_t"] = "student_t"
    location: float
    scale: float = Field(gt=0)
    # the variance only exists for dof > 2
    dof: float = Field(default=3.0, gt=2)

    @property
    def mean(self) -> float:
        return self.location

    @property
    def variance(self) -> float:
        return self.scale**2 * self.dof / (self.dof - 2.0)

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def logpdf(self, x: np.ndarray | float) -> np.ndarray:
        return stats.t.logpdf(x, df=self.dof, loc=self.location, scale=self.scale)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.location + self.scale * rng.standard_t(self.dof, size=size)

    def shifted(self, delta_mean: float = 0.0, scale_factor: float = 1.0) -> StudentT:
        return StudentT(
            location=self.location + delta_mean,
            scale=self.scale * scale_factor,
            dof=self.dof,
        )


Emission = Annotated[Union[Gaussian, Laplace, StudentT], Field(discriminator="kind")]
