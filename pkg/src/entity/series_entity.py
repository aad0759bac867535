"""
Input-side domain types: sampled data series and model hyperparameters.
"""

import math
from enum import Enum
from typing import Any, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class GammaSentinel(str, Enum):
    """Distinguished jump-penalty values that are not real numbers."""

    INFINITE = "inf"


INFINITE = GammaSentinel.INFINITE


def frozen_array(values: Any, ndim: int) -> np.ndarray:
    array = np.array(values, dtype=float)
    if ndim == 2 and array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {array.shape}")
    if ndim == 2:
        # one contiguous column per data dimension
        array = np.asfortranarray(array)
    array.setflags(write=False)
    return array


class DataSeries(BaseModel):
    """
    Sorted sample sites with vector-valued observations and per-site
    standard-deviation estimates.

    Attributes:
        xs: N strictly increasing sample sites
        ys: N x D observations (a 1-d input is read as D = 1)
        deltas: N positive standard-deviation estimates
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    xs: np.ndarray
    ys: np.ndarray
    deltas: np.ndarray

    @field_validator("xs", "deltas", mode="before")
    @classmethod
    def _as_vector(cls, value: Any) -> np.ndarray:
        return frozen_array(value, ndim=1)

    @field_validator("ys", mode="before")
    @classmethod
    def _as_matrix(cls, value: Any) -> np.ndarray:
        return frozen_array(value, ndim=2)

    @model_validator(mode="after")
    def _check_invariants(self) -> "DataSeries":
        n = self.xs.shape[0]
        if n == 0:
            raise ValueError("a data series needs at least one site")
        if self.ys.shape[0] != n or self.deltas.shape[0] != n:
            raise ValueError(
                f"length mismatch: xs={n}, ys={self.ys.shape[0]}, deltas={self.deltas.shape[0]}"
            )
        if self.ys.shape[1] < 1:
            raise ValueError("observations need at least one dimension")
        for name in ("xs", "ys", "deltas"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} contains NaN or infinite entries")
        if np.any(self.deltas <= 0):
            raise ValueError("deltas must be positive")
        if n > 1 and np.any(np.diff(self.xs) <= 0):
            raise ValueError("xs must be strictly increasing")
        return self

    @property
    def n(self) -> int:
        return int(self.xs.shape[0])

    @property
    def dim(self) -> int:
        return int(self.ys.shape[1])

    def slice(self, l: int, r: int) -> "DataSeries":
        """Sub-series of the sites l..r (1-based, inclusive)."""
        return DataSeries(xs=self.xs[l - 1:r], ys=self.ys[l - 1:r], deltas=self.deltas[l - 1:r])

    def subset(self, indices: np.ndarray) -> "DataSeries":
        """Sub-series at the given 0-based positions (kept in site order)."""
        order = np.sort(np.asarray(indices, dtype=int))
        return DataSeries(xs=self.xs[order], ys=self.ys[order], deltas=self.deltas[order])


class Hyperparams(BaseModel):
    """
    Model parameters: smoothing weight p in (0, 1) and jump penalty gamma.

    gamma is a positive real or ``INFINITE``; the latter forces the classical
    smoothing spline without discontinuities. The strings "inf"/"infinity" and
    float("inf") are read as ``INFINITE``.
    """

    model_config = ConfigDict(frozen=True)

    p: float
    gamma: Union[GammaSentinel, float]

    @field_validator("p")
    @classmethod
    def _open_unit_interval(cls, value: float) -> float:
        if not (0.0 < value < 1.0):
            raise ValueError(f"p must lie in (0, 1), got {value}")
        return value

    @field_validator("gamma", mode="before")
    @classmethod
    def _parse_gamma(cls, value: Any) -> Union[GammaSentinel, float]:
        if isinstance(value, GammaSentinel):
            return value
        if isinstance(value, str) and value.strip().lower() in ("inf", "infinite", "infinity"):
            return INFINITE
        gamma = float(value)
        if math.isinf(gamma) and gamma > 0:
            return INFINITE
        if not (math.isfinite(gamma) and gamma > 0):
            raise ValueError(f"gamma must be positive or INFINITE, got {value}")
        return gamma

    @property
    def is_infinite(self) -> bool:
        return self.gamma is INFINITE

    @property
    def gamma_value(self) -> float:
        """gamma as a float (math.inf for INFINITE)."""
        return math.inf if self.is_infinite else float(self.gamma)

    def as_dict(self) -> dict:
        return {"p": self.p, "gamma": "inf" if self.is_infinite else float(self.gamma)}
