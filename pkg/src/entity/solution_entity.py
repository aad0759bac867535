"""
Result-side domain types: discontinuity sets, fitted segment splines and
complete CSSD solutions.
"""

import math
from typing import Any, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from src.entity.series_entity import Hyperparams, frozen_array

OBJECTIVE_RTOL = 1e-10


def max_discontinuities(n: int) -> int:
    """Upper bound ceil(N/2) - 1 on the size of an optimal discontinuity set."""
    return max(math.ceil(n / 2) - 1, 0)


class DiscontinuitySet(BaseModel):
    """
    Discontinuities of a solution, one per straddled gap.

    Attributes:
        gaps: strictly increasing 1-based gap numbers; gap i lies between
            the i-th and (i+1)-th site
        locations: midpoints (x_i + x_{i+1}) / 2 of those gaps
        n_sites: number of sites N of the series the gaps refer to
    """

    model_config = ConfigDict(frozen=True)

    gaps: Tuple[int, ...]
    locations: Tuple[float, ...]
    n_sites: int

    @model_validator(mode="after")
    def _check_invariants(self) -> "DiscontinuitySet":
        if len(self.gaps) != len(self.locations):
            raise ValueError("gaps and locations differ in length")
        if any(b <= a for a, b in zip(self.gaps, self.gaps[1:])):
            raise ValueError("gap indices must be distinct and increasing")
        if self.gaps and (self.gaps[0] < 1 or self.gaps[-1] > self.n_sites - 1):
            raise ValueError(f"gap indices must lie in [1, {self.n_sites - 1}]")
        if len(self.gaps) > max_discontinuities(self.n_sites):
            raise ValueError(
                f"{len(self.gaps)} discontinuities exceed the bound "
                f"{max_discontinuities(self.n_sites)} for N={self.n_sites}"
            )
        return self

    @classmethod
    def from_gaps(cls, gaps: Sequence[int], xs: np.ndarray) -> "DiscontinuitySet":
        """Build the set for 1-based gap numbers on the sites xs."""
        ordered = tuple(sorted(int(g) for g in gaps))
        if ordered and (ordered[0] < 1 or ordered[-1] > len(xs) - 1):
            raise ValueError(f"gap indices must lie in [1, {len(xs) - 1}]")
        locations = tuple(float((xs[g - 1] + xs[g]) / 2) for g in ordered)
        return cls(gaps=ordered, locations=locations, n_sites=len(xs))

    @classmethod
    def empty(cls, n_sites: int) -> "DiscontinuitySet":
        return cls(gaps=(), locations=(), n_sites=n_sites)

    def __len__(self) -> int:
        return len(self.gaps)

    def intervals(self) -> List[Tuple[int, int]]:
        """Induced partition as 1-based inclusive index ranges (l, r)."""
        bounds = [0, *self.gaps, self.n_sites]
        return [(lo + 1, hi) for lo, hi in zip(bounds, bounds[1:])]

    @classmethod
    def from_intervals(cls, intervals: Sequence[Tuple[int, int]], xs: np.ndarray) -> "DiscontinuitySet":
        """Recover the set from the 1-based index ranges of a partition."""
        return cls.from_gaps([l - 1 for l, _ in intervals[1:]], xs)


class SegmentSpline(BaseModel):
    """
    One continuous cubic smoothing spline piece in Hermite form.

    Attributes:
        knots: data sites of this segment (strictly increasing)
        values: fitted values f_i, one column per data dimension
        derivs: fitted first derivatives f'_i
        domain: interval [a, b] covered by the segment
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    knots: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    domain: Tuple[float, float]

    @field_validator("knots", mode="before")
    @classmethod
    def _as_vector(cls, value: Any) -> np.ndarray:
        return frozen_array(value, ndim=1)

    @field_validator("values", "derivs", mode="before")
    @classmethod
    def _as_matrix(cls, value: Any) -> np.ndarray:
        return frozen_array(value, ndim=2)

    @model_validator(mode="after")
    def _check_invariants(self) -> "SegmentSpline":
        m = self.knots.shape[0]
        if m == 0:
            raise ValueError("a segment needs at least one knot")
        if self.values.shape != self.derivs.shape or self.values.shape[0] != m:
            raise ValueError("values and derivs must have one row per knot")
        if m > 1 and np.any(np.diff(self.knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        a, b = self.domain
        if not (a <= self.knots[0] and self.knots[-1] <= b):
            raise ValueError(f"knots [{self.knots[0]}, {self.knots[-1]}] leave domain [{a}, {b}]")
        return self

    @property
    def dim(self) -> int:
        return int(self.values.shape[1])


class CssdSolution(BaseModel):
    """
    A global minimizer of the jump-penalized smoothing-spline functional.

    Attributes:
        discontinuities: optimal discontinuity set
        segments: one fitted spline per interval of the induced partition
        segment_energies: spline energy E_I of each segment (summed over dimensions)
        objective: sum of segment energies plus gamma per discontinuity
        params: the hyperparameters used
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    discontinuities: DiscontinuitySet
    segments: Tuple[SegmentSpline, ...]
    segment_energies: Tuple[float, ...]
    objective: float
    params: Hyperparams

    @model_validator(mode="after")
    def _check_invariants(self) -> "CssdSolution":
        k = len(self.discontinuities)
        if len(self.segments) != k + 1 or len(self.segment_energies) != k + 1:
            raise ValueError("a solution has exactly one segment more than discontinuities")
        if self.params.is_infinite and k:
            raise ValueError("gamma = INFINITE admits no discontinuities")
        bounds = list(self.discontinuities.locations)
        for segment, start, end in zip(self.segments, [None, *bounds], [*bounds, None]):
            if start is not None and segment.domain[0] != start:
                raise ValueError("segment domains must start at the discontinuity locations")
            if end is not None and segment.domain[1] != end:
                raise ValueError("segment domains must end at the discontinuity locations")
        penalty = 0.0 if self.params.is_infinite else self.params.gamma_value * k
        expected = math.fsum(self.segment_energies) + penalty
        if abs(self.objective - expected) > OBJECTIVE_RTOL * max(abs(expected), 1.0):
            raise ValueError(f"objective {self.objective} != energies + penalty {expected}")
        return self

    @property
    def domain(self) -> Tuple[float, float]:
        return self.segments[0].domain[0], self.segments[-1].domain[1]
