"""
JSON report models written by the command line.
"""

from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from src.entity.solution_entity import CssdSolution, SegmentSpline

SCHEMA_VERSION = 1


class ParamsReport(BaseModel):
    p: float
    gamma: Union[float, str]  # "inf" for INFINITE


class DiscontinuityReport(BaseModel):
    gap_index: int
    location: float


class PieceReport(BaseModel):
    """Cubic piece c0 + c1 h + c2 h^2 + c3 h^3 with h = x - x0; coeffs[k] lists c_k per dimension."""
    x0: float
    coeffs: List[List[float]]


class SegmentReport(BaseModel):
    domain: List[float]
    knots: List[float]
    values: List[List[float]]
    derivs: List[List[float]]
    pieces: List[PieceReport]
    energy: float

    @classmethod
    def from_segment(cls, segment: SegmentSpline, energy: float, pieces) -> "SegmentReport":
        return cls(
            domain=[float(segment.domain[0]), float(segment.domain[1])],
            knots=segment.knots.tolist(),
            values=segment.values.tolist(),
            derivs=segment.derivs.tolist(),
            pieces=[PieceReport(x0=x0, coeffs=coeffs.tolist()) for x0, coeffs in pieces],
            energy=float(energy),
        )


class SolutionReport(BaseModel):
    """Versioned result of ``fit`` (and base of the ``auto`` result)."""

    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=SCHEMA_VERSION, alias="schema")
    params: ParamsReport
    objective: float
    discontinuities: List[DiscontinuityReport]
    segments: List[SegmentReport]

    @classmethod
    def from_solution(cls, solution: CssdSolution, piece_coefficients, **extra) -> "SolutionReport":
        """
        Build the report of a solution.

        Args:
            solution: solved CSSD
            piece_coefficients: function returning the (x0, coeffs) records of a segment
            **extra: additional fields of subclasses
        """
        jumps = solution.discontinuities
        return cls(
            params=ParamsReport(**solution.params.as_dict()),
            objective=float(solution.objective),
            discontinuities=[
                DiscontinuityReport(gap_index=gap, location=location)
                for gap, location in zip(jumps.gaps, jumps.locations)
            ],
            segments=[
                SegmentReport.from_segment(segment, energy, piece_coefficients(segment))
                for segment, energy in zip(solution.segments, solution.segment_energies)
            ],
            **extra,
        )

    def to_json_dict(self) -> dict:
        return self.model_dump(by_alias=True)


class AutoReport(SolutionReport):
    """Result of ``auto``: the fit plus the cross-validation details."""

    cv_score: float
    folds: int
    seed: int
    evaluations_used: int
    restarts: Optional[int] = None
