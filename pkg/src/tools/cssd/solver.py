"""
Global minimization of the jump-penalized smoothing-spline functional.

Discontinuities are searched among the gap midpoints only, which turns the
problem into an optimal-partitioning problem over the sites. It is solved by
dynamic programming over the right end r of the data prefix:

    F*_r = min{ E_{1:r} ; min_{l = r-1, ..., 2} E_{l:r} + gamma + F*_{l-1} }

The energies E_{1:r} come from one forward stream; for every r the energies
E_{l:r}, l = r-1, r-2, ..., come from a reverse stream anchored at r, which
allows breaking the l-loop as soon as E_{l:r} + gamma exceeds the running
minimum (E_{l:r} never decreases as l moves left).
"""

import math
from collections import deque
from dataclasses import dataclass
from itertools import islice
from typing import List, Tuple

import numpy as np

from src.entity.series_entity import DataSeries, Hyperparams
from src.entity.solution_entity import CssdSolution, DiscontinuitySet, SegmentSpline
from src.logs.logger_config import get_tool_logger
from src.tools.cssd.energy import FORWARD, absorb_site, initial_state, oriented_sites, prefix_energies, stream_states
from src.tools.cssd.segment_fit import evaluate_unchecked, fit_segment_energy, spline_functional
from src.utils.exceptions import CorruptTraceback, InvalidGamma

logger = get_tool_logger("CssdSolver")

AUDIT_RTOL = 1e-8


@dataclass
class DpTables:
    """
    Bellman tables of one solve.

    Attributes:
        fstar: F*_0..F*_N with F*_0 = -gamma (index = number of sites)
        z: traceback; z[r] is the minimizing left boundary l for prefix r
            (z[0] is unused and 0)
        pushes: number of energy updates spent in the reverse streams
    """

    fstar: np.ndarray
    z: np.ndarray
    pushes: int = 0

    @property
    def n(self) -> int:
        return int(self.fstar.shape[0] - 1)


def solve_partition(series: DataSeries, p: float, gamma: float, prune: bool = True) -> DpTables:
    """
    Bellman recursion for the optimal partition of the sites.

    Args:
        series: data series
        p: smoothing weight in (0, 1)
        gamma: finite positive jump penalty
        prune: break the inner loop once E_{l:r} + gamma exceeds the running minimum

    Returns:
        Tables F* and Z. Ties keep the whole-interval candidate l = 1; among
        tied jump candidates the smallest l wins, which gives the largest
        possible right-most interval, then the largest penultimate one.
    """
    if not (isinstance(gamma, (int, float)) and math.isfinite(gamma) and gamma > 0):
        raise InvalidGamma(f"the partition solver needs a finite positive gamma, got {gamma}")
    n = series.n
    forward, reverse = oriented_sites(series, p)
    sqrt_p, beta = math.sqrt(p), math.sqrt(1.0 - p)

    whole = [0.0]
    for state in stream_states(forward, 0, p):
        whole.append(sum(state.sums) + sum(state.comps))

    fstar = [0.0] * (n + 1)
    z = [0] * (n + 1)
    fstar[0] = -gamma
    pushes = 0
    rx, ry, ra = reverse

    for r in range(1, n + 1):
        best = whole[r]
        best_l = 1
        if r >= 3:
            # site j (1-based) sits at position n - j of the reverse orientation
            state = initial_state(reverse, n - r, sqrt_p, beta)
            for l in range(r - 1, 1, -1):
                i = n - l
                state = absorb_site(state, rx[i], ry[i], ra[i])[0]
                pushes += 1
                energy = sum(state.sums) + sum(state.comps)
                candidate = energy + gamma + fstar[l - 1]
                if candidate < best or (candidate == best and best_l != 1):
                    best = candidate
                    best_l = l
                if prune and energy + gamma > best:
                    break
        fstar[r] = best
        z[r] = best_l

    logger.debug("partition solved", n=n, dim=series.dim, pushes=pushes, prune=prune)
    return DpTables(fstar=np.array(fstar), z=np.array(z, dtype=int), pushes=pushes)


def traceback(tables: DpTables, series: DataSeries) -> DiscontinuitySet:
    """
    Recover the optimal discontinuity set from the traceback table.

    Raises:
        CorruptTraceback: if the walk leaves the valid index range
    """
    if tables.n != series.n:
        raise CorruptTraceback(f"tables cover {tables.n} sites, series has {series.n}")
    gaps: List[int] = []
    r = series.n
    while r > 0:
        l = int(tables.z[r])
        if not 1 <= l <= r:
            raise CorruptTraceback(f"invalid left boundary {l} for prefix {r}")
        if l > 1:
            gaps.append(l - 1)
        r = l - 1
    return DiscontinuitySet.from_gaps(gaps, series.xs)


def _segment_domains(series: DataSeries, jumps: DiscontinuitySet) -> List[Tuple[float, float]]:
    bounds = [float(series.xs[0]), *jumps.locations, float(series.xs[-1])]
    return list(zip(bounds, bounds[1:]))


def solve_cssd(series: DataSeries, params: Hyperparams, prune: bool = True) -> CssdSolution:
    """
    Compute a cubic smoothing spline with discontinuities.

    Args:
        series: data series
        params: smoothing weight and jump penalty (INFINITE gives the classical
            smoothing spline)
        prune: passed to ``solve_partition``

    Returns:
        Optimal discontinuity set, fitted segments, segment energies and objective
    """
    p = params.p
    if params.is_infinite:
        tables = None
        jumps = DiscontinuitySet.empty(series.n)
    else:
        tables = solve_partition(series, p, params.gamma_value, prune=prune)
        jumps = traceback(tables, series)

    segments: List[SegmentSpline] = []
    energies: List[float] = []
    audit: List[float] = []
    for (l, r), domain in zip(jumps.intervals(), _segment_domains(series, jumps)):
        spline, energy = fit_segment_energy(series, l, r, p, domain)
        segments.append(spline)
        energies.append(math.fsum(energy))
        audit.extend(spline_functional(spline, series.ys[l - 1:r], series.deltas[l - 1:r], p))

    penalty = 0.0 if params.is_infinite else params.gamma_value * len(jumps)
    objective = math.fsum(energies) + penalty

    reference = objective if tables is None else float(tables.fstar[-1])
    recomputed = math.fsum(audit) + penalty
    if abs(recomputed - reference) > AUDIT_RTOL * max(abs(reference), 1.0):
        logger.warning("objective audit mismatch", reference=reference, recomputed=recomputed)

    return CssdSolution(
        discontinuities=jumps,
        segments=tuple(segments),
        segment_energies=tuple(energies),
        objective=objective,
        params=params,
    )


def objective(series: DataSeries, jumps: DiscontinuitySet, params: Hyperparams) -> float:
    """
    Independent evaluation of the target functional for a discontinuity set.

    Every induced interval gets a fresh forward energy stream.
    """
    if jumps.n_sites != series.n:
        raise ValueError(f"discontinuity set refers to {jumps.n_sites} sites, series has {series.n}")
    total = []
    for l, r in jumps.intervals():
        stream = prefix_energies(series, l, FORWARD, params.p)
        energy = deque(islice(stream, r - l + 1), maxlen=1)[0]
        total.append(math.fsum(energy))
    if params.is_infinite:
        return math.fsum(total) if not len(jumps) else math.inf
    return math.fsum(total) + params.gamma_value * len(jumps)


def evaluate_solution(solution: CssdSolution, ts) -> np.ndarray:
    """
    Evaluate the piecewise spline anywhere on the real line.

    Inside a segment the Hermite cubic is used; beyond the outermost sites the
    linear extension of the boundary segment; exactly at a discontinuity
    location the mean of the left and right limits.

    Returns:
        Array of shape (len(ts), D)
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    locations = np.array(solution.discontinuities.locations, dtype=float)
    out = np.empty((ts.shape[0], solution.segments[0].dim))

    owner = np.searchsorted(locations, ts, side="left")
    at_jump = np.zeros(ts.shape[0], dtype=bool)
    if locations.size:
        hit = owner < locations.size
        at_jump[hit] = locations[owner[hit]] == ts[hit]

    for k, segment in enumerate(solution.segments):
        mask = (owner == k) & ~at_jump
        if np.any(mask):
            out[mask] = evaluate_unchecked(segment, ts[mask])

    for i in np.flatnonzero(at_jump):
        k = owner[i]
        left = evaluate_unchecked(solution.segments[k], ts[i:i + 1])[0]
        right = evaluate_unchecked(solution.segments[k + 1], ts[i:i + 1])[0]
        out[i] = 0.5 * (left + right)
    return out
