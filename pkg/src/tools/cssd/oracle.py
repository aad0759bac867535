"""
Brute-force reference computations for checking the fast solver.

Nothing here is on the hot path: the energies are obtained from the fully
materialized least-squares system and the partition problem is solved by
enumerating every subset of gaps.
"""

import itertools
import math
from typing import Dict, List, Tuple, Union

import numpy as np
from scipy import linalg

from src.entity.series_entity import INFINITE, DataSeries, GammaSentinel
from src.entity.solution_entity import DiscontinuitySet
from src.tools.cssd.energy import local_roughness_factor
from src.utils.exceptions import InvalidGamma, InvalidIndex, InvalidP, OracleFailure, TooLargeForOracle

MAX_ORACLE_SITES = 20
TIE_ATOL = 1e-12


def dense_system(series: DataSeries, l: int, r: int, p: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Full least-squares system of the sites l..r (1-based, inclusive).

    The unknowns are ordered (f_l, f'_l, f_{l+1}, f'_{l+1}, ...). Each site
    contributes the data row alpha_i e_{2i-1} and each gap the two rows of
    sqrt(1 - p) U_i.

    Returns:
        (A, b) with A of shape (3m - 2, 2m) and b of shape (3m - 2, D)
    """
    if not 0.0 < p < 1.0:
        raise InvalidP(f"p must lie in (0, 1), got {p}")
    if not 1 <= l <= r <= series.n:
        raise InvalidIndex(f"need 1 <= l <= r <= {series.n}, got l={l}, r={r}")
    m = r - l + 1
    xs = series.xs[l - 1:r]
    ys = series.ys[l - 1:r]
    alphas = math.sqrt(p) / series.deltas[l - 1:r]
    beta = math.sqrt(1.0 - p)

    A = np.zeros((3 * m - 2, 2 * m))
    b = np.zeros((3 * m - 2, series.dim))
    for i in range(m):
        A[i, 2 * i] = alphas[i]
        b[i] = alphas[i] * ys[i]
    for i in range(m - 1):
        row = m + 2 * i
        A[row:row + 2, 2 * i:2 * i + 4] = beta * local_roughness_factor(float(xs[i + 1] - xs[i]))
    return A, b


def dense_energy(series: DataSeries, l: int, r: int, p: float) -> np.ndarray:
    """
    Energy E_{l:r} per data dimension from a dense least-squares solve.

    Raises:
        OracleFailure: if the dense solve fails or returns non-finite values
    """
    A, b = dense_system(series, l, r, p)
    if r - l <= 1:
        return np.zeros(series.dim)
    try:
        u, _, _, _ = linalg.lstsq(A, b)
    except (linalg.LinAlgError, ValueError) as exc:
        raise OracleFailure(f"dense solve failed on sites {l}..{r}: {exc}") from exc
    residual = A @ u - b
    energy = np.sum(residual**2, axis=0)
    if not np.all(np.isfinite(energy)):
        raise OracleFailure(f"non-finite energy on sites {l}..{r}")
    return energy


def _induced_intervals(gaps: Tuple[int, ...], n: int) -> List[Tuple[int, int]]:
    bounds = [0, *gaps, n]
    return [(lo + 1, hi) for lo, hi in zip(bounds, bounds[1:])]


def brute_force_solve(
    series: DataSeries, p: float, gamma: Union[float, GammaSentinel]
) -> Tuple[float, List[DiscontinuitySet]]:
    """
    Solve the partition problem by enumerating all subsets of gaps.

    Args:
        series: data series with at most 20 sites
        p: smoothing weight in (0, 1)
        gamma: positive jump penalty or INFINITE

    Returns:
        (optimal objective, every discontinuity set within min(1e-12, gamma/2)
        of it), the sets in order of increasing size and then lexicographic gaps

    Raises:
        TooLargeForOracle: if N > 20
    """
    n = series.n
    if n > MAX_ORACLE_SITES:
        raise TooLargeForOracle(f"the oracle enumerates 2^(N-1) sets; N={n} exceeds {MAX_ORACLE_SITES}")
    if gamma is INFINITE or (isinstance(gamma, float) and math.isinf(gamma) and gamma > 0):
        penalty = math.inf
    else:
        penalty = float(gamma)
        if not (math.isfinite(penalty) and penalty > 0):
            raise InvalidGamma(f"gamma must be positive or INFINITE, got {gamma}")

    energies: Dict[Tuple[int, int], float] = {}

    def energy(l: int, r: int) -> float:
        if (l, r) not in energies:
            energies[(l, r)] = math.fsum(dense_energy(series, l, r, p))
        return energies[(l, r)]

    scored: List[Tuple[float, Tuple[int, ...]]] = []
    max_size = 0 if math.isinf(penalty) else n - 1
    for size in range(max_size + 1):
        for gaps in itertools.combinations(range(1, n), size):
            total = math.fsum(energy(l, r) for l, r in _induced_intervals(gaps, n))
            scored.append((total + (penalty * size if size else 0.0), gaps))

    best = min(value for value, _ in scored)
    # sets above the size bound sit at least one gamma above the optimum
    tolerance = min(TIE_ATOL, 0.5 * penalty)
    optimal = [
        DiscontinuitySet.from_gaps(gaps, series.xs)
        for value, gaps in scored
        if value - best <= tolerance
    ]
    return best, optimal
