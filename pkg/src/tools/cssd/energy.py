"""
Smoothing-spline energies by incremental QR updates.

The minimum energy of a cubic smoothing spline on the sites l..r is the
residual of a banded least-squares problem in the Hermite unknowns
(f_i, f'_i). Appending a site adds three rows and two columns to that
problem; because the factor is upper triangular, only a 5 x 4 subsystem (plus
one right-hand-side column per data dimension) has to be rotated, so every
appended site costs O(1).

The engine keeps only the trailing 2 x 2 factor block, the matching reduced
right-hand sides and the accumulated residual squares.
"""

import math
from typing import Iterator, List, NamedTuple, Sequence, Tuple

import numpy as np

from src.entity.series_entity import DataSeries
from src.utils.exceptions import (
    DimensionMismatch,
    InvalidIndex,
    InvalidP,
    NonIncreasingX,
    NonPositiveDelta,
    NonPositiveGap,
)

SQRT3 = math.sqrt(3.0)

FORWARD = "forward"
REVERSE = "reverse"


def local_roughness_factor(d: float) -> np.ndarray:
    """
    Factor U (2 x 4) of the roughness quadratic form of one cubic piece.

    For a piece of width d with Hermite data v = [f_i, f'_i, f_{i+1}, f'_{i+1}],
    the integral of the squared second derivative equals |U v|^2 = v^T B v.

    Args:
        d: gap width x_{i+1} - x_i

    Returns:
        The 2 x 4 matrix U

    Raises:
        NonPositiveGap: if d <= 0
    """
    if not d > 0:
        raise NonPositiveGap(f"gap width must be positive, got {d}")
    s = 1.0 / math.sqrt(d)
    t = s / d
    return np.array([
        [2.0 * SQRT3 * t, SQRT3 * s, -2.0 * SQRT3 * t, SQRT3 * s],
        [0.0, s, 0.0, -s],
    ])


def roughness_matrix(d: float) -> np.ndarray:
    """The 4 x 4 matrix B of the roughness quadratic form for gap width d."""
    if not d > 0:
        raise NonPositiveGap(f"gap width must be positive, got {d}")
    d2, d3 = d * d, d * d * d
    return np.array([
        [12 / d3, 6 / d2, -12 / d3, 6 / d2],
        [6 / d2, 4 / d, -6 / d2, 2 / d],
        [-12 / d3, -6 / d2, 12 / d3, -6 / d2],
        [6 / d2, 2 / d, -6 / d2, 4 / d],
    ])


class EnergyState(NamedTuple):
    """
    Immutable state of one energy stream.

    The trailing factor block is [[r00, r01], [0, r11]] acting on the Hermite
    unknowns (f_r, f'_r) of the last absorbed site; z0/z1 are the matching
    reduced right-hand sides (one entry per data dimension). Energies are
    accumulated with Neumaier compensation in ``sums``/``comps``.
    """

    r00: float
    r01: float
    r11: float
    z0: Tuple[float, ...]
    z1: Tuple[float, ...]
    sums: Tuple[float, ...]
    comps: Tuple[float, ...]
    count: int
    sqrt_p: float
    beta: float
    last_x: float

    @property
    def energies(self) -> np.ndarray:
        """Accumulated residual squares E_{l:r}, one per data dimension."""
        return np.array([s + c for s, c in zip(self.sums, self.comps)])

    @property
    def total_energy(self) -> float:
        """Energy summed over all data dimensions."""
        return math.fsum(self.sums) + math.fsum(self.comps)


def _check_p(p: float) -> None:
    if not (0.0 < p < 1.0):
        raise InvalidP(f"p must lie in (0, 1), got {p}")


def engine_init(x1: float, y1: Sequence[float], delta1: float, p: float) -> EnergyState:
    """
    Start an energy stream at a single site.

    Args:
        x1: abscissa of the first site
        y1: observation vector (length D)
        delta1: standard-deviation estimate of the site
        p: smoothing weight in (0, 1)

    Returns:
        State whose factor holds only the data row alpha_1 * e_1^T
    """
    _check_p(p)
    if not delta1 > 0:
        raise NonPositiveDelta(f"delta must be positive, got {delta1}")
    sqrt_p = math.sqrt(p)
    alpha = sqrt_p / delta1
    ys = tuple(float(v) for v in np.atleast_1d(y1))
    zeros = (0.0,) * len(ys)
    return EnergyState(
        r00=alpha, r01=0.0, r11=0.0,
        z0=tuple(alpha * v for v in ys), z1=zeros,
        sums=zeros, comps=zeros,
        count=1, sqrt_p=sqrt_p, beta=math.sqrt(1.0 - p), last_x=float(x1),
    )


def _rotate(ri: List[float], rj: List[float], col: int) -> None:
    """Givens rotation of rows ri, rj that zeroes rj[col]."""
    b = rj[col]
    if b == 0.0:
        return
    a = ri[col]
    h = math.hypot(a, b)
    c = a / h
    s = b / h
    for k in range(col, len(ri)):
        u = ri[k]
        v = rj[k]
        ri[k] = c * u + s * v
        rj[k] = c * v - s * u
    rj[col] = 0.0


def absorb_site(state: EnergyState, x: float, ys: Sequence[float], alpha: float):
    """
    Append one site (no validation).

    Returns:
        (new state, finalized factor row 0, finalized factor row 1); the two
        rows act on (f_prev, f'_prev, f_new, f'_new | rhs) and are only needed
        for recovering the minimizing spline.
    """
    d = x - state.last_x
    beta = state.beta
    s = 1.0 / math.sqrt(d)
    bu = beta * 2.0 * SQRT3 * s / d
    bv = beta * SQRT3 * s
    bw = beta * s
    dim = len(ys)
    zeros = [0.0] * dim

    row0 = [state.r00, state.r01, 0.0, 0.0, *state.z0]
    row1 = [0.0, state.r11, 0.0, 0.0, *state.z1]
    row2 = [bu, bv, -bu, bv, *zeros]
    row3 = [0.0, bw, 0.0, -bw, *zeros]
    row4 = [0.0, 0.0, alpha, 0.0, *(alpha * v for v in ys)]

    _rotate(row0, row2, 0)
    _rotate(row1, row2, 1)
    _rotate(row1, row3, 1)
    _rotate(row2, row3, 2)
    _rotate(row2, row4, 2)
    _rotate(row3, row4, 3)

    sums = list(state.sums)
    comps = list(state.comps)
    for k in range(dim):
        value = row4[4 + k] * row4[4 + k]
        total = sums[k]
        t = total + value
        if abs(total) >= value:
            comps[k] += (total - t) + value
        else:
            comps[k] += (value - t) + total
        sums[k] = t

    new_state = EnergyState(
        r00=row2[2], r01=row2[3], r11=row3[3],
        z0=tuple(row2[4:]), z1=tuple(row3[4:]),
        sums=tuple(sums), comps=tuple(comps),
        count=state.count + 1, sqrt_p=state.sqrt_p, beta=beta, last_x=x,
    )
    return new_state, row0, row1


def engine_push(state: EnergyState, x: float, y: Sequence[float], delta: float) -> EnergyState:
    """
    Absorb one more site into an energy stream in constant time.

    Args:
        state: current stream state
        x: abscissa, strictly greater than ``state.last_x``
        y: observation vector (length D)
        delta: standard-deviation estimate of the site

    Returns:
        New state; its energies are the old ones plus the squared residual
        entry of the rotated subsystem

    Raises:
        NonIncreasingX: if x <= state.last_x
        NonPositiveDelta: if delta <= 0
        DimensionMismatch: if y has the wrong length
    """
    if not x > state.last_x:
        raise NonIncreasingX(f"x={x} does not exceed the last site {state.last_x}")
    if not delta > 0:
        raise NonPositiveDelta(f"delta must be positive, got {delta}")
    ys = tuple(float(v) for v in np.atleast_1d(y))
    if len(ys) != len(state.sums):
        raise DimensionMismatch(f"expected {len(state.sums)} components, got {len(ys)}")
    return absorb_site(state, float(x), ys, state.sqrt_p / delta)[0]


class OrientedSites(NamedTuple):
    """Sites of one stream as plain floats, already in absorption order."""

    xs: List[float]
    ys: List[Tuple[float, ...]]
    alphas: List[float]


def oriented_sites(series: DataSeries, p: float) -> Tuple[OrientedSites, OrientedSites]:
    """
    Plain-float copies of a series for forward and reverse streams.

    The reverse copy lists the sites from right to left with negated abscissae,
    so every stream sees increasing x and unchanged gap widths.
    """
    _check_p(p)
    sqrt_p = math.sqrt(p)
    xs = [float(v) for v in series.xs]
    ys = [tuple(float(v) for v in row) for row in series.ys]
    alphas = [sqrt_p / float(v) for v in series.deltas]
    forward = OrientedSites(xs, ys, alphas)
    reverse = OrientedSites([-v for v in reversed(xs)], ys[::-1], alphas[::-1])
    return forward, reverse


def initial_state(sites: OrientedSites, i: int, sqrt_p: float, beta: float) -> EnergyState:
    alpha = sites.alphas[i]
    zeros = (0.0,) * len(sites.ys[i])
    return EnergyState(
        r00=alpha, r01=0.0, r11=0.0,
        z0=tuple(alpha * v for v in sites.ys[i]), z1=zeros,
        sums=zeros, comps=zeros,
        count=1, sqrt_p=sqrt_p, beta=beta, last_x=sites.xs[i],
    )


def stream_states(sites: OrientedSites, first: int, p: float) -> Iterator[EnergyState]:
    """
    Lazily yield the states after absorbing sites first, first+1, ... (0-based).
    """
    sqrt_p = math.sqrt(p)
    beta = math.sqrt(1.0 - p)
    state = initial_state(sites, first, sqrt_p, beta)
    yield state
    xs, ys, alphas = sites
    for i in range(first + 1, len(xs)):
        state = absorb_site(state, xs[i], ys[i], alphas[i])[0]
        yield state


def prefix_energies(series: DataSeries, start: int, direction: str, p: float) -> Iterator[np.ndarray]:
    """
    Stream the energies of growing intervals anchored at ``start``.

    Args:
        series: data series
        start: 1-based anchor index
        direction: "forward" yields E_{start:start}, E_{start:start+1}, ...;
            "reverse" yields E_{start:start}, E_{start-1:start}, ...
        p: smoothing weight in (0, 1)

    Yields:
        Energy vectors of length D
    """
    if not 1 <= start <= series.n:
        raise InvalidIndex(f"start must lie in [1, {series.n}], got {start}")
    if direction not in (FORWARD, REVERSE):
        raise ValueError(f"direction must be '{FORWARD}' or '{REVERSE}', got {direction!r}")
    forward, reverse = oriented_sites(series, p)
    if direction == FORWARD:
        states = stream_states(forward, start - 1, p)
    else:
        states = stream_states(reverse, series.n - start, p)
    for state in states:
        yield state.energies


class BandedFactor(NamedTuple):
    """
    Retained factor of the full banded least-squares system of one segment.

    rows[k] holds the two finalized rows for the unknowns of site k (0-based
    within the segment); ``tail`` is the state after the last site.
    """

    rows: List[Tuple[List[float], List[float]]]
    tail: EnergyState


def banded_factor(series: DataSeries, l: int, r: int, p: float) -> BandedFactor:
    """
    Factor the least-squares system of the sites l..r (1-based, inclusive),
    keeping every finalized row for back-substitution.
    """
    if not 1 <= l <= r <= series.n:
        raise InvalidIndex(f"need 1 <= l <= r <= {series.n}, got l={l}, r={r}")
    forward, _ = oriented_sites(series, p)
    sqrt_p = math.sqrt(p)
    state = initial_state(forward, l - 1, sqrt_p, math.sqrt(1.0 - p))
    rows = []
    for i in range(l, r):
        state, row0, row1 = absorb_site(state, forward.xs[i], forward.ys[i], forward.alphas[i])
        rows.append((row0, row1))
    return BandedFactor(rows=rows, tail=state)
