"""
Minimizing spline of one discrete interval, its evaluation and export.

The spline is recovered from the same banded factorization the energy engine
uses: the finalized factor rows are retained while the sites are absorbed and
the Hermite unknowns are obtained by block back-substitution, O(m) for m sites.
"""

from typing import List, Sequence, Tuple, Union

import numpy as np

from src.entity.series_entity import DataSeries
from src.entity.solution_entity import SegmentSpline
from src.tools.cssd.energy import banded_factor, roughness_matrix
from src.utils.exceptions import InvalidIndex, OutOfDomain, SingularFactor


def fit_segment_energy(
    series: DataSeries, l: int, r: int, p: float, domain: Tuple[float, float]
) -> Tuple[SegmentSpline, np.ndarray]:
    """
    Fit the smoothing spline on the sites l..r and report its energy.

    Returns:
        (spline, per-dimension energies E_{l:r})
    """
    if not 1 <= l <= r <= series.n:
        raise InvalidIndex(f"need 1 <= l <= r <= {series.n}, got l={l}, r={r}")
    knots = series.xs[l - 1:r]
    a, b = float(domain[0]), float(domain[1])
    if not (a <= knots[0] and knots[-1] <= b):
        raise OutOfDomain(f"domain [{a}, {b}] does not contain the sites {knots[0]}..{knots[-1]}")

    m = r - l + 1
    dim = series.dim
    if m == 1:
        spline = SegmentSpline(
            knots=knots, values=series.ys[l - 1:r], derivs=np.zeros((1, dim)), domain=(a, b)
        )
        return spline, np.zeros(dim)

    factor = banded_factor(series, l, r, p)
    tail = factor.tail
    if tail.r00 == 0.0 or tail.r11 == 0.0:
        raise SingularFactor(f"singular trailing block on sites {l}..{r}")

    values = np.empty((m, dim))
    derivs = np.empty((m, dim))
    derivs[-1] = np.array(tail.z1) / tail.r11
    values[-1] = (np.array(tail.z0) - tail.r01 * derivs[-1]) / tail.r00

    for k in range(m - 2, -1, -1):
        row0, row1 = factor.rows[k]
        f_next, d_next = values[k + 1], derivs[k + 1]
        if row0[0] == 0.0 or row1[1] == 0.0:
            raise SingularFactor(f"singular factor row at site {l + k}")
        derivs[k] = (np.array(row1[4:]) - row1[2] * f_next - row1[3] * d_next) / row1[1]
        values[k] = (
            np.array(row0[4:]) - row0[1] * derivs[k] - row0[2] * f_next - row0[3] * d_next
        ) / row0[0]

    spline = SegmentSpline(knots=knots, values=values, derivs=derivs, domain=(a, b))
    return spline, tail.energies


def fit_segment(
    series: DataSeries, l: int, r: int, p: float, domain: Tuple[float, float]
) -> SegmentSpline:
    """
    Minimizing cubic smoothing spline on the sites l..r (1-based, inclusive).

    Args:
        series: data series
        l: first site of the segment
        r: last site of the segment
        p: smoothing weight in (0, 1)
        domain: interval [a, b] containing x_l..x_r

    Returns:
        Hermite control points (values and first derivatives) at x_l..x_r
    """
    return fit_segment_energy(series, l, r, p, domain)[0]


def piece_coefficients(s: SegmentSpline) -> List[Tuple[float, np.ndarray]]:
    """
    Local polynomial coefficients of every cubic piece.

    Each record is (x0, C) with C of shape (4, D) such that the piece equals
    C[0] + C[1] h + C[2] h^2 + C[3] h^3 for h = x - x0. A single-knot segment
    yields one record describing its constant (or linear) extension.
    """
    knots, f, df = s.knots, s.values, s.derivs
    if knots.shape[0] == 1:
        coeffs = np.zeros((4, s.dim))
        coeffs[0], coeffs[1] = f[0], df[0]
        return [(float(knots[0]), coeffs)]

    d = np.diff(knots)[:, None]
    df_left, df_right = df[:-1], df[1:]
    jump = f[1:] - f[:-1]
    c2 = -(df_right + 2.0 * df_left) / d + 3.0 * jump / d**2
    c3 = (df_right + df_left) / d**2 - 2.0 * jump / d**3
    return [
        (float(knots[i]), np.array([f[i], df[i], c2[i], c3[i]]))
        for i in range(knots.shape[0] - 1)
    ]


def evaluate_unchecked(s: SegmentSpline, ts: np.ndarray) -> np.ndarray:
    """
    Evaluate at any abscissae, using the linear extensions beyond the knots.

    Returns:
        Array of shape (len(ts), D)
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    knots, f, df = s.knots, s.values, s.derivs
    out = np.empty((ts.shape[0], s.dim))

    left = ts < knots[0]
    right = ts >= knots[-1]
    inside = ~(left | right)

    out[left] = f[0] + (ts[left] - knots[0])[:, None] * df[0]
    out[right] = f[-1] + (ts[right] - knots[-1])[:, None] * df[-1]
    if np.any(inside):
        coeffs = np.array([c for _, c in piece_coefficients(s)])
        idx = np.clip(np.searchsorted(knots, ts[inside], side="right") - 1, 0, knots.shape[0] - 2)
        h = (ts[inside] - knots[idx])[:, None]
        c = coeffs[idx]
        out[inside] = c[:, 0] + h * (c[:, 1] + h * (c[:, 2] + h * c[:, 3]))
    return out


def eval_spline(s: SegmentSpline, t: Union[float, Sequence[float]]) -> np.ndarray:
    """
    Evaluate a segment spline inside its domain.

    Args:
        s: segment spline
        t: abscissa or array of abscissae within ``s.domain``

    Returns:
        D-vector for a scalar t, otherwise an array of shape (len(t), D)

    Raises:
        OutOfDomain: if any t lies outside the domain
    """
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    a, b = s.domain
    if np.any((ts < a) | (ts > b)):
        raise OutOfDomain(f"evaluation outside the segment domain [{a}, {b}]")
    out = evaluate_unchecked(s, ts)
    return out[0] if np.ndim(t) == 0 else out


def roughness(s: SegmentSpline) -> np.ndarray:
    """Exact integral of the squared second derivative, per dimension."""
    total = np.zeros(s.dim)
    for i in range(s.knots.shape[0] - 1):
        B = roughness_matrix(float(s.knots[i + 1] - s.knots[i]))
        v = np.array([s.values[i], s.derivs[i], s.values[i + 1], s.derivs[i + 1]])
        total += np.einsum("ij,ik,kj->j", v, B, v)
    return total


def spline_functional(s: SegmentSpline, ys: np.ndarray, deltas: np.ndarray, p: float) -> np.ndarray:
    """
    Smoothing-spline functional of a segment spline on its own knots.

    p * sum(((y_i - f(x_i)) / delta_i)^2) + (1 - p) * integral(f''^2), per dimension.

    Args:
        s: segment spline whose knots are the data sites of ys/deltas
        ys: observations at the knots, shape (m, D)
        deltas: standard-deviation estimates at the knots
        p: smoothing weight

    Returns:
        Functional value per data dimension
    """
    ys = np.asarray(ys, dtype=float).reshape(s.values.shape)
    residual = (ys - s.values) / np.asarray(deltas, dtype=float)[:, None]
    return p * np.sum(residual**2, axis=0) + (1.0 - p) * roughness(s)
