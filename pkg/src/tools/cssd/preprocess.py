"""
Input preparation: validation, sorting, merging of coincident sites and
mesh-ratio diagnostics.
"""

import warnings
from typing import Any, Optional, Sequence

import numpy as np

from src.config.configurations import get_settings
from src.entity.series_entity import DataSeries
from src.logs.logger_config import get_tool_logger
from src.utils.exceptions import (
    DimensionMismatch,
    EmptyInput,
    NonFiniteValue,
    NonPositiveDelta,
    TooFewPoints,
)

logger = get_tool_logger("Preprocess")


class MeshRatioWarning(UserWarning):
    """The ratio of the largest to the smallest gap is above the threshold."""


def validate_and_sort(raw: Sequence[Sequence[Any]]) -> DataSeries:
    """
    Build a DataSeries from raw records.

    Args:
        raw: records (x, y) or (x, y, delta); y is a scalar or a vector and a
            missing or None delta defaults to 1

    Returns:
        Series sorted by x with coincident sites merged

    Raises:
        EmptyInput: no records
        NonFiniteValue: a NaN or infinite entry (index of the record)
        NonPositiveDelta: a delta <= 0 (index of the record)
        DimensionMismatch: records with different y lengths
    """
    if len(raw) == 0:
        raise EmptyInput("no data records")

    xs, ys, deltas = [], [], []
    for index, record in enumerate(raw):
        if len(record) not in (2, 3):
            raise DimensionMismatch(f"expected (x, y) or (x, y, delta), got {len(record)} fields", index)
        x = record[0]
        y = np.atleast_1d(np.asarray(record[1], dtype=float))
        delta = record[2] if len(record) == 3 and record[2] is not None else 1.0
        xs.append(float(x))
        ys.append(y)
        deltas.append(float(delta))

    dim = ys[0].shape[0]
    for index, y in enumerate(ys):
        if y.ndim != 1 or y.shape[0] != dim:
            raise DimensionMismatch(f"expected {dim} components, got shape {y.shape}", index)

    return series_from_arrays(np.array(xs), np.vstack(ys), np.array(deltas))


def series_from_arrays(
    xs: Any, ys: Any, deltas: Optional[Any] = None
) -> DataSeries:
    """
    Array counterpart of ``validate_and_sort``.

    Args:
        xs: N abscissae in any order
        ys: N observations, shape (N,) or (N, D)
        deltas: N standard-deviation estimates (default: all ones)

    Returns:
        Sorted series with coincident sites merged
    """
    xs = np.asarray(xs, dtype=float).reshape(-1)
    ys = np.asarray(ys, dtype=float)
    if ys.ndim == 1:
        ys = ys.reshape(-1, 1)
    deltas = np.ones_like(xs) if deltas is None else np.asarray(deltas, dtype=float).reshape(-1)

    if xs.shape[0] == 0:
        raise EmptyInput("no data records")
    if ys.shape[0] != xs.shape[0] or deltas.shape[0] != xs.shape[0]:
        raise DimensionMismatch(
            f"length mismatch: xs={xs.shape[0]}, ys={ys.shape[0]}, deltas={deltas.shape[0]}"
        )

    bad = ~(np.isfinite(xs) & np.all(np.isfinite(ys), axis=1) & np.isfinite(deltas))
    if np.any(bad):
        raise NonFiniteValue("NaN or infinite entry", int(np.flatnonzero(bad)[0]))
    if np.any(deltas <= 0):
        raise NonPositiveDelta("delta must be positive", int(np.flatnonzero(deltas <= 0)[0]))

    order = np.argsort(xs, kind="stable")
    return merge_coincident(xs[order], ys[order], deltas[order])


def merge_coincident(xs: Any, ys: Any, deltas: Any) -> DataSeries:
    """
    Merge sites with equal abscissae by inverse-variance weighting.

    For a group with weights w_i = 1 / delta_i^2 the merged observation is
    sum(w_i y_i) / sum(w_i) and the merged delta is sum(w_i)^(-1/2).

    Args:
        xs: non-decreasing abscissae
        ys: observations, shape (N, D)
        deltas: standard-deviation estimates

    Returns:
        Series with strictly increasing abscissae
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if ys.ndim == 1:
        ys = ys.reshape(-1, 1)
    deltas = np.asarray(deltas, dtype=float)

    starts = np.flatnonzero(np.r_[True, xs[1:] != xs[:-1]])
    if starts.shape[0] == xs.shape[0]:
        return DataSeries(xs=xs, ys=ys, deltas=deltas)

    weights = 1.0 / deltas**2
    total = np.add.reduceat(weights, starts)
    merged_ys = np.add.reduceat(weights[:, None] * ys, starts, axis=0) / total[:, None]
    merged = DataSeries(xs=xs[starts], ys=merged_ys, deltas=1.0 / np.sqrt(total))
    logger.info("merged coincident sites", before=int(xs.shape[0]), after=merged.n)
    return merged


def mesh_ratio(series: DataSeries, threshold: Optional[float] = None) -> float:
    """
    Ratio of the largest to the smallest gap between neighbouring sites.

    Args:
        series: data series with at least two sites
        threshold: warning threshold (default: ``CSSD_MESH_RATIO_THRESHOLD``)

    Returns:
        max(d_i) / min(d_i); a ``MeshRatioWarning`` is issued above the threshold

    Raises:
        TooFewPoints: if N < 2
    """
    if series.n < 2:
        raise TooFewPoints(f"the mesh ratio needs at least 2 sites, got {series.n}")
    gaps = np.diff(series.xs)
    ratio = float(gaps.max() / gaps.min())
    limit = get_settings().mesh_ratio_threshold if threshold is None else threshold
    if ratio > limit:
        logger.warning("large mesh ratio", ratio=ratio, threshold=limit)
        warnings.warn(
            f"mesh ratio {ratio:.3g} exceeds {limit:.3g}; consider binning the data",
            MeshRatioWarning,
            stacklevel=2,
        )
    return ratio


def bin_series(series: DataSeries, threshold: Optional[float] = None) -> DataSeries:
    """
    Merge closest neighbours until the mesh ratio drops to the threshold.

    Each step replaces the pair of sites with the smallest gap by one site at
    their inverse-variance weighted mean abscissa, merging y and delta the
    same way as ``merge_coincident``. Stops at two sites.
    """
    limit = get_settings().mesh_ratio_threshold if threshold is None else threshold
    xs = [float(v) for v in series.xs]
    ys = [row.copy() for row in np.asarray(series.ys)]
    weights = [1.0 / float(d) ** 2 for d in series.deltas]

    merges = 0
    while len(xs) > 2:
        gaps = np.diff(xs)
        if gaps.max() / gaps.min() <= limit:
            break
        i = int(np.argmin(gaps))
        w = weights[i] + weights[i + 1]
        xs[i] = (weights[i] * xs[i] + weights[i + 1] * xs[i + 1]) / w
        ys[i] = (weights[i] * ys[i] + weights[i + 1] * ys[i + 1]) / w
        weights[i] = w
        del xs[i + 1], ys[i + 1], weights[i + 1]
        merges += 1

    if merges == 0:
        return series
    logger.info("binned close sites", merges=merges, remaining=len(xs))
    return DataSeries(
        xs=np.array(xs), ys=np.vstack(ys), deltas=1.0 / np.sqrt(np.array(weights))
    )
