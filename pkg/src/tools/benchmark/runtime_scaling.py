"""
Runtime scaling of the CSSD solver on the HeaviSine signal.

Two scenarios grow the number of samples N:

- densified: N equidistant samples on [0, 1], so the number of jumps stays two
- repeated: N / 200 copies of a 200-sample HeaviSine period, so the number of
  jumps grows linearly with N
"""

import statistics
import time
from typing import Iterable, List, Union

import numpy as np
import pandas as pd

from src.entity.series_entity import DataSeries, GammaSentinel, Hyperparams
from src.logs.logger_config import get_tool_logger
from src.tools.cssd.solver import solve_cssd
from src.tools.signals.synthetic import heavisine
from src.utils.exceptions import CssdParameterError

logger = get_tool_logger("RuntimeBenchmark")

PERIOD = 200
DENSIFIED = "densified"
REPEATED = "repeated"


def densified_series(n: int, sigma: float, seed: int) -> DataSeries:
    rng = np.random.default_rng(seed)
    xs = np.linspace(0.0, 1.0, n)
    ys = heavisine(xs) + rng.normal(0.0, sigma, n)
    return DataSeries(xs=xs, ys=ys, deltas=np.full(n, sigma))


def repeated_series(n: int, sigma: float, seed: int) -> DataSeries:
    """Tile a 200-sample period; tile k covers [k, k + 1)."""
    if n % PERIOD:
        raise CssdParameterError(f"the repeated scenario needs N divisible by {PERIOD}, got {n}")
    rng = np.random.default_rng(seed)
    period = np.arange(PERIOD) / PERIOD
    xs = (np.arange(n // PERIOD)[:, None] + period[None, :]).ravel()
    ys = np.tile(heavisine(period), n // PERIOD) + rng.normal(0.0, sigma, n)
    return DataSeries(xs=xs, ys=ys, deltas=np.full(n, sigma))


SCENARIOS = {DENSIFIED: densified_series, REPEATED: repeated_series}


def time_solve(series: DataSeries, params: Hyperparams, runs: int):
    """
    Median wall-clock time of ``solve_cssd`` over several runs.

    Returns:
        (median seconds, number of detected discontinuities)
    """
    timings: List[float] = []
    jumps = 0
    for _ in range(runs):
        started = time.perf_counter()
        solution = solve_cssd(series, params)
        timings.append(time.perf_counter() - started)
        jumps = len(solution.discontinuities)
    return statistics.median(timings), jumps


def run_benchmark(
    sizes: Iterable[int] = (200, 400, 800),
    runs: int = 5,
    p: float = 0.9999,
    gamma: Union[float, GammaSentinel] = 20.0,
    sigma: float = 0.6,
    seed: int = 0,
) -> pd.DataFrame:
    """
    Time both scenarios for every size.

    Args:
        sizes: signal lengths (multiples of 200)
        runs: timed runs per size; the median is reported
        p: smoothing weight
        gamma: jump penalty
        sigma: noise level (also used as delta)
        seed: noise seed

    Returns:
        DataFrame with columns scenario, n, median_seconds, discontinuities
    """
    if runs < 1:
        raise CssdParameterError(f"runs must be positive, got {runs}")
    params = Hyperparams(p=p, gamma=gamma)
    rows = []
    for scenario, build in SCENARIOS.items():
        for n in sizes:
            seconds, jumps = time_solve(build(n, sigma, seed), params, runs)
            logger.info("benchmark size done", scenario=scenario, n=n, seconds=seconds, jumps=jumps)
            rows.append({"scenario": scenario, "n": n, "median_seconds": seconds, "discontinuities": jumps})
    return pd.DataFrame(rows, columns=["scenario", "n", "median_seconds", "discontinuities"])


def runtime_table(results: pd.DataFrame) -> pd.DataFrame:
    """Pivot to one row per scenario and one column per signal length."""
    return results.pivot(index="scenario", columns="n", values="median_seconds")


def growth_ratios(results: pd.DataFrame) -> pd.DataFrame:
    """Ratio of consecutive median times within each scenario."""
    table = runtime_table(results)
    ratios = table.iloc[:, 1:].to_numpy() / table.iloc[:, :-1].to_numpy()
    return pd.DataFrame(ratios, index=table.index, columns=table.columns[1:])
