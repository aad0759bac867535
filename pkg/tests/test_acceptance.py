"""
Long-running statistical and timing checks; run with ``pytest -m acceptance``.
"""

import numpy as np
import pytest

from src.entity.series_entity import DataSeries, Hyperparams
from src.tools.benchmark.runtime_scaling import DENSIFIED, REPEATED, growth_ratios, run_benchmark
from src.tools.cssd.solver import solve_cssd
from src.tools.signals.synthetic import SIGNAL_JUMPS, UNIFORM, bessel_signal, generate_series

pytestmark = pytest.mark.acceptance

N_SITES = 100
SIGMA = 0.1
P = 0.999
TOLERANCE = 0.05


def _hits_truth(locations, truth=SIGNAL_JUMPS["bessel"]):
    return len(locations) == len(truth) and all(abs(a - b) <= TOLERANCE for a, b in zip(locations, truth))


def _choose_gamma():
    noisy = generate_series("bessel", N_SITES, SIGMA, seed=0, layout=UNIFORM)
    clean = DataSeries(xs=noisy.xs, ys=bessel_signal(noisy.xs), deltas=noisy.deltas)
    good = [
        gamma
        for gamma in np.logspace(-1, 3, 20)
        if _hits_truth(solve_cssd(clean, Hyperparams(p=P, gamma=float(gamma))).discontinuities.locations)
    ]
    assert good, "no gamma on the scan recovers the jumps of the noiseless signal"
    return float(np.exp(np.mean(np.log(good))))


def test_detection_rate_on_bessel_signal():
    params = Hyperparams(p=P, gamma=_choose_gamma())
    hits = sum(
        _hits_truth(solve_cssd(generate_series("bessel", N_SITES, SIGMA, seed=seed, layout=UNIFORM), params)
                    .discontinuities.locations)
        for seed in range(1, 101)
    )
    assert hits >= 80


def test_runtime_growth():
    results = run_benchmark(sizes=(400, 800, 1600, 3200), runs=5)
    ratios = growth_ratios(results)
    assert np.all((ratios.loc[DENSIFIED] >= 3.0) & (ratios.loc[DENSIFIED] <= 6.0))
    assert np.all((ratios.loc[REPEATED] >= 1.2) & (ratios.loc[REPEATED] <= 3.0))
