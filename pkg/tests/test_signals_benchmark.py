import numpy as np
import pandas as pd
import pytest

from src.tools.benchmark.runtime_scaling import (
    PERIOD,
    densified_series,
    growth_ratios,
    repeated_series,
    run_benchmark,
    runtime_table,
)
from src.tools.signals.synthetic import (
    EQUIDISTANT,
    SIGNAL_JUMPS,
    UNIFORM,
    bessel_signal,
    generate_series,
    heavisine,
    sample_sites,
    vector_signal,
)
from src.utils.exceptions import CssdParameterError


class TestSignals:
    def test_heavisine_values(self):
        values = heavisine(np.array([0.0, 0.5, 0.8]))
        np.testing.assert_allclose(values, [0.0, -2.0, 4.0 * np.sin(3.2 * np.pi)], atol=1e-12)

    @pytest.mark.parametrize("jump", SIGNAL_JUMPS["heavisine"])
    def test_heavisine_jumps_by_two(self, jump):
        step = heavisine(np.array([jump + 1e-9])) - heavisine(np.array([jump - 1e-9]))
        assert abs(step[0]) == pytest.approx(2.0, abs=1e-6)

    @pytest.mark.parametrize("jump", SIGNAL_JUMPS["bessel"])
    def test_bessel_jumps(self, jump):
        step = bessel_signal(np.array([jump + 1e-9])) - bessel_signal(np.array([jump - 1e-9]))
        assert abs(step[0]) == pytest.approx(jump, abs=1e-6)

    def test_vector_signal(self):
        xs = np.linspace(0.0, 1.0, 7)
        values = vector_signal(xs)
        assert values.shape == (7, 2)
        np.testing.assert_allclose(values[:, 0], 4.0 * bessel_signal(xs))
        np.testing.assert_allclose(values[:, 1], heavisine(xs))


class TestGenerateSeries:
    def test_equidistant_sites(self):
        sites = sample_sites(5, EQUIDISTANT, np.random.default_rng(0))
        assert sites.tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_uniform_sites_are_sorted(self):
        sites = sample_sites(50, UNIFORM, np.random.default_rng(0))
        assert np.all(np.diff(sites) > 0)
        assert 0.0 <= sites[0] and sites[-1] <= 1.0

    def test_noise_level_sets_delta(self):
        series = generate_series("heavisine", 200, 0.6, seed=1)
        assert series.n == 200
        assert np.all(series.deltas == 0.6)

    def test_noiseless_samples(self):
        series = generate_series("bessel", 30, 0.0, seed=1)
        np.testing.assert_array_equal(series.ys[:, 0], bessel_signal(series.xs))
        assert np.all(series.deltas == 1.0)

    def test_same_seed_same_series(self):
        first = generate_series("vector", 40, 0.1, seed=9, layout=UNIFORM)
        second = generate_series("vector", 40, 0.1, seed=9, layout=UNIFORM)
        np.testing.assert_array_equal(first.xs, second.xs)
        np.testing.assert_array_equal(first.ys, second.ys)

    @pytest.mark.parametrize("kwargs", [{"signal": "square"}, {"sigma": -1.0}, {"n": 0}, {"layout": "grid"}])
    def test_invalid_arguments(self, kwargs):
        arguments = {"signal": "heavisine", "n": 10, "sigma": 0.1, "seed": 0, "layout": EQUIDISTANT, **kwargs}
        with pytest.raises(CssdParameterError):
            generate_series(**arguments)


class TestBenchmarkScenarios:
    def test_densified(self):
        series = densified_series(400, 0.6, seed=0)
        assert series.n == 400
        assert series.xs[0] == 0.0 and series.xs[-1] == 1.0

    def test_repeated_tiles(self):
        series = repeated_series(3 * PERIOD, 0.6, seed=0)
        assert series.n == 600
        assert series.xs[PERIOD] == 1.0
        assert series.xs[-1] == pytest.approx(3.0 - 1.0 / PERIOD)

    def test_repeated_needs_whole_periods(self):
        with pytest.raises(CssdParameterError):
            repeated_series(250, 0.6, seed=0)

    def test_tables(self):
        results = pd.DataFrame({
            "scenario": ["densified", "densified", "repeated", "repeated"],
            "n": [200, 400, 200, 400],
            "median_seconds": [1.0, 2.0, 1.0, 4.0],
            "discontinuities": [2, 2, 2, 4],
        })
        assert runtime_table(results).loc["repeated", 400] == 4.0
        ratios = growth_ratios(results)
        assert ratios.loc["densified", 400] == 2.0
        assert ratios.loc["repeated", 400] == 4.0

    def test_run_benchmark_columns(self):
        results = run_benchmark(sizes=(200,), runs=1)
        assert list(results.columns) == ["scenario", "n", "median_seconds", "discontinuities"]
        assert len(results) == 2

    def test_runs_must_be_positive(self):
        with pytest.raises(CssdParameterError):
            run_benchmark(sizes=(200,), runs=0)
