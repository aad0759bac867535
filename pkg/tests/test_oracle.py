import numpy as np
import pytest

from src.entity.series_entity import INFINITE, DataSeries
from src.entity.solution_entity import DiscontinuitySet, max_discontinuities
from src.tools.cssd.energy import FORWARD, prefix_energies
from src.tools.cssd.oracle import brute_force_solve, dense_energy, dense_system
from src.utils.exceptions import InvalidGamma, InvalidIndex, TooLargeForOracle


class TestDenseEnergy:
    def test_system_shape(self, random_series):
        series = random_series(np.random.default_rng(0), 6, 2)
        A, b = dense_system(series, 2, 5, 0.5)
        assert A.shape == (10, 8)
        assert b.shape == (10, 2)

    @pytest.mark.parametrize("l, r", [(1, 1), (2, 3)])
    def test_one_or_two_sites(self, random_series, l, r):
        series = random_series(np.random.default_rng(1), 4)
        assert dense_energy(series, l, r, 0.5).tolist() == [0.0]

    def test_collinear_data(self):
        xs = np.array([0.0, 0.3, 1.0, 2.5, 3.0])
        series = DataSeries(xs=xs, ys=4.0 - xs, deltas=np.full(5, 0.7))
        assert dense_energy(series, 1, 5, 0.9)[0] == pytest.approx(0.0, abs=1e-20)

    def test_agrees_with_streaming_energy(self, random_series):
        series = random_series(np.random.default_rng(2), 6, 2)
        *_, streamed = prefix_energies(series, 1, FORWARD, 0.8)
        np.testing.assert_allclose(dense_energy(series, 1, 6, 0.8), streamed, rtol=1e-9)

    def test_invalid_interval(self, tent_series):
        with pytest.raises(InvalidIndex):
            dense_energy(tent_series, 2, 4, 0.5)


class TestBruteForceSolve:
    def test_both_tent_jumps_are_optimal(self, tent_series):
        best, optimal = brute_force_solve(tent_series, 0.5, 0.01)
        assert best == pytest.approx(0.01, abs=1e-12)
        assert [jumps.gaps for jumps in optimal] == [(1,), (2,)]

    def test_tiny_gamma_keeps_size_bound(self):
        series = DataSeries(xs=[0.0, 1.0, 2.0, 3.0], ys=[5.0, 0.0, 1.0, 2.0], deltas=np.ones(4))
        best, optimal = brute_force_solve(series, 0.5, 1e-13)
        assert best == pytest.approx(1e-13, rel=1e-6)
        assert [jumps.gaps for jumps in optimal] == [(1,), (2,)]

    def test_huge_gamma_keeps_one_piece(self, random_series):
        series = random_series(np.random.default_rng(3), 8)
        _, optimal = brute_force_solve(series, 0.9, 1e9)
        assert optimal == [DiscontinuitySet.empty(8)]

    def test_infinite_gamma(self, random_series):
        series = random_series(np.random.default_rng(4), 7)
        best, optimal = brute_force_solve(series, 0.9, INFINITE)
        assert optimal == [DiscontinuitySet.empty(7)]
        assert best == pytest.approx(float(np.sum(dense_energy(series, 1, 7, 0.9))))

    def test_optimal_sets_respect_size_bound(self, random_series):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(2, 11))
            series = random_series(rng, n)
            _, optimal = brute_force_solve(series, 0.99, 0.05)
            assert all(len(jumps) <= max_discontinuities(n) for jumps in optimal)

    def test_too_many_sites(self, random_series):
        series = random_series(np.random.default_rng(6), 21)
        with pytest.raises(TooLargeForOracle):
            brute_force_solve(series, 0.5, 1.0)

    @pytest.mark.parametrize("gamma", [0.0, -2.0, float("nan")])
    def test_invalid_gamma(self, tent_series, gamma):
        with pytest.raises(InvalidGamma):
            brute_force_solve(tent_series, 0.5, gamma)
