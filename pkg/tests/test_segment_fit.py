import numpy as np
import pytest

from src.entity.series_entity import DataSeries
from src.entity.solution_entity import SegmentSpline
from src.tools.cssd.oracle import dense_energy
from src.tools.cssd.segment_fit import (
    eval_spline,
    fit_segment,
    fit_segment_energy,
    piece_coefficients,
    roughness,
    spline_functional,
)
from src.utils.exceptions import InvalidIndex, OutOfDomain


def _domain(series, l, r):
    return float(series.xs[l - 1]), float(series.xs[r - 1])


class TestFitSegment:
    def test_reproduces_a_line(self, line_series):
        spline = fit_segment(line_series, 1, line_series.n, 0.6, _domain(line_series, 1, line_series.n))
        np.testing.assert_allclose(spline.values[:, 0], 2.0 * line_series.xs + 1.0, atol=1e-10)
        np.testing.assert_allclose(spline.derivs[:, 0], 2.0, atol=1e-10)
        assert roughness(spline)[0] == pytest.approx(0.0, abs=1e-16)

    def test_single_site_is_constant(self, random_series):
        series = random_series(np.random.default_rng(1), 4)
        spline, energy = fit_segment_energy(series, 2, 2, 0.5, (series.xs[0], series.xs[2]))
        assert spline.values[0, 0] == series.ys[1, 0]
        assert spline.derivs[0, 0] == 0.0
        assert energy.tolist() == [0.0]
        np.testing.assert_allclose(eval_spline(spline, series.xs[2]), series.ys[1])

    def test_two_sites_interpolate(self):
        series = DataSeries(xs=[0.0, 2.0], ys=[1.0, 5.0], deltas=[1.0, 1.0])
        spline = fit_segment(series, 1, 2, 0.3, (0.0, 2.0))
        np.testing.assert_allclose(spline.values[:, 0], [1.0, 5.0], atol=1e-12)
        np.testing.assert_allclose(eval_spline(spline, 1.0), [3.0], atol=1e-12)

    def test_functional_equals_minimal_energy(self, random_series):
        rng = np.random.default_rng(42)
        for _ in range(20):
            n = int(rng.integers(3, 25))
            series = random_series(rng, n, int(rng.integers(1, 3)))
            p = float(rng.choice([0.2, 0.9, 0.999]))
            spline, energy = fit_segment_energy(series, 1, n, p, _domain(series, 1, n))
            functional = spline_functional(spline, series.ys, series.deltas, p)
            np.testing.assert_allclose(functional, energy, rtol=1e-8, atol=1e-12)
            np.testing.assert_allclose(energy, dense_energy(series, 1, n, p), rtol=1e-8, atol=1e-12)

    def test_perturbed_spline_is_not_better(self, random_series):
        series = random_series(np.random.default_rng(9), 8)
        spline, energy = fit_segment_energy(series, 1, 8, 0.7, _domain(series, 1, 8))
        shifted = spline.model_copy(update={"values": spline.values + 1e-3})
        assert spline_functional(shifted, series.ys, series.deltas, 0.7)[0] > energy[0]

    def test_sub_interval(self, random_series):
        series = random_series(np.random.default_rng(4), 10)
        spline = fit_segment(series, 3, 7, 0.9, (series.xs[1], series.xs[7]))
        np.testing.assert_array_equal(spline.knots, series.xs[2:7])

    def test_invalid_interval(self, random_series):
        series = random_series(np.random.default_rng(4), 5)
        with pytest.raises(InvalidIndex):
            fit_segment(series, 4, 3, 0.5, (series.xs[0], series.xs[-1]))

    def test_domain_must_contain_sites(self, random_series):
        series = random_series(np.random.default_rng(4), 5)
        with pytest.raises(OutOfDomain):
            fit_segment(series, 1, 5, 0.5, (series.xs[1], series.xs[-1]))


class TestEvaluation:
    @pytest.fixture
    def spline(self, random_series):
        series = random_series(np.random.default_rng(21), 9, 2)
        return fit_segment(series, 1, 9, 0.95, (series.xs[0] - 0.5, series.xs[-1] + 0.5))

    def test_knot_values(self, spline):
        np.testing.assert_allclose(eval_spline(spline, spline.knots), spline.values, atol=1e-12)

    def test_pieces_are_continuous_with_continuous_slope(self, spline):
        pieces = piece_coefficients(spline)
        assert len(pieces) == spline.knots.shape[0] - 1
        for (x0, c), x1 in zip(pieces, spline.knots[1:]):
            h = x1 - x0
            value = c[0] + h * (c[1] + h * (c[2] + h * c[3]))
            slope = c[1] + h * (2.0 * c[2] + 3.0 * h * c[3])
            k = int(np.searchsorted(spline.knots, x1))
            np.testing.assert_allclose(value, spline.values[k], rtol=1e-10, atol=1e-10)
            np.testing.assert_allclose(slope, spline.derivs[k], rtol=1e-9, atol=1e-9)

    def test_second_derivative_continuous(self, spline):
        pieces = piece_coefficients(spline)
        for (x0, c), (x1, c_next) in zip(pieces, pieces[1:]):
            h = x1 - x0
            left = 2.0 * c[2] + 6.0 * h * c[3]
            np.testing.assert_allclose(left, 2.0 * c_next[2], rtol=1e-6, atol=1e-6)

    def test_linear_extension_inside_domain(self, spline):
        a, _ = spline.domain
        expected = spline.values[0] + (a - spline.knots[0]) * spline.derivs[0]
        np.testing.assert_allclose(eval_spline(spline, a), expected)

    def test_outside_domain(self, spline):
        with pytest.raises(OutOfDomain):
            eval_spline(spline, spline.domain[1] + 1.0)

    def test_vector_evaluation_shape(self, spline):
        assert eval_spline(spline, [spline.knots[0], spline.knots[1]]).shape == (2, 2)
        assert eval_spline(spline, spline.knots[0]).shape == (2,)

    def test_natural_boundary_conditions(self, spline):
        pieces = piece_coefficients(spline)
        (_, first), (x_last, last) = pieces[0], pieces[-1]
        h = spline.knots[-1] - x_last
        curvature = [2.0 * c[2] + 6.0 * t * c[3] for (x0, c), x1 in zip(pieces, spline.knots[1:]) for t in (0.0, x1 - x0)]
        scale = max(float(np.max(np.abs(curvature))), 1.0)
        np.testing.assert_allclose(2.0 * first[2], 0.0, atol=1e-6 * scale)
        np.testing.assert_allclose(2.0 * last[2] + 6.0 * h * last[3], 0.0, atol=1e-6 * scale)

    def test_pieces_reproduce_evaluation_on_fine_grid(self, spline):
        pieces = piece_coefficients(spline)
        starts = np.array([x0 for x0, _ in pieces])
        ts = np.linspace(spline.knots[0], spline.knots[-1], 1000)
        idx = np.clip(np.searchsorted(starts, ts, side="right") - 1, 0, len(pieces) - 1)
        expected = np.array([
            pieces[i][1][0] + h * (pieces[i][1][1] + h * (pieces[i][1][2] + h * pieces[i][1][3]))
            for i, h in zip(idx, ts - starts[idx])
        ])
        np.testing.assert_allclose(eval_spline(spline, ts), expected, rtol=0.0, atol=1e-12)


class TestPieceCoefficients:
    def test_symmetric_bump(self):
        spline = SegmentSpline(knots=[0.0, 1.0], values=[[0.0], [0.0]], derivs=[[1.0], [-1.0]], domain=(0.0, 1.0))
        [(x0, coeffs)] = piece_coefficients(spline)
        assert x0 == 0.0
        assert coeffs[:, 0].tolist() == [0.0, 1.0, -1.0, 0.0]

    def test_line_has_no_curvature(self):
        spline = SegmentSpline(knots=[0.0, 1.0, 3.0], values=[[1.0], [3.0], [7.0]], derivs=[[2.0], [2.0], [2.0]],
                               domain=(0.0, 3.0))
        for _, coeffs in piece_coefficients(spline):
            np.testing.assert_allclose(coeffs[2:, 0], [0.0, 0.0], atol=1e-15)
