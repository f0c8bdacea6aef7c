"""Tests for log returns, the natural cubic spline, and summary stats."""

import datetime as dt
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sentivol.errors import InputError
from sentivol.timeseries import (
    MarketSeries,
    Spline,
    describe,
    fill_missing,
    fit_natural_spline,
    log_returns,
    spline_eval,
)


def series(values, start=dt.date(2024, 1, 1), name="SP500", step=1):
    dates = tuple(start + dt.timedelta(days=i * step) for i in range(len(values)))
    return MarketSeries(name=name, dates=dates, values=np.asarray(values, dtype=np.float64))


def piece_eval(s: Spline, i: int, x: float) -> float:
    """Evaluate segment i's cubic at x, also past its own boundaries."""
    xs, ys, m = s.xs, s.ys, s.second_derivs
    h = xs[i + 1] - xs[i]
    a = xs[i + 1] - x
    b = x - xs[i]
    return float(
        m[i] * a**3 / (6.0 * h)
        + m[i + 1] * b**3 / (6.0 * h)
        + (ys[i] / h - m[i] * h / 6.0) * a
        + (ys[i + 1] / h - m[i + 1] * h / 6.0) * b
    )


class TestMarketSeries:
    def test_rejects_unsorted_dates(self):
        with pytest.raises(InputError):
            MarketSeries(
                name="X",
                dates=(dt.date(2024, 1, 2), dt.date(2024, 1, 1)),
                values=np.array([1.0, 2.0]),
            )

    def test_rejects_empty_name(self):
        with pytest.raises(InputError):
            series([1.0], name="")

    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            series([1.0, np.nan])


class TestLogReturns:
    def test_flat_prices_zero_return(self):
        out = log_returns(series([100.0, 100.0]))
        assert out.values[0] == pytest.approx(0.0)
        assert len(out) == 1

    def test_known_value(self):
        """ln(105/100) frozen from 40-digit arithmetic."""
        out = log_returns(series([100.0, 105.0]))
        assert out.values[0] == pytest.approx(0.048790164169432, abs=1e-12)

    def test_dated_at_t(self):
        s = series([100.0, 101.0, 102.0])
        out = log_returns(s)
        assert out.dates == s.dates[1:]

    def test_nonpositive_price_rejected_with_date(self):
        with pytest.raises(InputError, match="2024-01-02"):
            log_returns(series([100.0, 0.0]))

    def test_too_few_points(self):
        with pytest.raises(InputError):
            log_returns(series([100.0]))

    def test_cumsum_roundtrip(self):
        """exp of accumulated log returns reconstructs P_t / P_0."""
        rng = np.random.default_rng(11)
        prices = 50.0 * np.exp(np.cumsum(rng.normal(0, 0.02, size=250)))
        rets = log_returns(series(prices)).values
        np.testing.assert_allclose(np.exp(np.cumsum(rets)), prices[1:] / prices[0], rtol=1e-10)


class TestFitNaturalSpline:
    def test_collinear_knots_give_zero_curvature(self):
        s = fit_natural_spline([(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)])
        np.testing.assert_allclose(s.second_derivs, 0.0, atol=1e-14)

    def test_tent_fixture(self):
        """Hand tridiagonal solve: 4*M1 = 6*((0-1) - (1-0)) gives M1 = -3."""
        s = fit_natural_spline([(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)])
        np.testing.assert_allclose(s.second_derivs, [0.0, -3.0, 0.0], atol=1e-14)

    def test_two_knots_is_a_line(self):
        s = fit_natural_spline([(0.0, 5.0), (3.0, 5.0)])
        assert spline_eval(s, 1.7) == pytest.approx(5.0)

    def test_duplicate_x_rejected(self):
        with pytest.raises(InputError):
            fit_natural_spline([(0.0, 0.0), (0.0, 1.0), (2.0, 0.0)])

    def test_too_few_knots(self):
        with pytest.raises(InputError):
            fit_natural_spline([(0.0, 0.0)])

    def test_matches_dense_solver(self):
        """Independent oracle: assemble and solve the full linear system."""
        rng = np.random.default_rng(3)
        xs = np.sort(rng.uniform(0, 10, size=8))
        xs += np.arange(8) * 1e-3  # guard against near-duplicates
        ys = rng.normal(size=8)
        n = len(xs)
        h = np.diff(xs)
        a = np.zeros((n, n))
        b = np.zeros(n)
        a[0, 0] = 1.0
        a[-1, -1] = 1.0
        for i in range(1, n - 1):
            a[i, i - 1] = h[i - 1]
            a[i, i] = 2.0 * (h[i - 1] + h[i])
            a[i, i + 1] = h[i]
            b[i] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1])
        expected = np.linalg.solve(a, b)
        s = fit_natural_spline(list(zip(xs, ys)))
        np.testing.assert_allclose(s.second_derivs, expected, atol=1e-10)

    def test_natural_boundary_enforced_on_type(self):
        with pytest.raises(InputError):
            Spline(xs=np.array([0.0, 1.0]), ys=np.array([0.0, 1.0]),
                   second_derivs=np.array([1.0, 0.0]))


class TestSplineEval:
    def test_linear_segment(self):
        s = fit_natural_spline([(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)])
        assert spline_eval(s, 1.5) == pytest.approx(1.5)

    def test_tent_midpoint_fixture(self):
        """Cubic piece with M1 = -3 evaluated by hand at x = 0.5."""
        s = fit_natural_spline([(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)])
        assert spline_eval(s, 0.5) == pytest.approx(0.6875, abs=1e-15)

    def test_knots_reproduce_exactly(self):
        rng = np.random.default_rng(5)
        xs = np.array([0.0, 1.3, 2.1, 4.0, 7.5])
        ys = rng.normal(size=5)
        s = fit_natural_spline(list(zip(xs, ys)))
        for x, y in zip(xs, ys):
            assert spline_eval(s, x) == y  # bit-for-bit

    def test_out_of_range_rejected(self):
        s = fit_natural_spline([(0.0, 0.0), (1.0, 1.0)])
        with pytest.raises(InputError):
            spline_eval(s, -0.1)
        with pytest.raises(InputError):
            spline_eval(s, 1.1)

    def test_c2_continuity_at_interior_knots(self):
        """Adjacent cubic pieces agree in value, slope, and curvature at every
        interior knot within 1e-8.

        Each piece is extended slightly past the knot and compared there
        (two cubics matching value/slope/curvature at the knot differ by
        O(h^3) ~ 1e-18 at offset 1e-6). Slopes and curvatures come from
        centered finite differences per piece, which are exact for cubics;
        the step sizes keep float rounding below the 1e-8 tolerance.
        """
        rng = np.random.default_rng(9)
        xs = np.sort(rng.uniform(0, 9, size=7))
        xs += np.arange(7) * 0.2
        ys = rng.normal(size=7)
        s = fit_natural_spline(list(zip(xs, ys)))
        for i in range(1, len(xs) - 1):
            xk = float(xs[i])
            left = lambda x: piece_eval(s, i - 1, x)
            right = lambda x: piece_eval(s, i, x)
            for offset in (-1e-6, 0.0, 1e-6):
                assert abs(left(xk + offset) - right(xk + offset)) < 1e-8
            h1 = 1e-5  # first-derivative step: truncation h^2*|S'''|/6 ~ 1e-10
            d_left = (left(xk + h1) - left(xk - h1)) / (2 * h1)
            d_right = (right(xk + h1) - right(xk - h1)) / (2 * h1)
            assert abs(d_left - d_right) < 1e-8
            h2 = 1e-3  # second-derivative step: exact for cubics, rounding ~ eps/h^2
            dd_left = (left(xk - h2) - 2 * left(xk) + left(xk + h2)) / h2**2
            dd_right = (right(xk - h2) - 2 * right(xk) + right(xk + h2)) / h2**2
            assert abs(dd_left - dd_right) < 1e-8

    def test_reproduces_piecewise_cubic_with_natural_ends(self):
        """A piecewise cubic with zero end curvature (i.e. a natural spline)
        is reproduced exactly when refit through a refinement of its knots:
        the natural interpolant through those samples is unique."""
        rng = np.random.default_rng(21)
        base_x = np.array([0.0, 2.0, 3.5, 6.0, 9.0])
        base_y = rng.normal(size=5)
        original = fit_natural_spline(list(zip(base_x, base_y)))
        refined_x = np.unique(np.concatenate([base_x, np.linspace(0.0, 9.0, 19)]))
        refined = fit_natural_spline(
            [(float(x), spline_eval(original, float(x))) for x in refined_x]
        )
        for x in np.linspace(0.0, 9.0, 301):
            assert abs(spline_eval(refined, float(x)) - spline_eval(original, float(x))) < 1e-8

    def test_reproduces_straight_line_exactly(self):
        """Degree-one data is the only polynomial with zero curvature at both
        ends; the natural fit returns it everywhere in range."""
        s = fit_natural_spline([(x, 2.0 * x - 1.0) for x in (0.0, 1.0, 2.5, 4.0)])
        for x in np.linspace(0.0, 4.0, 101):
            assert spline_eval(s, float(x)) == pytest.approx(2.0 * x - 1.0, abs=1e-10)


class TestFillMissing:
    def test_collinear_midpoint(self):
        s = series([0.0, 2.0], step=2)  # days 0 and 2
        target = [s.dates[0], s.dates[0] + dt.timedelta(days=1), s.dates[1]]
        out = fill_missing(s, target)
        assert out.values[1] == pytest.approx(1.0)

    def test_identity_when_targets_known(self):
        s = series([3.0, 1.0, 4.0])
        out = fill_missing(s, list(s.dates))
        assert out.dates == s.dates
        np.testing.assert_array_equal(out.values, s.values)

    def test_tent_fixture_on_day_offsets(self):
        """Known days 0/2/4 with values 0/1/0: interpolating halfway into the
        first segment reproduces the hand-computed cubic value 0.6875."""
        s = series([0.0, 1.0, 0.0], step=2)
        target = [s.dates[0] + dt.timedelta(days=1)]
        out = fill_missing(s, target)
        assert out.values[0] == pytest.approx(0.6875, abs=1e-12)

    def test_known_values_bit_for_bit(self):
        rng = np.random.default_rng(13)
        s = series(rng.uniform(1, 2, size=6), step=3)
        targets = sorted(set(s.dates) | {s.dates[0] + dt.timedelta(days=4)})
        out = fill_missing(s, targets)
        lookup = dict(zip(out.dates, out.values))
        for d, v in s.points():
            assert lookup[d] == v

    def test_target_outside_span_rejected(self):
        s = series([1.0, 2.0])
        with pytest.raises(InputError, match="outside known span"):
            fill_missing(s, [s.dates[0] - dt.timedelta(days=1)])

    def test_too_few_points(self):
        s = series([1.0])
        with pytest.raises(InputError):
            fill_missing(s, [s.dates[0]])


class TestDescribe:
    def test_constant(self):
        d = describe([1.0, 1.0, 1.0])
        assert d.mean == 1.0
        assert d.std_dev == 0.0
        assert d.skewness == 0.0
        assert d.excess_kurtosis == 0.0

    def test_known_values(self):
        d = describe([1.0, 2.0, 3.0, 4.0])
        assert d.mean == pytest.approx(2.5)
        assert d.std_dev == pytest.approx(1.2909944487358056, abs=1e-12)

    def test_symmetric_has_zero_skew(self):
        d = describe([-1.0, 1.0])
        assert d.mean == 0.0
        assert d.skewness == 0.0

    def test_empty_rejected(self):
        with pytest.raises(InputError):
            describe([])

    @given(st.lists(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False), min_size=1, max_size=40))
    def test_mean_within_range(self, values):
        d = describe(values)
        assert d.count == len(values)
        assert d.std_dev >= 0.0
        span = max(abs(d.min), abs(d.max), 1.0)
        assert d.min - 1e-9 * span <= d.mean <= d.max + 1e-9 * span
