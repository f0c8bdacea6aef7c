"""Daily market series utilities: log returns, natural cubic splines
for gap filling, and descriptive statistics."""

from __future__ import annotations

import datetime as dt
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class MarketSeries:
    """A named daily series with strictly increasing dates and finite values."""

    name: str
    dates: tuple[dt.date, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        if not self.name:
            raise InputError("series name must be nonempty")
        if len(self.dates) != len(self.values):
            raise InputError("dates and values must have equal length")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise InputError(f"series {self.name!r}: dates must be strictly increasing")
        values = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(values)):
            raise InputError(f"series {self.name!r}: values must be finite")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_points(cls, name: str, points: Iterable[tuple[dt.date, float]]) -> "MarketSeries":
        pts = list(points)
        dates = tuple(p[0] for p in pts)
        values = np.array([p[1] for p in pts], dtype=np.float64)
        return cls(name=name, dates=dates, values=values)

    def points(self) -> Iterator[tuple[dt.date, float]]:
        return zip(self.dates, (float(v) for v in self.values))

    def __len__(self) -> int:
        return len(self.dates)


def log_returns(prices: MarketSeries) -> MarketSeries:
    """ln(P_t / P_{t-1}) per day, dated at t; requires strictly positive prices."""
    if len(prices) < 2:
        raise InputError("log_returns needs at least 2 price points")
    values = prices.values
    nonpositive = np.nonzero(values <= 0.0)[0]
    if nonpositive.size:
        bad = prices.dates[int(nonpositive[0])]
        raise InputError(f"nonpositive price on {bad.isoformat()} in series {prices.name!r}")
    rets = np.diff(np.log(values))
    return MarketSeries(name=prices.name, dates=prices.dates[1:], values=rets)


@dataclass(frozen=True)
class Spline:
    """Natural cubic spline: knots plus the second derivative at each knot."""

    xs: np.ndarray
    ys: np.ndarray
    second_derivs: np.ndarray

    def __post_init__(self) -> None:
        xs = np.asarray(self.xs, dtype=np.float64)
        ys = np.asarray(self.ys, dtype=np.float64)
        m = np.asarray(self.second_derivs, dtype=np.float64)
        if xs.size < 2 or xs.size != ys.size or xs.size != m.size:
            raise InputError("spline needs >= 2 knots with matching arrays")
        if np.any(np.diff(xs) <= 0.0):
            raise InputError("knot x values must be strictly increasing")
        if m[0] != 0.0 or m[-1] != 0.0:
            raise InputError("natural spline requires zero end second derivatives")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "second_derivs", m)

    @property
    def n_knots(self) -> int:
        return int(self.xs.size)


def fit_natural_spline(knots: Sequence[tuple[float, float]]) -> Spline:
    """Solve the tridiagonal system for the knot second derivatives.

    Natural boundary conditions pin the end second derivatives to zero;
    with two knots the interpolant degenerates to the straight line.
    """
    if len(knots) < 2:
        raise InputError("fit_natural_spline needs at least 2 knots")
    xs = np.array([k[0] for k in knots], dtype=np.float64)
    ys = np.array([k[1] for k in knots], dtype=np.float64)
    h = np.diff(xs)
    if np.any(h <= 0.0):
        raise InputError("knot x values must be strictly increasing (duplicate or unsorted x)")

    n = xs.size
    m = np.zeros(n, dtype=np.float64)
    if n > 2:
        # Interior equations: h[i-1]*M[i-1] + 2(h[i-1]+h[i])*M[i] + h[i]*M[i+1] = rhs[i]
        slopes = np.diff(ys) / h
        rhs = 6.0 * np.diff(slopes)
        diag = 2.0 * (h[:-1] + h[1:])
        lower = h[1:-1].copy()  # sub/super diagonals coincide for this system
        upper = h[1:-1].copy()

        # Thomas algorithm on the (n-2)-dim interior system
        k = n - 2
        cprime = np.zeros(k)
        dprime = np.zeros(k)
        cprime[0] = upper[0] / diag[0] if k > 1 else 0.0
        dprime[0] = rhs[0] / diag[0]
        for i in range(1, k):
            denom = diag[i] - lower[i - 1] * cprime[i - 1]
            if i < k - 1:
                cprime[i] = upper[i] / denom
            dprime[i] = (rhs[i] - lower[i - 1] * dprime[i - 1]) / denom
        m[k] = dprime[k - 1]
        for i in range(k - 2, -1, -1):
            m[i + 1] = dprime[i] - cprime[i] * m[i + 2]

    return Spline(xs=xs, ys=ys, second_derivs=m)


def spline_eval(s: Spline, x: float) -> float:
    """Piecewise-cubic evaluation; knots reproduce their y exactly.

    Extrapolation is refused: x must lie within [first knot, last knot].
    """
    xs, ys, m = s.xs, s.ys, s.second_derivs
    if not (xs[0] <= x <= xs[-1]):
        raise InputError(f"x={x} outside spline range [{xs[0]}, {xs[-1]}]")
    i = int(np.searchsorted(xs, x, side="right")) - 1
    i = min(max(i, 0), xs.size - 2)
    if x == xs[i]:
        return float(ys[i])
    if x == xs[i + 1]:
        return float(ys[i + 1])
    h = xs[i + 1] - xs[i]
    a = xs[i + 1] - x
    b = x - xs[i]
    return float(
        m[i] * a**3 / (6.0 * h)
        + m[i + 1] * b**3 / (6.0 * h)
        + (ys[i] / h - m[i] * h / 6.0) * a
        + (ys[i + 1] / h - m[i + 1] * h / 6.0) * b
    )


def fill_missing(series: MarketSeries, target_dates: Sequence[dt.date]) -> MarketSeries:
    """Values at the target dates: known dates bit-for-bit, gaps by spline.

    The spline x axis is days since the first known date, so the result
    does not depend on how many rows happen to be missing. Targets outside
    the known span are an error (no extrapolation).
    """
    if len(series) < 2:
        raise InputError(f"series {series.name!r} has fewer than 2 points; cannot interpolate")
    targets = list(target_dates)
    if any(b <= a for a, b in zip(targets, targets[1:])):
        raise InputError("target dates must be strictly increasing")
    first, last = series.dates[0], series.dates[-1]
    for d in targets:
        if d < first or d > last:
            raise InputError(
                f"target date {d.isoformat()} outside known span "
                f"[{first.isoformat()}, {last.isoformat()}] of series {series.name!r}"
            )
    known = dict(zip(series.dates, series.values))
    xs = np.array([(d - first).days for d in series.dates], dtype=np.float64)
    spline = fit_natural_spline(list(zip(xs, series.values)))
    out = np.empty(len(targets), dtype=np.float64)
    for j, d in enumerate(targets):
        if d in known:
            out[j] = known[d]
        else:
            out[j] = spline_eval(spline, float((d - first).days))
    return MarketSeries(name=series.name, dates=tuple(targets), values=out)


@dataclass(frozen=True)
class SummaryStats:
    """Sample moments of one variable."""

    count: int
    mean: float
    std_dev: float
    min: float
    max: float
    skewness: float
    excess_kurtosis: float

    def __post_init__(self) -> None:
        if self.count < 1:
            raise InputError("count must be >= 1")
        if self.std_dev < 0.0:
            raise InputError("std_dev must be nonnegative")
        span = max(abs(self.min), abs(self.max), 1.0)
        if not (self.min - 1e-12 * span <= self.mean <= self.max + 1e-12 * span):
            raise InputError("mean must lie within [min, max]")


def describe(values) -> SummaryStats:
    """Sample moments: std_dev with the n-1 denominator, skewness m3/m2^1.5,
    excess kurtosis m4/m2^2 - 3 (n-denominator central moments). Constant
    input reports 0 for both shape statistics by convention."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise InputError("describe requires a nonempty input")
    if not np.all(np.isfinite(v)):
        raise InputError("describe requires finite values")
    n = int(v.size)
    mean = float(v.mean())
    dev = v - mean
    m2 = float(np.mean(dev**2))
    std = math.sqrt(float(np.sum(dev**2)) / (n - 1)) if n > 1 else 0.0
    if m2 > 0.0:
        # standardize before the higher moments so tiny/huge scales
        # cannot underflow or overflow the powers
        z = dev / math.sqrt(m2)
        skew = float(np.mean(z**3))
        exkurt = float(np.mean(z**4)) - 3.0
    else:
        skew = 0.0
        exkurt = 0.0
    return SummaryStats(
        count=n,
        mean=mean,
        std_dev=std,
        min=float(v.min()),
        max=float(v.max()),
        skewness=skew,
        excess_kurtosis=exkurt,
    )
