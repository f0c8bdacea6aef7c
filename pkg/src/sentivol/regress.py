"""Ordinary least squares for the mean equation plus the residual
diagnostics run on it: Breusch-Pagan, Durbin-Watson, and VIF."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import stats

from .errors import InputError, NumericalError


@dataclass(frozen=True)
class OlsFit:
    """Least-squares fit of y on a design matrix whose first column is the intercept.

    n_regressors counts the non-intercept columns; coefficient order follows
    the design matrix (intercept first).
    """

    coefficients: np.ndarray
    std_errors: np.ndarray
    p_values: np.ndarray
    residuals: np.ndarray
    r2: float
    adj_r2: float
    f_statistic: float
    f_p_value: float
    n_obs: int
    n_regressors: int

    def __post_init__(self) -> None:
        k = len(self.coefficients)
        if not (len(self.std_errors) == len(self.p_values) == k):
            raise InputError("coefficient, std error, and p-value lengths must match")
        if len(self.residuals) != self.n_obs:
            raise InputError("residuals length must equal n_obs")
        if self.r2 > 1.0 + 1e-12 or self.adj_r2 > self.r2 + 1e-12:
            raise InputError("requires adj_r2 <= r2 <= 1")


@dataclass(frozen=True)
class TestResult:
    """Outcome of one diagnostic test."""

    name: str
    statistic: float
    p_value: Optional[float] = None
    degrees_of_freedom: Optional[int] = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.statistic):
            raise NumericalError(f"{self.name}: statistic is not finite")
        if self.p_value is not None and not (0.0 <= self.p_value <= 1.0):
            raise NumericalError(f"{self.name}: p-value outside [0, 1]")


def design_matrix(exog) -> np.ndarray:
    """Prepend an intercept column of ones to the exogenous columns."""
    x = np.atleast_2d(np.asarray(exog, dtype=np.float64))
    if x.shape[0] == 1 and x.shape[1] > 1:
        x = x.T
    return np.column_stack([np.ones(x.shape[0]), x])


def _qr_solve(y: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients and (X'X)^-1 via QR; raises on rank deficiency."""
    q, r = np.linalg.qr(x)
    diag = np.abs(np.diag(r))
    tol = max(x.shape) * np.finfo(np.float64).eps * (diag.max() if diag.size else 0.0)
    if np.any(diag <= tol):
        raise NumericalError("rank-deficient design matrix")
    beta = np.linalg.solve(r, q.T @ y)
    rinv = np.linalg.solve(r, np.eye(r.shape[0]))
    xtx_inv = rinv @ rinv.T
    return beta, xtx_inv


def ols_fit(y, X) -> OlsFit:
    """Classical OLS with t-based p-values and the joint F test.

    X is the full design matrix with the intercept column already prepended.
    Standard errors come from s^2 (X'X)^-1 with s^2 = RSS/(n-p); R^2 is
    centered when the first column is constant.
    """
    y = np.asarray(y, dtype=np.float64).ravel()
    x = np.asarray(X, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != y.size:
        raise InputError("X must be 2-d with one row per observation")
    n, p = x.shape
    if n <= p + 1:
        raise InputError(f"insufficient observations: n={n} needs to exceed {p + 1}")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
        raise InputError("y and X must be finite")

    beta, xtx_inv = _qr_solve(y, x)
    resid = y - x @ beta
    rss = float(resid @ resid)
    df = n - p
    sigma2 = rss / df
    se = np.sqrt(sigma2 * np.diag(xtx_inv))
    with np.errstate(divide="ignore", invalid="ignore"):
        tvals = np.where(se > 0.0, beta / se, np.inf)
    pvals = 2.0 * stats.t.sf(np.abs(tvals), df)

    has_intercept = np.ptp(x[:, 0]) == 0.0 and x[0, 0] != 0.0
    tss = float(np.sum((y - y.mean()) ** 2)) if has_intercept else float(y @ y)
    if tss > 0.0:
        r2 = 1.0 - rss / tss
    else:
        r2 = 1.0 if rss <= 1e-300 else 0.0
    k = p - 1 if has_intercept else p
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / (n - k - 1) if n - k - 1 > 0 else r2
    if k >= 1 and r2 < 1.0:
        f_stat = (r2 / k) / ((1.0 - r2) / (n - k - 1))
        f_p = float(stats.f.sf(f_stat, k, n - k - 1))
    elif k >= 1:
        f_stat, f_p = math.inf, 0.0
    else:
        f_stat, f_p = math.nan, math.nan

    return OlsFit(
        coefficients=beta,
        std_errors=se,
        p_values=pvals,
        residuals=resid,
        r2=r2,
        adj_r2=adj_r2,
        f_statistic=f_stat,
        f_p_value=f_p,
        n_obs=n,
        n_regressors=k,
    )


def breusch_pagan(fit: OlsFit, X, studentized: bool = True) -> TestResult:
    """Heteroscedasticity test from the auxiliary regression of e^2 on X.

    Default is the Koenker studentized form, statistic = n * R^2 of the
    auxiliary regression; studentized=False gives the classical LM form,
    half the explained sum of squares of e^2/mean(e^2) on X.
    """
    x = np.asarray(X, dtype=np.float64)
    if x.shape[0] != fit.n_obs:
        raise InputError("X row count must match the fit's observations")
    e2 = fit.residuals**2
    n = fit.n_obs
    aux = ols_fit(e2, x)
    k = aux.n_regressors
    if studentized:
        statistic = n * aux.r2
    else:
        g = e2 / e2.mean()
        aux_g = ols_fit(g, x)
        ess = float(np.sum((g - g.mean()) ** 2)) - float(aux_g.residuals @ aux_g.residuals)
        statistic = ess / 2.0
    p_value = float(stats.chi2.sf(statistic, k))
    return TestResult(
        name="breusch_pagan", statistic=float(statistic), p_value=p_value, degrees_of_freedom=k
    )


def durbin_watson(residuals) -> TestResult:
    """First-order autocorrelation statistic, sum of squared residual
    differences over the residual sum of squares; always in [0, 4].

    The p-value uses the large-sample normal approximation
    z = (2 - DW) * sqrt(n) / 2 and is approximate by construction.
    """
    e = np.asarray(residuals, dtype=np.float64).ravel()
    if e.size < 2:
        raise InputError("durbin_watson needs at least 2 residuals")
    denom = float(e @ e)
    if denom == 0.0:
        raise InputError("durbin_watson is undefined for all-zero residuals")
    statistic = float(np.sum(np.diff(e) ** 2)) / denom
    z = (2.0 - statistic) * math.sqrt(e.size) / 2.0
    p_value = float(2.0 * stats.norm.sf(abs(z)))
    return TestResult(name="durbin_watson", statistic=statistic, p_value=p_value)


def vif(X) -> np.ndarray:
    """Variance inflation factor per column of X (no intercept in X).

    VIF_j = 1/(1 - R^2_j) from regressing column j on the remaining
    columns plus an intercept. A rank-deficient auxiliary regression is
    reported as an infinite VIF rather than an error.
    """
    x = np.asarray(X, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] < 2:
        raise InputError("vif needs a 2-d matrix with at least 2 columns")
    out = np.empty(x.shape[1], dtype=np.float64)
    for j in range(x.shape[1]):
        others = np.delete(x, j, axis=1)
        try:
            aux = ols_fit(x[:, j], design_matrix(others))
        except NumericalError:
            out[j] = math.inf
            continue
        out[j] = 1.0 / (1.0 - aux.r2) if aux.r2 < 1.0 else math.inf
    return out
