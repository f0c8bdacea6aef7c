"""GARCH(1,1) conditional-variance modelling with exogenous mean
regressors and normal or Student-t innovations.

The conditional variance follows
    sigma2_t = alpha0 + alpha1 * eps_{t-1}^2 + beta1 * sigma2_{t-1}
with eps_t = y_t - mu - X_t . betas. Estimation is maximum likelihood
over transformed parameters via a derivative-free simplex search with
deterministic multi-starts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import signal, stats
from scipy.optimize import minimize
from scipy.special import expit, gammaln, logit

from .errors import InputError, NumericalError
from .regress import design_matrix, ols_fit

# Covariance-stationarity cap on alpha1 + beta1 enforced by the
# estimation transform; keeps the likelihood finite everywhere the
# optimizer can reach.
PERSISTENCE_CAP = 0.9999

# Estimation-time floor on the Student-t dof. The likelihood is unbounded
# as nu -> 2+ (the (nu-2)-scaled density spikes on near-zero residuals),
# so the search space must stay strictly away from 2.
NU_FLOOR = 2.05

DEFAULT_MULTISTART_SEEDS = (0, 1, 2, 3, 4)

_PENALTY = 1e12


@dataclass(frozen=True)
class GarchParams:
    """Mean and variance parameters; nu is required only for Student-t."""

    mu: float
    betas: np.ndarray
    alpha0: float
    alpha1: float
    beta1: float
    nu: Optional[float] = None

    def __post_init__(self) -> None:
        betas = np.asarray(self.betas, dtype=np.float64).ravel()
        object.__setattr__(self, "betas", betas)
        if not (np.isfinite(self.mu) and np.all(np.isfinite(betas))):
            raise InputError("mean parameters must be finite")
        if not (math.isfinite(self.alpha0) and self.alpha0 > 0.0):
            raise InputError("alpha0 must be finite and > 0")
        if self.alpha1 < 0.0 or self.beta1 < 0.0:
            raise InputError("alpha1 and beta1 must be >= 0")
        if not self.alpha1 + self.beta1 < 1.0:
            raise InputError("alpha1 + beta1 must be < 1 (covariance stationarity)")
        if self.nu is not None and not (math.isfinite(self.nu) and self.nu > 2.0):
            raise InputError("nu must be > 2 so the conditional variance is finite")

    @property
    def unconditional_variance(self) -> float:
        return self.alpha0 / (1.0 - self.alpha1 - self.beta1)


@dataclass(frozen=True)
class GarchFit:
    """Estimation result: parameters, in-sample variance path, and metadata."""

    params: GarchParams
    distribution: str
    variance_path: np.ndarray
    log_likelihood: float
    converged: bool
    iterations: int
    std_errors: Optional[np.ndarray]
    mode: str

    def __post_init__(self) -> None:
        path = np.asarray(self.variance_path, dtype=np.float64)
        if np.any(path <= 0.0):
            raise NumericalError("variance path must be strictly positive")
        if self.converged and not math.isfinite(self.log_likelihood):
            raise NumericalError("converged fit must have a finite log-likelihood")
        object.__setattr__(self, "variance_path", path)


def variance_recursion(params: GarchParams, residuals, sigma2_init: float) -> np.ndarray:
    """Conditional variance path seeded at sigma2_init.

    sigma2[0] = sigma2_init and
    sigma2[t] = alpha0 + alpha1 * residuals[t-1]^2 + beta1 * sigma2[t-1].
    """
    eps = np.asarray(residuals, dtype=np.float64).ravel()
    if eps.size == 0:
        raise InputError("variance_recursion needs at least one residual")
    if not np.all(np.isfinite(eps)):
        raise InputError("residuals must be finite")
    if not sigma2_init > 0.0:
        raise InputError("sigma2_init must be > 0")
    return _variance_path(params.alpha0, params.alpha1, params.beta1, eps, sigma2_init)


def _variance_path(a0: float, a1: float, b1: float, eps: np.ndarray, init: float) -> np.ndarray:
    # Linear recursion s[t] = d[t] + b1*s[t-1] with d[t] = a0 + a1*eps2[t-1];
    # lfilter runs it at C speed, which the likelihood loop depends on.
    out = np.empty(eps.size, dtype=np.float64)
    out[0] = init
    if eps.size > 1:
        driver = a0 + a1 * eps[:-1] ** 2
        out[1:] = signal.lfilter([1.0], [1.0, -b1], driver, zi=np.array([b1 * init]))[0]
    return out


def student_t_logpdf(eps, sigma2, nu):
    """Log density of the heavy-tailed residual law used for GARCH errors.

    log f = lgamma((nu+1)/2) - lgamma(nu/2) - 0.5*log(pi*(nu-2)*sigma2)
            - ((nu+1)/2) * log(1 + eps^2 / ((nu-2)*sigma2))

    The (nu-2) scaling makes sigma2 the actual variance of the density.
    Accepts scalars or arrays (broadcast); returns matching shape.
    """
    if not nu > 2.0:
        raise InputError("nu must be > 2")
    e = np.asarray(eps, dtype=np.float64)
    s2 = np.asarray(sigma2, dtype=np.float64)
    if np.any(s2 <= 0.0):
        raise InputError("sigma2 must be > 0")
    out = (
        gammaln((nu + 1.0) / 2.0)
        - gammaln(nu / 2.0)
        - 0.5 * np.log(np.pi * (nu - 2.0) * s2)
        - ((nu + 1.0) / 2.0) * np.log1p(e**2 / ((nu - 2.0) * s2))
    )
    return float(out) if out.ndim == 0 else out


def _mean_residuals(y: np.ndarray, x: Optional[np.ndarray], mu: float, betas: np.ndarray) -> np.ndarray:
    if x is None or x.size == 0:
        return y - mu
    return y - mu - x @ betas


def _sigma2_init(eps: np.ndarray, a0: float, a1: float, b1: float) -> float:
    # Sample variance of the mean-equation residuals; degenerate (zero or
    # non-finite) residual variance falls back to the unconditional variance.
    init = float(np.var(eps, ddof=1)) if eps.size > 1 else 0.0
    if not (math.isfinite(init) and init > 0.0):
        init = a0 / (1.0 - a1 - b1)
    return init


def _raw_loglike(
    y: np.ndarray,
    x: Optional[np.ndarray],
    distribution: str,
    mu: float,
    betas: np.ndarray,
    a0: float,
    a1: float,
    b1: float,
    nu: Optional[float],
) -> float:
    """Likelihood without parameter-domain validation; returns nan when the
    implied variance path is unusable (used by the optimizer and Hessian)."""
    if not (a0 > 0.0 and a1 + b1 < 1.0):
        return math.nan
    eps = _mean_residuals(y, x, mu, betas)
    if not np.all(np.isfinite(eps)):
        return math.nan
    init = _sigma2_init(eps, a0, a1, b1)
    path = _variance_path(a0, a1, b1, eps, init)
    if not np.all(np.isfinite(path)) or np.any(path <= 0.0):
        return math.nan
    if distribution == "normal":
        ll = -0.5 * np.sum(np.log(2.0 * np.pi * path) + eps**2 / path)
    elif distribution == "student_t":
        if nu is None or not nu > 2.0:
            return math.nan
        ll = float(np.sum(student_t_logpdf(eps, path, nu)))
    else:
        raise InputError(f"unknown distribution {distribution!r}")
    return float(ll)


def log_likelihood(params: GarchParams, y, X, distribution: str) -> float:
    """Total log-likelihood of the mean+variance model on (y, X).

    The variance path is seeded with the sample variance of the
    mean-equation residuals (unconditional variance when that is
    degenerate). X holds the exogenous mean regressors, one column per
    entry of params.betas; pass None when there are none.
    """
    yv = np.asarray(y, dtype=np.float64).ravel()
    xm = _as_exog(X, yv.size, params.betas.size)
    if distribution == "student_t" and params.nu is None:
        raise InputError("student_t likelihood requires params.nu")
    ll = _raw_loglike(
        yv, xm, distribution, params.mu, params.betas,
        params.alpha0, params.alpha1, params.beta1, params.nu,
    )
    if not math.isfinite(ll):
        raise NumericalError("non-finite likelihood at these parameters")
    return ll


def _as_exog(X, n_obs: int, n_betas: int) -> Optional[np.ndarray]:
    if X is None:
        if n_betas:
            raise InputError("params have betas but X is None")
        return None
    x = np.asarray(X, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] != n_obs:
        raise InputError("X row count must match y")
    if x.shape[1] != n_betas:
        raise InputError("X column count must match the number of betas")
    return x if x.size else None


# --- estimation -----------------------------------------------------------

def _encode(mean: np.ndarray, a0: float, a1: float, b1: float, nu: Optional[float]) -> np.ndarray:
    s = a1 + b1
    u = [
        *mean,
        math.log(a0),
        float(logit(min(max(s / PERSISTENCE_CAP, 1e-12), 1.0 - 1e-12))),
        float(logit(min(max(a1 / s, 1e-12), 1.0 - 1e-12))) if s > 0.0 else 0.0,
    ]
    if nu is not None:
        u.append(math.log(max(nu - NU_FLOOR, 1e-8)))
    return np.array(u, dtype=np.float64)


def _decode(u: np.ndarray, n_mean: int, student_t: bool):
    mean = u[:n_mean]
    a0 = math.exp(u[n_mean])
    s = PERSISTENCE_CAP * float(expit(u[n_mean + 1]))
    a1 = s * float(expit(u[n_mean + 2]))
    b1 = s - a1
    nu = NU_FLOOR + math.exp(u[n_mean + 3]) if student_t else None
    return mean, a0, a1, b1, nu


def _multistart_points(base: np.ndarray, seeds: Sequence[int], mean_scale: float, n_mean: int) -> list[np.ndarray]:
    starts = [base]
    for seed in seeds[1:]:
        rng = np.random.default_rng(seed)
        step = rng.normal(0.0, 0.3, size=base.size)
        step[:n_mean] = rng.normal(0.0, 0.1 * mean_scale, size=n_mean)
        starts.append(base + step)
    return starts


def fit(
    y,
    X=None,
    distribution: str = "normal",
    mode: str = "joint",
    seeds: Sequence[int] = DEFAULT_MULTISTART_SEEDS,
) -> GarchFit:
    """Maximum-likelihood GARCH(1,1) fit.

    joint mode maximises over (mu, betas, alpha0, alpha1, beta1[, nu])
    simultaneously; two_step fixes the mean at its OLS estimate and
    maximises the variance-parameter likelihood on the OLS residuals.
    Optimization runs on transformed coordinates (log alpha0, a bounded
    persistence split for alpha1/beta1, shifted log for nu-2) with
    deterministic multi-starts. When the search fails to converge the
    best point found is returned with converged=False rather than raised.
    Standard errors come from a finite-difference Hessian in natural
    parameter space and are omitted when it is not positive definite.
    """
    if distribution not in ("normal", "student_t"):
        raise InputError(f"unknown distribution {distribution!r}")
    if mode not in ("joint", "two_step"):
        raise InputError(f"unknown mode {mode!r}")
    if not seeds:
        raise InputError("need at least one multi-start seed")
    yv = np.asarray(y, dtype=np.float64).ravel()
    if yv.size < 30:
        raise InputError(f"fit needs at least 30 observations, got {yv.size}")
    xm = None
    if X is not None:
        xm = np.asarray(X, dtype=np.float64)
        if xm.ndim == 1:
            xm = xm[:, None]
        if xm.shape[0] != yv.size:
            raise InputError("X row count must match y")
        if xm.shape[1] == 0:
            xm = None
    n_exog = 0 if xm is None else xm.shape[1]
    student_t = distribution == "student_t"

    # Mean-equation start from OLS; rank problems surface here.
    mean_fit = ols_fit(yv, design_matrix(xm) if xm is not None else np.ones((yv.size, 1)))
    mean0 = np.asarray(mean_fit.coefficients, dtype=np.float64)
    resid0 = mean_fit.residuals
    resid_var = float(np.var(resid0, ddof=1))
    if not (math.isfinite(resid_var) and resid_var > 0.0):
        raise NumericalError("mean-equation residuals have no variance")

    # Moment-based variance start: modest ARCH, high persistence, alpha0
    # from variance targeting, nu = 8 for heavy tails.
    a1_0, b1_0 = 0.05, 0.85
    a0_0 = resid_var * (1.0 - a1_0 - b1_0)
    nu_0 = 8.0 if student_t else None

    n_mean = 1 + n_exog
    mean_scale = math.sqrt(resid_var)

    if mode == "joint":
        base = _encode(mean0, a0_0, a1_0, b1_0, nu_0)

        def objective(u: np.ndarray) -> float:
            mean, a0, a1, b1, nu = _decode(u, n_mean, student_t)
            if not (math.isfinite(a0) and a0 > 0.0):
                return _PENALTY
            ll = _raw_loglike(yv, xm, distribution, mean[0], mean[1:], a0, a1, b1, nu)
            return -ll if math.isfinite(ll) else _PENALTY

    else:  # two_step: mean frozen at OLS, variance likelihood on its residuals
        base = _encode(np.empty(0), a0_0, a1_0, b1_0, nu_0)

        def objective(u: np.ndarray) -> float:
            _, a0, a1, b1, nu = _decode(u, 0, student_t)
            if not (math.isfinite(a0) and a0 > 0.0):
                return _PENALTY
            ll = _raw_loglike(resid0, None, distribution, 0.0, np.empty(0), a0, a1, b1, nu)
            return -ll if math.isfinite(ll) else _PENALTY

    starts = _multistart_points(base, list(seeds), mean_scale, n_mean if mode == "joint" else 0)
    best = None
    for u0 in starts:
        res = minimize(
            objective,
            u0,
            method="Nelder-Mead",
            options={
                "xatol": 1e-5,
                "fatol": 1e-7,
                "maxiter": 4000,
                "maxfev": 6000,
            },
        )
        if best is None or res.fun < best.fun:
            best = res
    assert best is not None

    decode_dim = n_mean if mode == "joint" else 0
    mean_u, a0, a1, b1, nu = _decode(best.x, decode_dim, student_t)
    if mode == "joint":
        mu, betas = float(mean_u[0]), np.asarray(mean_u[1:], dtype=np.float64)
    else:
        mu, betas = float(mean0[0]), np.asarray(mean0[1:], dtype=np.float64)

    converged = bool(best.success and best.fun < _PENALTY)
    try:
        params = GarchParams(mu=mu, betas=betas, alpha0=a0, alpha1=a1, beta1=b1, nu=nu)
    except InputError as exc:
        raise NumericalError(f"optimizer returned invalid parameters: {exc}") from exc

    eps = _mean_residuals(yv, xm, mu, betas)
    path = _variance_path(a0, a1, b1, eps, _sigma2_init(eps, a0, a1, b1))
    ll = -float(best.fun) if best.fun < _PENALTY else -math.inf

    std_errors = _hessian_std_errors(yv, xm, distribution, mode, params, mean_fit)
    return GarchFit(
        params=params,
        distribution=distribution,
        variance_path=path,
        log_likelihood=ll,
        converged=converged,
        iterations=int(best.nit),
        std_errors=std_errors,
        mode=mode,
    )


def _natural_vector(params: GarchParams) -> np.ndarray:
    theta = [params.mu, *params.betas, params.alpha0, params.alpha1, params.beta1]
    if params.nu is not None:
        theta.append(params.nu)
    return np.array(theta, dtype=np.float64)


def _hessian_std_errors(
    yv: np.ndarray,
    xm: Optional[np.ndarray],
    distribution: str,
    mode: str,
    params: GarchParams,
    mean_fit,
) -> Optional[np.ndarray]:
    n_mean = 1 + params.betas.size
    theta = _natural_vector(params)

    def negll(vec: np.ndarray) -> float:
        nu = vec[-1] if params.nu is not None else None
        k = vec.size - (1 if params.nu is not None else 0)
        ll = _raw_loglike(
            yv, xm, distribution, vec[0], vec[1:n_mean],
            vec[n_mean], vec[n_mean + 1], vec[n_mean + 2], nu,
        )
        return -ll if math.isfinite(ll) else math.nan

    if mode == "joint":
        free = np.arange(theta.size)
    else:
        free = np.arange(n_mean, theta.size)

    hess = _finite_difference_hessian(negll, theta, free)
    if hess is None:
        return None
    try:
        cov = np.linalg.inv(hess)
    except np.linalg.LinAlgError:
        return None
    diag = np.diag(cov)
    if np.any(diag <= 0.0) or not np.all(np.isfinite(diag)):
        return None
    se_free = np.sqrt(diag)
    out = np.full(theta.size, np.nan)
    out[free] = se_free
    if mode == "two_step":
        # Mean-block uncertainty comes from the OLS stage in two-step mode.
        out[:n_mean] = mean_fit.std_errors
    return out


def _finite_difference_hessian(func, theta: np.ndarray, free: np.ndarray) -> Optional[np.ndarray]:
    """Central-difference Hessian restricted to the free coordinates;
    None when any entry is non-finite or the matrix is not positive definite."""
    steps = 1e-4 * np.maximum(np.abs(theta), 1e-3)
    m = free.size
    hess = np.empty((m, m), dtype=np.float64)
    f0 = func(theta)
    if not math.isfinite(f0):
        return None
    for a in range(m):
        i = free[a]
        hi = steps[i]
        for b in range(a, m):
            j = free[b]
            hj = steps[j]
            if i == j:
                tp = theta.copy(); tp[i] += hi
                tm = theta.copy(); tm[i] -= hi
                val = (func(tp) - 2.0 * f0 + func(tm)) / (hi * hi)
            else:
                tpp = theta.copy(); tpp[i] += hi; tpp[j] += hj
                tpm = theta.copy(); tpm[i] += hi; tpm[j] -= hj
                tmp = theta.copy(); tmp[i] -= hi; tmp[j] += hj
                tmm = theta.copy(); tmm[i] -= hi; tmm[j] -= hj
                val = (func(tpp) - func(tpm) - func(tmp) + func(tmm)) / (4.0 * hi * hj)
            if not math.isfinite(val):
                return None
            hess[a, b] = val
            hess[b, a] = val
    try:
        np.linalg.cholesky(hess)
    except np.linalg.LinAlgError:
        return None
    return hess


def simulate(
    params: GarchParams,
    exog=None,
    T: int = 1000,
    seed: int = 0,
    distribution: str = "normal",
) -> tuple[np.ndarray, np.ndarray]:
    """Draw (y, sigma2) paths of length T, deterministic given seed.

    Innovations are standard normal or standardized Student-t (scaled by
    sqrt((nu-2)/nu) so they have unit variance); the variance recursion
    starts at the unconditional variance.
    """
    if T < 1:
        raise InputError("T must be >= 1")
    if distribution not in ("normal", "student_t"):
        raise InputError(f"unknown distribution {distribution!r}")
    if distribution == "student_t" and params.nu is None:
        raise InputError("student_t simulation requires params.nu")
    xm = _as_exog(exog, T, params.betas.size) if params.betas.size else None
    rng = np.random.default_rng(seed)
    if distribution == "normal":
        z = rng.standard_normal(T)
    else:
        z = rng.standard_t(params.nu, size=T) * math.sqrt((params.nu - 2.0) / params.nu)

    mean = np.full(T, params.mu)
    if xm is not None:
        mean += xm @ params.betas

    a0, a1, b1 = params.alpha0, params.alpha1, params.beta1
    sigma2 = np.empty(T, dtype=np.float64)
    y = np.empty(T, dtype=np.float64)
    s2 = params.unconditional_variance
    for t in range(T):
        sigma2[t] = s2
        eps = math.sqrt(s2) * z[t]
        y[t] = mean[t] + eps
        s2 = a0 + a1 * eps * eps + b1 * s2
    return y, sigma2


def standardized_residuals(fit_result: GarchFit, y, X=None) -> np.ndarray:
    """z_t = eps_t / sigma_t using the fitted variance path."""
    yv = np.asarray(y, dtype=np.float64).ravel()
    if yv.size != fit_result.variance_path.size:
        raise InputError("y length must match the fitted variance path")
    xm = _as_exog(X, yv.size, fit_result.params.betas.size)
    eps = _mean_residuals(yv, xm, fit_result.params.mu, fit_result.params.betas)
    return eps / np.sqrt(fit_result.variance_path)


def qq_data(values, reference: str = "normal", nu: Optional[float] = None) -> np.ndarray:
    """(theoretical, empirical) quantile pairs for a Q-Q plot.

    Empirical quantiles are the sorted values; theoretical quantiles sit
    at plotting positions (i - 0.5)/n of the reference inverse CDF. The
    student_t reference is standardized to unit variance, matching the
    model's innovations.
    """
    v = np.sort(np.asarray(values, dtype=np.float64).ravel())
    n = v.size
    if n < 3:
        raise InputError("qq_data needs at least 3 values")
    p = (np.arange(1, n + 1) - 0.5) / n
    if reference == "normal":
        theo = stats.norm.ppf(p)
    elif reference == "student_t":
        if nu is None or not nu > 2.0:
            raise InputError("student_t reference requires nu > 2")
        theo = stats.t.ppf(p, nu) * math.sqrt((nu - 2.0) / nu)
    else:
        raise InputError(f"unknown reference {reference!r}")
    return np.column_stack([theo, v])
