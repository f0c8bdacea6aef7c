"""Tests for the GARCH(1,1) model: recursion, densities, likelihood,
estimation, simulation, and residual diagnostics."""

import math

import numpy as np
import pytest
from scipy import integrate, stats

from sentivol.errors import InputError, NumericalError
from sentivol.garch import (
    GarchFit,
    GarchParams,
    fit,
    log_likelihood,
    qq_data,
    simulate,
    standardized_residuals,
    student_t_logpdf,
    variance_recursion,
)


def params(mu=0.0, betas=(), alpha0=0.1, alpha1=0.1, beta1=0.8, nu=None):
    return GarchParams(
        mu=mu, betas=np.asarray(betas, dtype=float), alpha0=alpha0, alpha1=alpha1,
        beta1=beta1, nu=nu,
    )


class TestGarchParams:
    def test_rejects_nonpositive_alpha0(self):
        with pytest.raises(InputError):
            params(alpha0=0.0)

    def test_rejects_explosive_persistence(self):
        with pytest.raises(InputError):
            params(alpha1=0.5, beta1=0.5)

    def test_rejects_small_nu(self):
        with pytest.raises(InputError):
            params(nu=2.0)

    def test_unconditional_variance(self):
        p = params(alpha0=0.1, alpha1=0.1, beta1=0.8)
        assert p.unconditional_variance == pytest.approx(1.0)


class TestVarianceRecursion:
    def test_no_feedback(self):
        p = params(alpha0=0.3, alpha1=0.0, beta1=0.0)
        out = variance_recursion(p, [0.5, 0.5, 0.5, 0.5], sigma2_init=2.0)
        np.testing.assert_allclose(out, [2.0, 0.3, 0.3, 0.3])

    def test_hand_recursion(self):
        """0.1 + 0.2*1 + 0.7*1 = 1.0, then 0.1 + 0.2*4 + 0.7*1 = 1.6."""
        p = params(alpha0=0.1, alpha1=0.2, beta1=0.7)
        out = variance_recursion(p, [1.0, -2.0], sigma2_init=1.0)
        np.testing.assert_allclose(out, [1.0, 1.0])
        out3 = variance_recursion(p, [1.0, -2.0, 0.0], sigma2_init=1.0)
        np.testing.assert_allclose(out3, [1.0, 1.0, 1.6])

    def test_matches_python_loop_oracle(self):
        rng = np.random.default_rng(1)
        eps = rng.standard_normal(300)
        p = params(alpha0=0.05, alpha1=0.12, beta1=0.8)
        out = variance_recursion(p, eps, sigma2_init=0.7)
        expected = np.empty(300)
        expected[0] = 0.7
        for t in range(1, 300):
            expected[t] = 0.05 + 0.12 * eps[t - 1] ** 2 + 0.8 * expected[t - 1]
        np.testing.assert_allclose(out, expected, rtol=1e-12)

    def test_near_unit_persistence_approaches_fixed_point(self):
        """With constant eps^2 = 1 the recursion contracts monotonically
        toward its fixed point (alpha0 + alpha1)/(1 - beta1)."""
        p = params(alpha0=0.1, alpha1=0.499, beta1=0.5)
        eps = np.ones(4000)
        out = variance_recursion(p, eps, sigma2_init=5.0)
        fixed_point = (0.1 + 0.499) / (1.0 - 0.5)
        diffs = np.abs(out - fixed_point)
        assert np.all(np.diff(diffs[:100]) <= 0)
        assert out[-1] == pytest.approx(fixed_point, rel=1e-9)

    def test_strictly_positive_output(self):
        rng = np.random.default_rng(2)
        p = params(alpha0=1e-8, alpha1=0.3, beta1=0.6)
        out = variance_recursion(p, rng.standard_normal(500), sigma2_init=1e-8)
        assert np.all(out > 0.0)

    def test_rejects_nonpositive_init(self):
        with pytest.raises(InputError):
            variance_recursion(params(), [1.0], sigma2_init=0.0)


class TestStudentTLogpdf:
    def test_center_value_matches_gamma_oracle(self):
        """f(0; 1, 5) = gamma(3) / (gamma(2.5) * sqrt(3*pi))."""
        expected = math.gamma(3.0) / (math.gamma(2.5) * math.sqrt(3.0 * math.pi))
        assert math.exp(student_t_logpdf(0.0, 1.0, 5.0)) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.490070, abs=1e-6)

    def test_large_nu_approaches_normal(self):
        normal_center = 1.0 / math.sqrt(2.0 * math.pi)
        value = math.exp(student_t_logpdf(0.0, 1.0, 200.0))
        assert abs(value - normal_center) / normal_center < 0.005

    def test_even_in_eps(self):
        for x in (0.3, 1.7, 4.2):
            assert student_t_logpdf(x, 2.0, 6.0) == pytest.approx(
                student_t_logpdf(-x, 2.0, 6.0), abs=1e-14
            )

    def test_integrates_to_one_and_variance_sigma2(self):
        """Adaptive quadrature over the nu x sigma2 grid."""
        for nu in (3.0, 5.0, 10.0, 30.0):
            for s2 in (0.5, 1.0, 4.0):
                pdf = lambda x: math.exp(student_t_logpdf(x, s2, nu))
                total, _ = integrate.quad(pdf, -np.inf, np.inf, limit=200)
                var, _ = integrate.quad(lambda x: x * x * pdf(x), -np.inf, np.inf, limit=200)
                assert total == pytest.approx(1.0, abs=1e-6)
                assert var == pytest.approx(s2, abs=1e-6 * max(1.0, s2))

    def test_rejects_bad_domain(self):
        with pytest.raises(InputError):
            student_t_logpdf(0.0, 1.0, 2.0)
        with pytest.raises(InputError):
            student_t_logpdf(0.0, 0.0, 5.0)

    def test_vectorized(self):
        out = student_t_logpdf(np.array([0.0, 1.0]), np.array([1.0, 2.0]), 5.0)
        assert out.shape == (2,)


class TestLogLikelihood:
    def test_two_zero_observations(self):
        """Degenerate residual variance falls back to the unconditional
        variance 1.0, making the total exactly -log(2*pi)."""
        p = params(alpha0=1.0, alpha1=0.0, beta1=0.0)
        ll = log_likelihood(p, [0.0, 0.0], None, "normal")
        assert ll == pytest.approx(-math.log(2.0 * math.pi), abs=1e-12)

    def test_student_t_limits_to_normal(self):
        rng = np.random.default_rng(3)
        y = rng.standard_normal(200)
        pn = params(alpha0=0.2, alpha1=0.05, beta1=0.9)
        pt = params(alpha0=0.2, alpha1=0.05, beta1=0.9, nu=10000.0)
        ll_n = log_likelihood(pn, y, None, "normal")
        ll_t = log_likelihood(pt, y, None, "student_t")
        assert ll_t == pytest.approx(ll_n, abs=1e-3 * abs(ll_n))

    def test_true_params_beat_perturbed_on_simulated_data(self):
        wins = 0
        true = params(alpha0=0.1, alpha1=0.1, beta1=0.8)
        worse = params(alpha0=0.1, alpha1=0.3, beta1=0.6)
        for seed in range(7):
            y, _ = simulate(true, T=4000, seed=seed, distribution="normal")
            if log_likelihood(true, y, None, "normal") > log_likelihood(worse, y, None, "normal"):
                wins += 1
        assert wins >= 5

    def test_requires_nu_for_student_t(self):
        with pytest.raises(InputError):
            log_likelihood(params(), [0.0, 1.0], None, "student_t")

    def test_exog_shape_checked(self):
        p = params(betas=(0.5,))
        with pytest.raises(InputError):
            log_likelihood(p, [0.0, 1.0], None, "normal")


class TestSimulate:
    def test_constant_variance_matches_alpha0(self):
        p = params(alpha0=0.25, alpha1=0.0, beta1=0.0, mu=1.0)
        y, sigma2 = simulate(p, T=10000, seed=4, distribution="normal")
        np.testing.assert_allclose(sigma2, 0.25)
        assert np.var(y - 1.0) == pytest.approx(0.25, rel=0.05)

    def test_deterministic_given_seed(self):
        p = params(nu=6.0)
        y1, s1 = simulate(p, T=500, seed=9, distribution="student_t")
        y2, s2 = simulate(p, T=500, seed=9, distribution="student_t")
        np.testing.assert_array_equal(y1, y2)
        np.testing.assert_array_equal(s1, s2)

    def test_student_t_has_fatter_tails(self):
        pt = params(nu=5.0)
        pn = params()
        yt, _ = simulate(pt, T=20000, seed=5, distribution="student_t")
        yn, _ = simulate(pn, T=20000, seed=5, distribution="normal")
        assert stats.kurtosis(yt) > stats.kurtosis(yn)

    def test_exog_mean_shift(self):
        p = params(betas=(2.0,), alpha0=0.01, alpha1=0.0, beta1=0.0)
        exog = np.ones((100, 1))
        y, _ = simulate(p, exog=exog, T=100, seed=6, distribution="normal")
        assert y.mean() == pytest.approx(2.0, abs=0.1)

    def test_rejects_bad_T(self):
        with pytest.raises(InputError):
            simulate(params(), T=0, seed=0)


class TestFit:
    def test_recovers_simulated_parameters(self):
        true = params(alpha0=0.1, alpha1=0.1, beta1=0.8, nu=8.0)
        y, _ = simulate(true, T=5000, seed=2, distribution="student_t")
        res = fit(y, None, distribution="student_t", mode="joint")
        assert res.converged
        assert res.params.alpha1 + res.params.beta1 == pytest.approx(0.9, abs=0.05)
        assert res.params.nu == pytest.approx(8.0, abs=3.0)

    def test_iid_normal_data_yields_tiny_arch(self):
        hits = 0
        for seed in range(5):
            rng = np.random.default_rng(seed)
            y = 0.3 * rng.standard_normal(3000)
            res = fit(y, None, distribution="normal", mode="joint")
            sample_var = float(np.var(y, ddof=1))
            ok = res.params.alpha1 <= 0.05 and (
                abs(res.params.unconditional_variance - sample_var) <= 0.1 * sample_var
            )
            hits += ok
        assert hits >= 3

    def test_location_equivariance(self):
        true = params(alpha0=0.1, alpha1=0.1, beta1=0.8)
        y, _ = simulate(true, T=2000, seed=7, distribution="normal")
        base = fit(y, None, distribution="normal", mode="joint")
        shifted = fit(y + 3.0, None, distribution="normal", mode="joint")
        assert shifted.params.mu == pytest.approx(base.params.mu + 3.0, abs=1e-2)
        assert shifted.params.alpha1 == pytest.approx(base.params.alpha1, abs=1e-3)
        assert shifted.params.beta1 == pytest.approx(base.params.beta1, abs=1e-3)

    def test_deterministic_given_seed_list(self):
        true = params(alpha0=0.1, alpha1=0.1, beta1=0.8)
        y, _ = simulate(true, T=1200, seed=8, distribution="normal")
        a = fit(y, None, distribution="normal", mode="joint", seeds=(0, 1, 2))
        b = fit(y, None, distribution="normal", mode="joint", seeds=(0, 1, 2))
        assert a.log_likelihood == b.log_likelihood
        assert (a.params.mu, a.params.alpha0, a.params.alpha1, a.params.beta1) == (
            b.params.mu, b.params.alpha0, b.params.alpha1, b.params.beta1
        )

    def test_fitted_ll_not_worse_than_truth(self):
        """The optimum must not fall below a feasible point it was seeded near."""
        true = params(alpha0=0.1, alpha1=0.1, beta1=0.8)
        for seed in (1, 2, 3):
            y, _ = simulate(true, T=3000, seed=seed, distribution="normal")
            res = fit(y, None, distribution="normal", mode="joint")
            if res.converged:
                ll_true = log_likelihood(true, y, None, "normal")
                assert res.log_likelihood >= ll_true - 1e-6

    def test_two_step_matches_ols_mean(self):
        from sentivol.regress import design_matrix, ols_fit

        true = params(mu=0.5, betas=(1.5,), alpha0=0.1, alpha1=0.1, beta1=0.8)
        # exog seed must differ from the simulation seed: identical seeds
        # would make the innovations equal the exog column draw for draw
        exog = np.random.default_rng(1010).standard_normal((1500, 1))
        y, _ = simulate(true, exog=exog, T=1500, seed=10, distribution="normal")
        res = fit(y, exog, distribution="normal", mode="two_step")
        ols = ols_fit(y, design_matrix(exog))
        assert res.mode == "two_step"
        assert res.params.mu == pytest.approx(ols.coefficients[0], abs=1e-12)
        assert res.params.betas[0] == pytest.approx(ols.coefficients[1], abs=1e-12)

    def test_exogenous_betas_recovered(self):
        true = params(mu=0.2, betas=(1.0,), alpha0=0.05, alpha1=0.1, beta1=0.8)
        exog = np.random.default_rng(1011).standard_normal((3000, 1))
        y, _ = simulate(true, exog=exog, T=3000, seed=11, distribution="normal")
        res = fit(y, exog, distribution="normal", mode="joint")
        assert res.params.betas[0] == pytest.approx(1.0, abs=0.05)

    def test_needs_thirty_observations(self):
        with pytest.raises(InputError, match="30"):
            fit(np.zeros(10), None)

    def test_std_errors_length_matches_params(self):
        true = params(alpha0=0.1, alpha1=0.1, beta1=0.8)
        y, _ = simulate(true, T=2000, seed=12, distribution="normal")
        res = fit(y, None, distribution="normal", mode="joint")
        if res.std_errors is not None:
            assert len(res.std_errors) == 4  # mu, alpha0, alpha1, beta1


class TestStandardizedResiduals:
    def test_constant_variance_scaling(self):
        path = np.full(50, 4.0)
        p = params(alpha0=4.0, alpha1=0.0, beta1=0.0)
        gf = GarchFit(
            params=p, distribution="normal", variance_path=path,
            log_likelihood=-1.0, converged=True, iterations=1, std_errors=None,
            mode="joint",
        )
        y = np.linspace(-1.0, 1.0, 50)
        z = standardized_residuals(gf, y)
        np.testing.assert_allclose(z, y / 2.0)

    def test_unit_variance_on_well_specified_data(self):
        true = params(alpha0=0.1, alpha1=0.1, beta1=0.8)
        y, _ = simulate(true, T=5000, seed=13, distribution="normal")
        res = fit(y, None, distribution="normal", mode="joint")
        z = standardized_residuals(res, y)
        assert z.size == y.size
        assert 0.9 <= float(np.var(z)) <= 1.1


class TestQqData:
    def test_normal_quantiles_on_identity_line(self):
        n = 101
        values = stats.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
        pairs = qq_data(values, reference="normal")
        np.testing.assert_allclose(pairs[:, 0], pairs[:, 1], atol=1e-9)

    def test_median_pair_zero_for_odd_n(self):
        rng = np.random.default_rng(14)
        pairs = qq_data(rng.standard_normal(101), reference="normal")
        assert pairs[50, 0] == pytest.approx(0.0, abs=1e-12)
        pairs_t = qq_data(rng.standard_normal(101), reference="student_t", nu=5.0)
        assert pairs_t[50, 0] == pytest.approx(0.0, abs=1e-12)

    def test_heavy_tailed_sample_exceeds_normal_reference(self):
        p = params(nu=4.0)
        y, _ = simulate(p, T=5000, seed=15, distribution="student_t")
        pairs = qq_data(y / y.std(), reference="normal")
        assert pairs[-1, 1] > pairs[-1, 0]

    def test_needs_three_values(self):
        with pytest.raises(InputError):
            qq_data([1.0, 2.0])

    def test_student_t_reference_needs_nu(self):
        with pytest.raises(InputError):
            qq_data([1.0, 2.0, 3.0], reference="student_t")
