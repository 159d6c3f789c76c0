import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import real_sample
from koon_gphcs.censoring import CensoringPlan, GphcsSample, generate_gphcs
from koon_gphcs.errors import DomainError, InsufficientInformationError, UnstableCovarianceError
from koon_gphcs.frequentist import (FitResult, IntervalEstimate, SolverOptions, aci_param,
                                    aci_reliability, delta_variance, fit, ks_test,
                                    log_likelihood, mle_system_reliability, observed_info,
                                    profile_beta, score, z_value)
from koon_gphcs.koon import SystemSpec, system_reliability
from koon_gphcs.mcsim import build_scheme
from koon_gphcs.weibull import WeibullParams, quantile, reliability

P = WeibullParams(1.5, 1.0)
SPEC = SystemSpec(5, 3)

Z_05 = 1.95996398454005423552459443052
Z_01 = 2.57582930354890076098532122692
# Kolmogorov survival function at 1.36 from the alternating series, 40 terms
KOLMOGOROV_136 = 0.0494858767553779


def random_sample(seed, n=None, scheme=None, p=P):
    gen = np.random.default_rng(seed)
    n = n or int(gen.integers(12, 60))
    m = int(gen.integers(max(4, n // 3), n))
    k = int(gen.integers(2, m))
    if scheme is None:
        scheme = str(gen.choice(["I", "II", "III"] if 2 * m >= n else ["I", "II"]))
    T = float(quantile(p, float(gen.uniform(0.2, 0.9))))
    plan = CensoringPlan(n, m, k, T, build_scheme(scheme, n, m))
    return generate_gphcs(plan, p, gen)


def product_form_loglik(s, p):
    total = 0.0
    for x, r in zip(s.times, s.removals):
        total += math.log(p.alpha * p.beta * x ** (p.alpha - 1) * math.exp(-p.beta * x**p.alpha))
        total += r * math.log(reliability(p, float(x)))
    total += s.r_star * -p.beta * s.t_star**p.alpha
    return total


def fd(fn, x, h):
    return (fn(x + h) - fn(x - h)) / (2 * h)


def scaled(s, c):
    return GphcsSample(times=s.times * c, removals=s.removals, t_star=s.t_star * c,
                       r_star=s.r_star, case=s.case, n=s.n, m=s.m, k=s.k, T=s.T * c)


def newton_2d(s, start):
    """Joint Newton on the two score equations, in log-parameters."""
    theta = np.log([start.alpha, start.beta])
    for _ in range(200):
        p = WeibullParams(*np.exp(theta))
        g = np.array(score(s, p)) * np.exp(theta)
        if np.max(np.abs(g)) < 1e-13:
            break
        h = -observed_info(s, p) * np.outer(np.exp(theta), np.exp(theta))
        h[np.diag_indices(2)] += g
        step = np.linalg.solve(h, -g)
        theta = theta + np.clip(step, -1.0, 1.0)
    return WeibullParams(*np.exp(theta))


single = GphcsSample(times=[1.0], removals=[0], t_star=1.0, r_star=0, case="I",
                     n=1, m=1, k=1, T=1.0)


def test_loglik_single_observation():
    assert log_likelihood(single, WeibullParams(1, 1)) == -1.0


@pytest.mark.parametrize("seed", range(20))
def test_loglik_matches_product_form(seed):
    s = random_sample(seed)
    gen = np.random.default_rng(seed + 100)
    p = WeibullParams(float(gen.uniform(0.3, 3)), float(gen.uniform(0.2, 3)))
    assert log_likelihood(s, p) == pytest.approx(product_form_loglik(s, p), rel=1e-10,
                                                 abs=1e-10)


def test_loglik_decreases_in_large_beta():
    s = real_sample("I")
    vals = [log_likelihood(s, WeibullParams(0.9, b)) for b in (1.0, 10.0, 100.0, 1000.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_loglik_rejects_bad_params():
    with pytest.raises(DomainError):
        log_likelihood(single, WeibullParams(-1, 1))


@pytest.mark.parametrize("alpha", [0.2, 0.7, 1.5, 5.0])
@pytest.mark.parametrize("seed", range(5))
def test_score_and_hessian_finite_differences(alpha, seed):
    s = random_sample(seed)
    beta = 0.8
    h_a, h_b = 1e-6 * max(1, alpha), 1e-6 * max(1, beta)
    d_a, d_b = score(s, WeibullParams(alpha, beta))
    ll = lambda a, b: log_likelihood(s, WeibullParams(a, b))
    assert d_a == pytest.approx(fd(lambda a: ll(a, beta), alpha, h_a), rel=1e-6, abs=1e-6)
    assert d_b == pytest.approx(fd(lambda b: ll(alpha, b), beta, h_b), rel=1e-6, abs=1e-6)
    info = observed_info(s, WeibullParams(alpha, beta))
    sc = lambda a, b: np.array(score(s, WeibullParams(a, b)))
    h = 1e-5
    col_a = fd(lambda a: sc(a, beta), alpha, h * alpha)
    col_b = fd(lambda b: sc(alpha, b), beta, h * beta)
    hess = np.column_stack([col_a, col_b])
    np.testing.assert_allclose(-info, hess, rtol=1e-4, atol=1e-6 * np.max(np.abs(hess)))


def test_score_examples():
    s = real_sample("I")
    b = profile_beta(s, 0.9)
    assert score(s, WeibullParams(0.9, b))[1] == pytest.approx(0.0, abs=1e-12 * s.D / b)
    c = GphcsSample.complete([0.5, 1.0, 2.5])
    assert score(c, WeibullParams(1.0, 0.3))[1] == pytest.approx(3 / 0.3 - 4.0, rel=1e-14)
    assert profile_beta(c, 1.0) == pytest.approx(3 / 4.0)


def test_profile_beta_examples():
    s = GphcsSample(times=[2.0], removals=[0], t_star=2.0, r_star=0, case="I",
                    n=1, m=1, k=1, T=2.0)
    assert profile_beta(s, 1.0) == 0.5
    assert profile_beta(real_sample("I"), 0.8965) == pytest.approx(0.0230, rel=0.01)


def test_observed_info_examples():
    s = real_sample("I")
    assert observed_info(s, WeibullParams(0.9, 1.0))[1, 1] == s.D
    res = fit(s)
    assert np.all(np.linalg.eigvalsh(res.info_observed) > 0)


def test_fit_real_setting_one():
    res = fit(real_sample("I"))
    assert res.alpha_hat == pytest.approx(0.8965, rel=0.01)
    assert res.beta_hat == pytest.approx(0.0230, rel=0.01)
    assert mle_system_reliability(res, SPEC, 50.0) == pytest.approx(0.4309, rel=0.01)
    assert mle_system_reliability(res, SPEC, 0.0) == 1.0
    assert mle_system_reliability(res, SPEC, 50.0) == system_reliability(
        SPEC, res.params_hat, 50.0)


@pytest.mark.parametrize("seed", range(100))
def test_profile_agrees_with_joint_newton(seed):
    s = random_sample(seed)
    res = fit(s)
    start = WeibullParams(res.alpha_hat * 1.2, res.beta_hat * 0.8)
    joint = newton_2d(s, start)
    assert joint.alpha == pytest.approx(res.alpha_hat, rel=1e-6)
    assert joint.beta == pytest.approx(res.beta_hat, rel=1e-6)


@pytest.mark.parametrize("seed", range(30))
def test_fit_result_invariants(seed):
    res = fit(random_sample(seed))
    s_a, s_b = score(random_sample(seed), res.params_hat)
    assert math.hypot(res.alpha_hat * s_a, res.beta_hat * s_b) < 1e-8
    assert res.grad_norm < 1e-8
    cov = res.covariance
    assert cov[0, 1] == cov[1, 0] and cov[0, 0] > 0 and cov[1, 1] > 0
    np.testing.assert_allclose(res.info_observed @ cov, np.eye(2), atol=1e-8)


@pytest.mark.parametrize("c", [10.0, 0.01, 3.7])
def test_fit_scale_equivariance(c):
    s = real_sample("II")
    a, b = fit(s), fit(scaled(s, c))
    assert b.alpha_hat == pytest.approx(a.alpha_hat, abs=1e-8)
    assert b.beta_hat == pytest.approx(a.beta_hat * c ** (-a.alpha_hat), rel=1e-8)


def test_fit_consistency_exponential():
    gen = np.random.default_rng(77)
    alphas, betas = [], []
    for _ in range(500):
        res = fit(GphcsSample.complete(gen.exponential(1 / 2.0, size=200)))
        alphas.append(res.alpha_hat)
        betas.append(res.beta_hat)
    # standard error of the mean of 500 fits is about 0.0025 for alpha
    assert np.mean(alphas) == pytest.approx(1.0, abs=0.015)
    assert np.mean(betas) == pytest.approx(2.0, abs=0.05)


def test_fit_insufficient_information():
    with pytest.raises(InsufficientInformationError):
        fit(single)
    with pytest.raises(InsufficientInformationError):
        fit(GphcsSample.complete([2.0, 2.0, 2.0]))


def test_fit_result_round_trip():
    res = fit(real_sample("I"))
    rec = res.to_dict()
    assert set(rec) >= {"alpha_hat", "beta_hat", "var_alpha", "var_beta", "cov_ab",
                        "iterations", "grad_norm"}
    back = FitResult.from_dict(rec)
    assert back.alpha_hat == res.alpha_hat and back.var_beta == res.var_beta


def test_solver_honours_custom_start():
    s = real_sample("I")
    a = fit(s, SolverOptions(alpha0=15.0))
    assert a.alpha_hat == pytest.approx(fit(s).alpha_hat, rel=1e-10)


def test_z_values():
    assert z_value(0.05) == pytest.approx(Z_05, abs=1e-12)
    assert z_value(0.01) == pytest.approx(Z_01, abs=1e-12)
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(DomainError):
            z_value(bad)


def _zero_cov(res):
    return FitResult(res.params_hat, res.info_observed, np.zeros((2, 2)), res.iterations,
                     res.grad_norm)


def test_aci_degenerate():
    res = _zero_cov(fit(real_sample("I")))
    iv = aci_param(res, "alpha")
    assert iv.lower == iv.upper == res.alpha_hat
    rel = aci_reliability(res, SPEC, 50.0)
    assert rel.lower == rel.upper == pytest.approx(mle_system_reliability(res, SPEC, 50.0))


def test_aci_alpha_real_setting_one():
    iv = aci_param(fit(real_sample("I")), "alpha")
    assert iv.method == "ACI" and iv.level == 0.95
    assert iv.lower == pytest.approx(0.5276, abs=0.01)
    assert iv.upper == pytest.approx(1.2654, abs=0.01)


@pytest.mark.parametrize("seed", range(10))
def test_aci_width_ratio(seed):
    res = fit(random_sample(seed))
    for which in ("alpha", "beta"):
        ratio = aci_param(res, which, 0.01).width / aci_param(res, which, 0.05).width
        assert ratio == pytest.approx(2.5758 / 1.9600, abs=1e-3)
    ratio = aci_reliability(res, SPEC, 0.5, 0.01).width / aci_reliability(res, SPEC, 0.5).width
    assert ratio == pytest.approx(2.5758 / 1.9600, abs=1e-3)


def test_aci_reliability_clamps_and_keeps_raw():
    res = fit(real_sample("I"))
    iv = aci_reliability(res, SPEC, 50.0)
    assert 0.0 <= iv.lower <= iv.upper <= 1.0
    assert iv.method == "ACI-delta"
    wide = aci_reliability(res, SPEC, 50.0, gamma=0.001)
    assert wide.lower == max(wide.raw_lower, 0.0)
    assert wide.width == pytest.approx(wide.raw_upper - wide.raw_lower)


def test_delta_variance_matches_parametric_bootstrap():
    gen = np.random.default_rng(8)
    s = GphcsSample.complete((-np.log(gen.random(400)) / P.beta) ** (1 / P.alpha))
    res = fit(s)
    draws = gen.multivariate_normal([res.alpha_hat, res.beta_hat], res.covariance,
                                    size=100_000)
    draws = draws[(draws > 0).all(axis=1)]
    from koon_gphcs import _kernels
    vals = _kernels.active().system_reliability_draws(
        np.ascontiguousarray(draws[:, 0]), np.ascontiguousarray(draws[:, 1]), 0.5, 5, 3)
    assert delta_variance(res, SPEC, 0.5) == pytest.approx(np.var(vals), rel=0.10)


def test_unstable_covariance():
    res = fit(real_sample("I"))
    bad = FitResult(res.params_hat, res.info_observed, -np.eye(2), 1, 0.0)
    with pytest.raises(UnstableCovarianceError):
        aci_reliability(bad, SPEC, 50.0)


def test_interval_estimate_validation():
    with pytest.raises(DomainError):
        IntervalEstimate(2.0, 1.0, 0.95, "ACI")
    with pytest.raises(DomainError):
        IntervalEstimate(1.0, 2.0, 0.95, "other")
    iv = IntervalEstimate(0.0, 1.0, 0.95, "ACI-delta", -0.2, 1.1)
    assert iv.width == pytest.approx(1.3)
    assert set(iv.to_dict()) >= {"lower", "upper", "level", "method"}


def test_ks_quantile_grid():
    n = 25
    x = [quantile(P, (i - 0.5) / n) for i in range(1, n + 1)]
    assert ks_test(x, P).statistic == pytest.approx(0.5 / n, abs=1e-12)


def test_ks_kolmogorov_value():
    # construct a sample whose statistic is 1.36 / sqrt(n)
    n = 100
    res = ks_test([quantile(P, min((i - 0.5) / n + 0.136 - 0.005, 0.999))
                   for i in range(1, n + 1)], P)
    assert res.statistic == pytest.approx(0.136, abs=1e-9)
    assert res.p_value == pytest.approx(KOLMOGOROV_136, abs=1e-8)


def test_ks_real_data(aircon):
    res = fit(GphcsSample.complete(aircon))
    out = ks_test(aircon, res.params_hat)
    assert out.statistic == pytest.approx(0.153, abs=0.005)
    assert out.p_value == pytest.approx(0.481, abs=0.02)


def test_ks_empty():
    with pytest.raises(DomainError):
        ks_test([], P)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.05, 50.0))
def test_complete_fit_equivariance(seed, c):
    x = np.random.default_rng(seed).weibull(1.3, size=40) * 2.0
    a = fit(GphcsSample.complete(x))
    b = fit(GphcsSample.complete(x * c))
    assert b.alpha_hat == pytest.approx(a.alpha_hat, abs=1e-8)
    assert b.beta_hat == pytest.approx(a.beta_hat * c ** (-a.alpha_hat), rel=1e-8)
    assert ks_test(x * c, b.params_hat).statistic == pytest.approx(
        ks_test(x, a.params_hat).statistic, abs=1e-8)
