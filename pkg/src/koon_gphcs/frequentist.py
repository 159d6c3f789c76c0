"""Maximum likelihood for Weibull lifetimes under generalized progressive
hybrid censoring, Wald intervals, and the Kolmogorov-Smirnov check.

Up to an additive constant the log-likelihood is::

    l(alpha, beta) = D log alpha + D log beta + (alpha - 1) sum log x_i
                     - beta * W(alpha),
    W(alpha) = sum (R_i + 1) x_i**alpha + R* T***alpha

For fixed ``alpha`` the beta-score vanishes at ``beta = D / W(alpha)``, so the
fit reduces to a one-dimensional root search in ``alpha``.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

from .censoring import GphcsSample
from .errors import (DomainError, InsufficientInformationError, NoRootError,
                     NonConvergenceError, UnstableCovarianceError)
from .koon import SystemSpec, system_reliability, system_reliability_gradient
from .weibull import WeibullParams, cdf

ALPHA_GUESS_BOUNDS = (0.05, 20.0)
INTERVAL_METHODS = ("ACI", "ACI-delta", "HPD-minwidth", "percentile")


@dataclass(frozen=True)
class SolverOptions:
    score_tol: float = 1e-10
    step_tol: float = 1e-10
    max_iter: int = 200
    max_expansions: int = 60
    alpha0: float = None


@dataclass(frozen=True, eq=False)
class FitResult:
    params_hat: WeibullParams
    info_observed: np.ndarray
    covariance: np.ndarray
    iterations: int
    grad_norm: float

    @property
    def alpha_hat(self):
        return self.params_hat.alpha

    @property
    def beta_hat(self):
        return self.params_hat.beta

    @property
    def var_alpha(self):
        return float(self.covariance[0, 0])

    @property
    def var_beta(self):
        return float(self.covariance[1, 1])

    @property
    def cov_ab(self):
        return float(self.covariance[0, 1])

    def to_dict(self):
        return {"alpha_hat": self.alpha_hat, "beta_hat": self.beta_hat,
                "var_alpha": self.var_alpha, "var_beta": self.var_beta,
                "cov_ab": self.cov_ab, "iterations": self.iterations,
                "grad_norm": self.grad_norm}

    @classmethod
    def from_dict(cls, record):
        cov = np.array([[record["var_alpha"], record["cov_ab"]],
                        [record["cov_ab"], record["var_beta"]]], dtype=np.float64)
        return cls(WeibullParams(record["alpha_hat"], record["beta_hat"]),
                   np.linalg.inv(cov), cov, int(record["iterations"]),
                   float(record["grad_norm"]))


@dataclass(frozen=True)
class IntervalEstimate:
    """Interval with its nominal level ``1 - gamma``.

    ``raw_lower``/``raw_upper`` keep the bounds before any clamping to the
    parameter's range; :attr:`width` is measured on them.
    """

    lower: float
    upper: float
    level: float
    method: str
    raw_lower: float = None
    raw_upper: float = None

    def __post_init__(self):
        if self.method not in INTERVAL_METHODS:
            raise DomainError(f"unknown interval method {self.method!r}")
        if not self.lower <= self.upper:
            raise DomainError("interval lower bound exceeds upper bound")
        if self.raw_lower is None:
            object.__setattr__(self, "raw_lower", self.lower)
        if self.raw_upper is None:
            object.__setattr__(self, "raw_upper", self.upper)

    @property
    def width(self):
        return self.raw_upper - self.raw_lower

    def contains(self, value):
        return self.lower <= value <= self.upper

    def to_dict(self):
        return {"lower": self.lower, "upper": self.upper, "level": self.level,
                "method": self.method, "raw_lower": self.raw_lower,
                "raw_upper": self.raw_upper}


class KSResult(NamedTuple):
    statistic: float
    p_value: float


def _exposure(sample, alpha):
    """W(alpha) and its first two alpha-derivatives."""
    log_x, weights = sample.exposure_terms()
    terms = weights * np.exp(alpha * log_x)
    return (float(terms.sum()), float(np.dot(terms, log_x)),
            float(np.dot(terms, log_x * log_x)))


def log_likelihood(s: GphcsSample, p: WeibullParams) -> float:
    d = s.D
    w, _, _ = _exposure(s, p.alpha)
    return (d * math.log(p.alpha) + d * math.log(p.beta)
            + (p.alpha - 1.0) * float(s.log_times.sum()) - p.beta * w)


def score(s: GphcsSample, p: WeibullParams):
    """(dl/dalpha, dl/dbeta)."""
    d = s.D
    w, w1, _ = _exposure(s, p.alpha)
    return (d / p.alpha + float(s.log_times.sum()) - p.beta * w1,
            d / p.beta - w)


def profile_beta(s: GphcsSample, alpha: float) -> float:
    """Root in beta of the beta-score for fixed ``alpha``."""
    if not alpha > 0.0:
        raise DomainError("alpha must be > 0")
    w, _, _ = _exposure(s, alpha)
    return s.D / w


def observed_info(s: GphcsSample, p: WeibullParams) -> np.ndarray:
    """Negated Hessian of the log-likelihood at ``p``."""
    d = s.D
    _, w1, w2 = _exposure(s, p.alpha)
    l11 = -d / p.alpha**2 - p.beta * w2
    l12 = -w1
    l22 = -d / p.beta**2
    return -np.array([[l11, l12], [l12, l22]])


def _initial_alpha(log_x):
    d = log_x.size
    pos = (np.arange(1, d + 1) - 0.375) / (d + 0.25)
    y = np.log(-np.log1p(-pos))
    xc = log_x - log_x.mean()
    slope = float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))
    if not math.isfinite(slope):
        slope = 1.0
    return min(max(slope, ALPHA_GUESS_BOUNDS[0]), ALPHA_GUESS_BOUNDS[1])


class _ProfiledScore:
    """g(alpha) = D/alpha + sum log y - D W'(alpha)/W(alpha) on rescaled times."""

    def __init__(self, sample):
        log_x, weights = sample.exposure_terms()
        self.shift = float(log_x.max())
        self.log_y = log_x - self.shift
        self.weights = weights
        self.d = sample.D
        self.sum_log_y = float(sample.log_times.sum()) - self.d * self.shift

    def __call__(self, alpha):
        terms = self.weights * np.exp(alpha * self.log_y)
        w0 = terms.sum()
        w1 = np.dot(terms, self.log_y)
        w2 = np.dot(terms, self.log_y * self.log_y)
        g = self.d / alpha + self.sum_log_y - self.d * w1 / w0
        dg = -self.d / alpha**2 - self.d * (w2 * w0 - w1 * w1) / (w0 * w0)
        return float(g), float(dg)

    def beta(self, alpha):
        w0 = float(np.dot(self.weights, np.exp(alpha * self.log_y)))
        return self.d / w0 * math.exp(-alpha * self.shift)


def _bracket(g, alpha0, max_expansions):
    lo, hi = alpha0 / 2.0, alpha0 * 2.0
    expansions = 0
    while g(lo)[0] <= 0.0:
        if expansions >= max_expansions:
            raise NoRootError(f"profiled score has no sign change below alpha={lo:g}")
        lo /= 2.0
        expansions += 1
    while g(hi)[0] >= 0.0:
        if expansions >= max_expansions:
            raise NoRootError(f"profiled score has no sign change above alpha={hi:g}")
        hi *= 2.0
        expansions += 1
    return lo, hi


def _solve_alpha(g, alpha0, options):
    lo, hi = _bracket(g, alpha0, options.max_expansions)
    x = min(max(alpha0, lo), hi)
    step = math.inf
    for it in range(1, options.max_iter + 1):
        gx, dgx = g(x)
        if gx > 0.0:
            lo = x
        else:
            hi = x
        if abs(gx) < options.score_tol and abs(step) < options.step_tol * max(1.0, x):
            return x, it
        if hi - lo <= 4.0 * np.spacing(hi):
            return x, it
        newton = x - gx / dgx if dgx != 0.0 else math.nan
        nxt = newton if lo < newton < hi else 0.5 * (lo + hi)
        step = nxt - x
        x = nxt
    raise NonConvergenceError(
        f"alpha solve did not converge in {options.max_iter} iterations", last_iterate=x)


def _invert_info(info):
    det = info[0, 0] * info[1, 1] - info[0, 1] * info[1, 0]
    if not (info[0, 0] > 0.0 and info[1, 1] > 0.0 and det > 0.0):
        raise UnstableCovarianceError("observed information is not positive definite")
    return np.array([[info[1, 1], -info[0, 1]], [-info[1, 0], info[0, 0]]]) / det


def fit(s: GphcsSample, options: SolverOptions = None) -> FitResult:
    """MLE of (alpha, beta) by a safeguarded Newton solve of the profiled score.

    The root of ``g(alpha)`` is first bracketed by geometric expansion from the
    starting guess, then Newton steps falling outside the bracket are replaced
    by bisection.
    """
    options = options or SolverOptions()
    if s.D < 2 or float(np.ptp(s.times)) == 0.0:
        raise InsufficientInformationError(
            "need at least two distinct failure times to estimate two parameters")
    g = _ProfiledScore(s)
    alpha0 = options.alpha0 or _initial_alpha(s.log_times)
    alpha_hat, iterations = _solve_alpha(g, alpha0, options)
    params = WeibullParams(alpha_hat, g.beta(alpha_hat))
    info = observed_info(s, params)
    cov = _invert_info(info)
    d_alpha, d_beta = score(s, params)
    grad_norm = math.hypot(params.alpha * d_alpha, params.beta * d_beta)
    return FitResult(params, info, cov, iterations, grad_norm)


def z_value(gamma):
    """Upper gamma/2 point of the standard normal."""
    gamma = float(gamma)
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma!r}")
    return float(special.ndtri(1.0 - gamma / 2.0))


def aci_param(fit_result: FitResult, which: str, gamma: float = 0.05) -> IntervalEstimate:
    z = z_value(gamma)
    if which == "alpha":
        est, var = fit_result.alpha_hat, fit_result.var_alpha
    elif which == "beta":
        est, var = fit_result.beta_hat, fit_result.var_beta
    else:
        raise DomainError(f"which must be 'alpha' or 'beta', got {which!r}")
    half = z * math.sqrt(max(var, 0.0))
    return IntervalEstimate(est - half, est + half, 1.0 - gamma, "ACI")


def mle_system_reliability(fit_result: FitResult, spec: SystemSpec, t) -> float:
    return system_reliability(spec, fit_result.params_hat, t)


def delta_variance(fit_result: FitResult, spec: SystemSpec, t, factor="exact"):
    grad = system_reliability_gradient(spec, fit_result.params_hat, t,
                                       factor=factor).as_array()
    var = float(grad @ fit_result.covariance @ grad)
    if var < 0.0 or not math.isfinite(var):
        raise UnstableCovarianceError("delta-method variance is negative")
    return var


def aci_reliability(fit_result: FitResult, spec: SystemSpec, t, gamma=0.05,
                    factor="exact") -> IntervalEstimate:
    """Delta-method interval for system reliability, clamped to [0, 1].

    ``factor`` is forwarded to
    :func:`koon_gphcs.koon.system_reliability_gradient`.
    """
    z = z_value(gamma)
    r_hat = mle_system_reliability(fit_result, spec, t)
    half = z * math.sqrt(delta_variance(fit_result, spec, t, factor=factor))
    raw_lo, raw_hi = r_hat - half, r_hat + half
    return IntervalEstimate(max(raw_lo, 0.0), min(raw_hi, 1.0), 1.0 - gamma,
                            "ACI-delta", raw_lo, raw_hi)


def ks_test(data, p: WeibullParams) -> KSResult:
    """One-sample K-S distance to the fitted law with the asymptotic p-value.

    The p-value ignores that ``p`` was estimated from the same data.
    """
    x = np.sort(np.asarray(data, dtype=np.float64))
    n = x.size
    if n == 0:
        raise DomainError("K-S test needs at least one observation")
    f = np.asarray(cdf(p, x))
    i = np.arange(1, n + 1)
    stat = float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))
    return KSResult(stat, float(special.kolmogorov(math.sqrt(n) * stat)))
