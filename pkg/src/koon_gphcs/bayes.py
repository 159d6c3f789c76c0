"""Bayesian estimation under independent gamma priors.

Priors: ``alpha ~ Gamma(a, rate=b)`` and ``beta ~ Gamma(c, rate=d)``. The
posterior is explored by a Gibbs-within-Metropolis chain: alpha is updated
against the previous beta, then beta against the new alpha, each with a
normal random-walk proposal whose standard deviation comes from the MLE
covariance. Point estimates are posterior means (squared-error loss).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .censoring import GphcsSample
from .errors import DomainError, InvalidProposalScaleError
from .frequentist import FitResult, IntervalEstimate
from .koon import SystemSpec
from .weibull import WeibullParams

NONINFORMATIVE = 1e-4


@dataclass(frozen=True)
class PriorSpec:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0.0:
                raise DomainError(f"hyperparameter {name} must be finite and > 0")
            object.__setattr__(self, name, value)

    @classmethod
    def noninformative(cls):
        return cls(NONINFORMATIVE, NONINFORMATIVE, NONINFORMATIVE, NONINFORMATIVE)

    @classmethod
    def centered(cls, truth: WeibullParams, alpha_rate, beta_rate):
        """Gamma priors whose means equal ``truth``."""
        return cls(truth.alpha * alpha_rate, alpha_rate, truth.beta * beta_rate, beta_rate)

    @property
    def mean_alpha(self):
        return self.a / self.b

    @property
    def mean_beta(self):
        return self.c / self.d

    def to_dict(self):
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}


@dataclass(frozen=True, eq=False)
class PosteriorSample:
    draws_alpha: np.ndarray
    draws_beta: np.ndarray
    draws_reliability: np.ndarray = None
    burn_in: int = 0
    thin: int = 1
    accept_rate_alpha: float = 0.0
    accept_rate_beta: float = 0.0
    seed: int = None
    backend: str = field(default="", compare=False)

    @property
    def size(self):
        return int(self.draws_alpha.size)

    def to_csv(self, path):
        """Write ``iter,alpha,beta,reliability`` rows (reliability blank if absent)."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("iter,alpha,beta,reliability\n")
            rel = self.draws_reliability
            for j in range(self.size):
                r = "" if rel is None else repr(float(rel[j]))
                fh.write(f"{j + 1},{float(self.draws_alpha[j])!r},"
                         f"{float(self.draws_beta[j])!r},{r}\n")


@dataclass(frozen=True)
class BayesResult:
    alpha_se: float
    beta_se: float
    reliability_se: float
    intervals: dict

    def to_dict(self):
        return {"alpha_se": self.alpha_se, "beta_se": self.beta_se,
                "reliability_se": self.reliability_se,
                "intervals": {k: v.to_dict() for k, v in self.intervals.items()}}


def _parts(s, alpha):
    log_x, weights = s.exposure_terms()
    with np.errstate(over="ignore"):
        exposure = float(np.dot(weights, np.exp(alpha * log_x)))
    return float(s.log_times.sum()), exposure


def log_posterior(s: GphcsSample, prior: PriorSpec, alpha, beta) -> float:
    """Unnormalised log posterior; ``-inf`` outside the positive quadrant."""
    if not (alpha > 0.0 and beta > 0.0):
        return -math.inf
    sum_log, exposure = _parts(s, alpha)
    d = s.D
    return ((d + prior.a - 1.0) * math.log(alpha) + (d + prior.c - 1.0) * math.log(beta)
            - prior.b * alpha - prior.d * beta + (alpha - 1.0) * sum_log
            - beta * exposure)


def conditional_log_alpha(s: GphcsSample, prior: PriorSpec, alpha, beta) -> float:
    if not (alpha > 0.0 and beta > 0.0):
        return -math.inf
    sum_log, exposure = _parts(s, alpha)
    return ((s.D + prior.a - 1.0) * math.log(alpha) - prior.b * alpha
            + (alpha - 1.0) * sum_log - beta * exposure)


def conditional_log_beta(s: GphcsSample, prior: PriorSpec, alpha, beta) -> float:
    """Log-kernel of Gamma(D + c, rate = d + W(alpha)) in beta."""
    if not (alpha > 0.0 and beta > 0.0):
        return -math.inf
    _, exposure = _parts(s, alpha)
    return (s.D + prior.c - 1.0) * math.log(beta) - prior.d * beta - beta * exposure


def _as_rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng, None
    seed = int(rng)
    return np.random.default_rng(seed), seed


def mh_sample(s: GphcsSample, prior: PriorSpec, init: FitResult,
              spec: SystemSpec = None, t=None, B=10_000, burn_in=2_000, rng=0,
              *, thin=1, proposal_sd=None, fix_alpha=False, backend=None) -> PosteriorSample:
    """Run the chain from the MLE and keep ``B`` draws after ``burn_in``.

    ``rng`` is a Generator or an integer seed. ``proposal_sd`` overrides the
    MLE-derived step sizes and ``fix_alpha`` freezes alpha at its start value;
    both exist for diagnostics.
    """
    if B < 1 or burn_in < 0 or thin < 1:
        raise DomainError("need B >= 1, burn_in >= 0 and thin >= 1")
    if proposal_sd is None:
        if not (init.var_alpha > 0.0 and init.var_beta > 0.0):
            raise InvalidProposalScaleError(
                "proposal variances from the MLE covariance must be > 0")
        sd_a, sd_b = math.sqrt(init.var_alpha), math.sqrt(init.var_beta)
    else:
        sd_a, sd_b = (float(v) for v in proposal_sd)
        if sd_a < 0.0 or sd_b < 0.0:
            raise InvalidProposalScaleError("proposal standard deviations must be >= 0")
    gen, seed = _as_rng(rng)
    n_iter = burn_in + B * thin
    z_alpha = gen.standard_normal(n_iter)
    z_beta = gen.standard_normal(n_iter)
    with np.errstate(divide="ignore"):
        log_u_alpha = np.log(gen.random(n_iter))
        log_u_beta = np.log(gen.random(n_iter))
    log_x, weights = s.exposure_terms()
    impl = _kernels.get(backend) if backend else _kernels.active()
    alphas, betas, acc_a, acc_b = impl.mh_chain(
        log_x, weights, float(s.log_times.sum()), s.D,
        prior.a, prior.b, prior.c, prior.d, init.alpha_hat, init.beta_hat,
        sd_a, sd_b, z_alpha, z_beta, log_u_alpha, log_u_beta, fix_alpha)
    keep = slice(burn_in, None, thin)
    draws_a = np.ascontiguousarray(alphas[keep])
    draws_b = np.ascontiguousarray(betas[keep])
    rel = None
    if spec is not None and t is not None:
        rel = impl.system_reliability_draws(draws_a, draws_b, float(t), spec.N, spec.K)
    return PosteriorSample(draws_a, draws_b, rel, burn_in, thin,
                           acc_a / n_iter, acc_b / n_iter, seed, impl.NAME)


def credible_interval(draws, gamma=0.05, method="minwidth") -> IntervalEstimate:
    """Credible interval from sorted draws.

    ``percentile`` takes order statistics ``[B gamma/2]`` and ``[B (1-gamma/2)]``
    (1-based, floored, lower index at least 1). ``minwidth`` scans every window
    spanning ``floor(B (1-gamma))`` order-statistic gaps and returns the
    narrowest, first one on ties.
    """
    if not 0.0 < gamma < 1.0:
        raise DomainError("gamma must lie in (0, 1)")
    x = np.sort(np.asarray(draws, dtype=np.float64))
    b = x.size
    if b < 2.0 / gamma:
        raise DomainError(f"need at least {math.ceil(2.0 / gamma)} draws, got {b}")
    if method == "percentile":
        lo = max(int(math.floor(b * gamma / 2.0)), 1)
        hi = int(math.floor(b * (1.0 - gamma / 2.0)))
        return IntervalEstimate(float(x[lo - 1]), float(x[hi - 1]), 1.0 - gamma,
                                "percentile")
    if method == "minwidth":
        span = int(math.floor(b * (1.0 - gamma)))
        widths = x[span:] - x[: b - span]
        j = int(np.argmin(widths))
        return IntervalEstimate(float(x[j]), float(x[j + span]), 1.0 - gamma,
                                "HPD-minwidth")
    raise DomainError(f"method must be 'minwidth' or 'percentile', got {method!r}")


def self_estimates(ps: PosteriorSample, gamma=0.05, method="minwidth") -> BayesResult:
    if ps.size == 0:
        raise DomainError("posterior sample is empty")
    quantities = {"alpha": ps.draws_alpha, "beta": ps.draws_beta}
    if ps.draws_reliability is not None:
        quantities["reliability"] = ps.draws_reliability
    intervals = {}
    if ps.size >= 2.0 / gamma:
        intervals = {name: credible_interval(d, gamma, method)
                     for name, d in quantities.items()}
    rel = math.nan if ps.draws_reliability is None else float(np.mean(ps.draws_reliability))
    return BayesResult(float(np.mean(ps.draws_alpha)), float(np.mean(ps.draws_beta)),
                       rel, intervals)
