"""Reliability of a K-out-of-N:G system of i.i.d. Weibull components."""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError
from .weibull import WeibullParams

MAX_COMPONENTS = 10_000


@dataclass(frozen=True, slots=True)
class SystemSpec:
    """``N`` components; the system works while at least ``K`` of them work."""

    N: int
    K: int

    def __post_init__(self):
        for name in ("N", "K"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise DomainError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not 1 <= self.K <= self.N <= MAX_COMPONENTS:
            raise DomainError(
                f"need 1 <= K <= N <= {MAX_COMPONENTS}, got N={self.N}, K={self.K}")

    def to_dict(self):
        return {"N": self.N, "K": self.K}


@dataclass(frozen=True, slots=True)
class ReliabilityGradient:
    d_alpha: float
    d_beta: float

    def as_array(self):
        return np.array([self.d_alpha, self.d_beta])


def _check_time(t):
    t = float(t)
    if not math.isfinite(t) or t < 0.0:
        raise DomainError(f"time must be finite and >= 0, got {t!r}")
    return t


def reliability_from_component(spec: SystemSpec, r):
    """Upper binomial tail P(Bin(N, r) >= K) for component reliability ``r``."""
    r = float(r)
    if not 0.0 <= r <= 1.0:
        raise DomainError("component reliability must lie in [0, 1]")
    total = 0.0
    coef = 1.0
    # C(N, i) by successive ratios, starting from C(N, 0)
    for i in range(spec.N + 1):
        if i > 0:
            coef *= (spec.N - i + 1) / i
        if i >= spec.K:
            total += coef * r**i * (1.0 - r) ** (spec.N - i)
    return min(total, 1.0)


def system_reliability(spec: SystemSpec, p: WeibullParams, t) -> float:
    t = _check_time(t)
    out = _kernels.active().system_reliability_draws(
        np.array([p.alpha]), np.array([p.beta]), t, spec.N, spec.K)
    return float(out[0])


def _ds_sum(spec, s, inner):
    """Sum over i = K..N of C(N,i) u^i q^(N-i-1) * inner(i, u), u = e^-s, q = 1-u.

    The i = N term of d R / d s is -N u^N and is added in closed form,
    avoiding the q**-1 factor.
    """
    big_n, big_k = spec.N, spec.K
    q = -math.expm1(-s)
    logc = _kernels.numpy_impl.log_binomial_coefficients(big_n)
    total = 0.0
    for i in range(big_k, big_n):
        if q == 0.0 and big_n - i - 1 > 0:
            continue
        log_q_part = (big_n - i - 1) * math.log(q) if big_n - i - 1 > 0 else 0.0
        total += math.exp(logc[i] - i * s + log_q_part) * inner(i, math.exp(-s))
    return total


def system_reliability_gradient(spec: SystemSpec, p: WeibullParams, t,
                                factor="exact") -> ReliabilityGradient:
    """Partial derivatives of system reliability with respect to (alpha, beta).

    With ``s = beta * t**alpha`` and ``u = exp(-s)``::

        dR/ds = sum_{i=K}^{N} C(N,i) u^i (1-u)^(N-i-1) (N u - i)

    and ``ds/dbeta = t**alpha``, ``ds/dalpha = beta * t**alpha * log t``.

    ``factor="printed"`` replaces ``(N u - i)`` with ``(N - 2i + i u)``. That
    variant is not a derivative of the reliability; it exists only to compare
    against interval tables that were computed with it.
    """
    t = _check_time(t)
    if t == 0.0:
        return ReliabilityGradient(0.0, 0.0)
    big_n = spec.N
    s = p.beta * t**p.alpha
    if factor == "exact":
        total = _ds_sum(spec, s, lambda i, u: big_n * u - i)
    elif factor == "printed":
        total = _ds_sum(spec, s, lambda i, u: big_n - 2 * i + i * u)
    else:
        raise DomainError(f"factor must be 'exact' or 'printed', got {factor!r}")
    # both inner factors reduce to -N (1-u) at i = N
    total -= big_n * math.exp(-big_n * s)
    t_alpha = t**p.alpha
    return ReliabilityGradient(d_alpha=p.beta * t_alpha * math.log(t) * total,
                               d_beta=t_alpha * total)
