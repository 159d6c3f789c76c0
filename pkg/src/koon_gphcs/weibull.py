"""Two-parameter Weibull law in rate form.

The lifetime CDF is ``F(x) = 1 - exp(-beta * x**alpha)``: ``alpha`` is the
shape and ``beta`` multiplies ``x**alpha`` (units time**-alpha). This is NOT
the common scale parameterisation; a scale ``lam`` corresponds to
``beta = lam**-alpha``.

All functions accept scalars or arrays and return a float for scalar input.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True, slots=True)
class WeibullParams:
    """Shape ``alpha`` and rate ``beta``, both finite and strictly positive."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise DomainError(f"{name} must be a real number, got {value!r}") from None
            if not math.isfinite(value) or value <= 0.0:
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_scale(cls, alpha, scale):
        """Build from shape and the conventional scale parameter."""
        return cls(alpha, float(scale) ** (-float(alpha)))

    @property
    def scale(self):
        return self.beta ** (-1.0 / self.alpha)

    def to_dict(self):
        return {"alpha": self.alpha, "beta": self.beta}


def _as_times(x, *, strict):
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError("time must be finite")
    if strict and np.any(arr <= 0.0):
        raise DomainError("time must be > 0")
    if not strict and np.any(arr < 0.0):
        raise DomainError("time must be >= 0")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def cumulative_hazard(p, x):
    """``beta * x**alpha`` without validation (internal fast path)."""
    return p.beta * np.power(x, p.alpha)


def cdf(p: WeibullParams, x):
    x = _as_times(x, strict=False)
    return _out(-np.expm1(-cumulative_hazard(p, x)))


def reliability(p: WeibullParams, x):
    x = _as_times(x, strict=False)
    return _out(np.exp(-cumulative_hazard(p, x)))


def pdf(p: WeibullParams, x):
    x = _as_times(x, strict=True)
    return _out(p.alpha * p.beta * np.power(x, p.alpha - 1.0)
                * np.exp(-cumulative_hazard(p, x)))


def hazard(p: WeibullParams, x):
    x = _as_times(x, strict=True)
    return _out(p.alpha * p.beta * np.power(x, p.alpha - 1.0))


def quantile(p: WeibullParams, u):
    """Inverse CDF on ``0 <= u < 1``."""
    u = np.asarray(u, dtype=np.float64)
    if np.any(~np.isfinite(u)) or np.any(u < 0.0) or np.any(u >= 1.0):
        raise DomainError("probability must satisfy 0 <= u < 1")
    return _out(np.power(-np.log1p(-u) / p.beta, 1.0 / p.alpha))


def sample(p: WeibullParams, rng: np.random.Generator, size=None):
    """Inverse-transform draws; consumes ``rng.random(size)`` only."""
    u = rng.random(size)
    return _out(np.power(-np.log1p(-u) / p.beta, 1.0 / p.alpha))
