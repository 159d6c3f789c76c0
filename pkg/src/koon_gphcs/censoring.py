"""Progressive Type-II samples and the generalized hybrid termination rule.

A test puts ``n`` units on life test. At the i-th failure ``R_i`` survivors are
withdrawn. The test stops at ``T* = max(x_k, min(T, x_m))``:

* Case I   -- ``x_m <= T``: all ``m`` failures observed, ``T* = x_m``
* Case II  -- ``x_k < T < x_m``: failures strictly before ``T`` observed, ``T* = T``
* Case III -- ``x_k >= T``: the test runs on to the k-th failure, ``T* = x_k``

A failure exactly at ``T`` in Case II is therefore censored at ``T``, not
observed. The ``R* = n - D - sum(R_1..R_D)`` units still running at ``T*``
are censored there.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DomainError
from .weibull import WeibullParams

CASES = ("I", "II", "III")
CSV_FIELDS = ("n", "m", "k", "T", "case", "D", "T_star", "R_star", "times", "removals")


def _as_int(name, value):
    if isinstance(value, bool):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    try:
        ivalue = int(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be an integer, got {value!r}") from None
    if ivalue != value:
        raise DomainError(f"{name} must be an integer, got {value!r}")
    return ivalue


def _frozen_array(values, dtype=np.float64):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CensoringPlan:
    n: int
    m: int
    k: int
    T: float
    removals: tuple

    def __post_init__(self):
        n, m, k = (_as_int(name, getattr(self, name)) for name in ("n", "m", "k"))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "k", k)
        if not 1 <= k < m <= n:
            raise DomainError(f"need 1 <= k < m <= n, got n={n}, m={m}, k={k}")
        T = float(self.T)
        if not math.isfinite(T) or T <= 0.0:
            raise DomainError(f"T must be finite and > 0, got {self.T!r}")
        object.__setattr__(self, "T", T)
        removals = tuple(_as_int("removal", r) for r in self.removals)
        if len(removals) != m:
            raise DomainError(f"expected {m} removal counts, got {len(removals)}")
        if any(r < 0 for r in removals):
            raise DomainError("removal counts must be >= 0")
        if sum(removals) != n - m:
            raise DomainError(
                f"removal counts must sum to n - m = {n - m}, got {sum(removals)}")
        object.__setattr__(self, "removals", removals)

    def to_dict(self):
        return {"n": self.n, "m": self.m, "k": self.k, "T": self.T,
                "removals": list(self.removals)}


@dataclass(frozen=True, eq=False)
class ProgressiveSample:
    times: np.ndarray
    plan: CensoringPlan

    def __post_init__(self):
        times = _frozen_array(self.times)
        if times.ndim != 1 or times.size != self.plan.m:
            raise ContractError(
                f"progressive sample needs {self.plan.m} times, got {times.size}")
        if np.any(~np.isfinite(times)) or np.any(times <= 0.0):
            raise DomainError("failure times must be finite and > 0")
        if np.any(np.diff(times) <= 0.0):
            raise DomainError("progressive failure times must be strictly increasing")
        object.__setattr__(self, "times", times)


@dataclass(frozen=True, eq=False)
class GphcsSample:
    """Observed data after the termination rule.

    ``removals`` holds the withdrawals actually applied at the ``D`` observed
    failures. ``times`` need only be non-decreasing so that complete real-data
    samples with ties can be embedded via :meth:`complete`.
    """

    times: np.ndarray
    removals: np.ndarray
    t_star: float
    r_star: int
    case: str
    n: int
    m: int
    k: int
    T: float
    log_times: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        times = _frozen_array(self.times)
        removals = _frozen_array(self.removals, dtype=np.int64)
        if times.ndim != 1 or times.size == 0:
            raise DomainError("a sample needs at least one observed failure")
        if removals.shape != times.shape:
            raise ContractError("times and removals must have equal length")
        if np.any(~np.isfinite(times)) or np.any(times <= 0.0):
            raise DomainError("failure times must be finite and > 0")
        if np.any(np.diff(times) < 0.0):
            raise DomainError("failure times must be sorted")
        if np.any(removals < 0) or self.r_star < 0:
            raise DomainError("removal counts must be >= 0")
        if self.case not in CASES:
            raise DomainError(f"case must be one of {CASES}, got {self.case!r}")
        t_star = float(self.t_star)
        if not math.isfinite(t_star) or t_star <= 0.0 or t_star < times[-1]:
            raise DomainError("termination time must be >= the last observed failure")
        if times.size + int(removals.sum()) + int(self.r_star) != self.n:
            raise ContractError("D + sum(R_i) + R* must equal n")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "removals", removals)
        object.__setattr__(self, "t_star", t_star)
        object.__setattr__(self, "r_star", int(self.r_star))
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "log_times", _frozen_array(np.log(times)))

    @property
    def D(self):
        return int(self.times.size)

    @classmethod
    def complete(cls, times):
        """Embed an uncensored sample: D = n, no removals, T* = max time."""
        times = np.sort(np.asarray(times, dtype=np.float64))
        size = int(times.size)
        if size == 0:
            raise DomainError("a sample needs at least one observed failure")
        return cls(times=times, removals=np.zeros(size, dtype=np.int64),
                   t_star=float(times[-1]), r_star=0, case="I",
                   n=size, m=size, k=size, T=float(times[-1]))

    def exposure_terms(self):
        """(log_x, weights) such that sum(weights * x**alpha) is the total exposure.

        The ``R*`` units censored at ``T*`` contribute one extra entry.
        """
        weights = self.removals.astype(np.float64) + 1.0
        if self.r_star > 0:
            return (np.append(self.log_times, math.log(self.t_star)),
                    np.append(weights, float(self.r_star)))
        return np.array(self.log_times), weights

    def to_dict(self):
        return {"n": self.n, "m": self.m, "k": self.k, "T": self.T,
                "case": self.case, "D": self.D, "T_star": self.t_star,
                "R_star": self.r_star, "times": [float(x) for x in self.times],
                "removals": [int(r) for r in self.removals]}

    @classmethod
    def from_dict(cls, record):
        sample = cls(times=record["times"], removals=record["removals"],
                     t_star=record["T_star"], r_star=record["R_star"],
                     case=record["case"], n=record["n"], m=record["m"],
                     k=record["k"], T=record["T"])
        if "D" in record and int(record["D"]) != sample.D:
            raise ContractError("D does not match the number of listed times")
        return sample

    def to_csv_row(self):
        record = self.to_dict()
        record["times"] = ";".join(repr(x) for x in record["times"])
        record["removals"] = ";".join(str(r) for r in record["removals"])
        return {key: record[key] for key in CSV_FIELDS}

    @classmethod
    def from_csv_row(cls, row):
        def split(text, conv):
            return [conv(tok) for tok in str(text).split(";") if tok != ""]

        return cls.from_dict({
            "n": int(row["n"]), "m": int(row["m"]), "k": int(row["k"]),
            "T": float(row["T"]), "case": row["case"], "D": int(row["D"]),
            "T_star": float(row["T_star"]), "R_star": int(row["R_star"]),
            "times": split(row["times"], float),
            "removals": split(row["removals"], int),
        })


def _strictly_increasing(times):
    out = np.array(times, dtype=np.float64)
    for i in range(1, out.size):
        if out[i] <= out[i - 1]:
            out[i] = np.nextafter(out[i - 1], np.inf)
    return out


def generate_progressive(plan: CensoringPlan, p: WeibullParams,
                         rng: np.random.Generator) -> ProgressiveSample:
    """Progressive Type-II order statistics by the uniform-spacings method.

    With ``W_i`` uniform, ``V_i = W_i**(1 / (i + R_m + ... + R_{m-i+1}))`` and
    ``U_i = 1 - V_m V_{m-1} ... V_{m-i+1}``; then ``x_i = F^-1(U_i)``. The
    product is carried in log space, so ``-log(1 - U_i)`` never loses digits.
    """
    m = plan.m
    w = 1.0 - rng.random(m)  # (0, 1]
    tail_removals = np.cumsum(np.asarray(plan.removals[::-1], dtype=np.float64))
    denom = np.arange(1, m + 1, dtype=np.float64) + tail_removals
    log_v = np.log(w) / denom
    # -log(1 - U_i) = -(log V_m + ... + log V_{m-i+1})
    exposure = -np.cumsum(log_v[::-1])
    times = np.power(exposure / p.beta, 1.0 / p.alpha)
    return ProgressiveSample(_strictly_increasing(times), plan)


def progressive_from_complete(times, plan: CensoringPlan,
                              rng: np.random.Generator) -> ProgressiveSample:
    """Run a progressive withdrawal over an observed complete sample.

    The n values play the role of the units' lifetimes. After each observed
    failure ``R_i`` survivors are withdrawn uniformly at random.
    """
    units = np.sort(np.asarray(times, dtype=np.float64))
    if units.size != plan.n:
        raise ContractError(f"plan needs n = {plan.n} lifetimes, got {units.size}")
    alive = list(units)
    observed = []
    for r in plan.removals:
        observed.append(alive.pop(0))
        take = min(int(r), len(alive))
        if take:
            drop = set(rng.choice(len(alive), size=take, replace=False).tolist())
            alive = [x for j, x in enumerate(alive) if j not in drop]
    return ProgressiveSample(_strictly_increasing(observed), plan)


def apply_gphcs_rule(sample: ProgressiveSample, plan: CensoringPlan) -> GphcsSample:
    if sample.plan != plan or sample.times.size != plan.m:
        raise ContractError("progressive sample was not generated under this plan")
    x = sample.times
    x_k, x_m = x[plan.k - 1], x[plan.m - 1]
    if x_m <= plan.T:
        case, d, t_star = "I", plan.m, float(x_m)
    elif x_k >= plan.T:
        case, d, t_star = "III", plan.k, float(x_k)
    else:
        case, t_star = "II", plan.T
        d = int(np.searchsorted(x, plan.T, side="left"))
    removals = np.asarray(plan.removals[:d], dtype=np.int64)
    r_star = plan.n - d - int(removals.sum())
    return GphcsSample(times=x[:d], removals=removals, t_star=t_star, r_star=r_star,
                       case=case, n=plan.n, m=plan.m, k=plan.k, T=plan.T)


def generate_gphcs(plan: CensoringPlan, p: WeibullParams,
                   rng: np.random.Generator) -> GphcsSample:
    return apply_gphcs_rule(generate_progressive(plan, p, rng), plan)
