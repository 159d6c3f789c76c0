"""Monte Carlo study of the estimators over a grid of censoring designs.

Each replication draws its own stream from ``SeedSequence(seed,
spawn_key=(replication, attempt))``, so results do not depend on thread count
or scheduling. Replications whose MLE fails are re-drawn on the next attempt
stream and tallied; more than 10% failures aborts the cell.
"""

import csv
import enum
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import jsonschema
import numpy as np

from .bayes import PriorSpec, credible_interval, mh_sample
from .censoring import CensoringPlan, generate_gphcs
from .errors import CellError, DomainError, NumericalError
from .frequentist import (aci_param, aci_reliability, fit, mle_system_reliability)
from .koon import SystemSpec, system_reliability
from .weibull import WeibullParams

THREADS_ENV = "KOON_GPHCS_THREADS"
QUANTITIES = ("alpha", "beta", "reliability")
FAILURE_CAP = 0.10
MAX_ATTEMPTS = 100
FAST_PROFILE = {"B": 2000, "burn_in": 500, "replications": 1000}


class SchemeId(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"


def build_scheme(scheme, n, m):
    """Removal vector for the three standard schemes.

    I: everything withdrawn at the first failure; II: at the last;
    III: one unit at each of the first ``n - m`` failures.
    """
    scheme = SchemeId(scheme)
    if not 1 <= m <= n:
        raise DomainError(f"need 1 <= m <= n, got n={n}, m={m}")
    extra = n - m
    if scheme is SchemeId.I:
        return (extra,) + (0,) * (m - 1)
    if scheme is SchemeId.II:
        return (0,) * (m - 1) + (extra,)
    if extra > m:
        raise DomainError(f"scheme III needs n - m <= m, got n - m = {extra}, m = {m}")
    return (1,) * extra + (0,) * (m - extra)


@dataclass(frozen=True)
class SimCell:
    n: int
    m: int
    k: int
    T: float
    scheme: SchemeId
    true_params: WeibullParams = WeibullParams(1.5, 1.0)
    spec: SystemSpec = SystemSpec(5, 3)
    t_eval: float = 0.5
    prior: PriorSpec = PriorSpec(3.0, 2.0, 2.5, 2.5)
    replications: int = 10_000
    B: int = 10_000
    burn_in: int = 2_000
    gamma: float = 0.05
    seed: int = 2022
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "scheme", SchemeId(self.scheme))
        if self.replications < 1 or self.B < 1 or self.burn_in < 0:
            raise DomainError("replications and B must be >= 1, burn_in >= 0")
        if not self.name:
            object.__setattr__(
                self, "name",
                f"n{self.n}-m{self.m}-k{self.k}-T{self.T:g}-{self.scheme.value}")
        self.plan()  # validates

    def plan(self):
        return CensoringPlan(self.n, self.m, self.k, self.T,
                             build_scheme(self.scheme, self.n, self.m))

    def truth(self):
        return {"alpha": self.true_params.alpha, "beta": self.true_params.beta,
                "reliability": system_reliability(self.spec, self.true_params, self.t_eval)}

    def to_dict(self):
        return {"name": self.name, "n": self.n, "m": self.m, "k": self.k, "T": self.T,
                "scheme": self.scheme.value, "true_params": self.true_params.to_dict(),
                "spec": self.spec.to_dict(), "t_eval": self.t_eval,
                "prior": self.prior.to_dict(), "replications": self.replications,
                "B": self.B, "burn_in": self.burn_in, "gamma": self.gamma,
                "seed": self.seed}


def fast_profile(cell: SimCell) -> SimCell:
    return replace(cell, **FAST_PROFILE)


@dataclass(frozen=True)
class QuantityStats:
    truth: float
    ae_mle: float
    mse_mle: float
    ae_bayes: float
    mse_bayes: float
    aci_lower: float
    aci_upper: float
    aw_aci: float
    hpd_lower: float
    hpd_upper: float
    aw_hpd: float
    aw_percentile: float
    cp_aci: float
    cp_hpd: float


@dataclass(frozen=True, eq=False)
class CellReport:
    cell: SimCell
    stats: dict
    failures: int
    elapsed: float = field(default=0.0, compare=False)
    replicates: dict = field(default=None, repr=False, compare=False)

    def same_results(self, other):
        """Equality ignoring wall-clock time."""
        return (self.cell == other.cell and self.failures == other.failures
                and self.stats == other.stats)


def thread_count():
    raw = os.environ.get(THREADS_ENV, "").strip()
    cpus = os.cpu_count() or 1
    if not raw:
        return cpus
    try:
        return max(1, int(raw))
    except ValueError:
        raise DomainError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None


def replication_rng(seed, replication, attempt=0):
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(replication, attempt)))


def _one_replication(cell, plan, replication, sample_hook):
    failures = 0
    for attempt in range(MAX_ATTEMPTS):
        rng = replication_rng(cell.seed, replication, attempt)
        sample = sample_hook(rng) if sample_hook else generate_gphcs(
            plan, cell.true_params, rng)
        try:
            res = fit(sample)
            intervals = {
                "alpha": aci_param(res, "alpha", cell.gamma),
                "beta": aci_param(res, "beta", cell.gamma),
                "reliability": aci_reliability(res, cell.spec, cell.t_eval, cell.gamma),
            }
        except NumericalError:
            failures += 1
            continue
        break
    else:
        raise CellError(f"cell {cell.name}: replication {replication} failed "
                        f"{MAX_ATTEMPTS} times", cell.name)
    post = mh_sample(sample, cell.prior, res, cell.spec, cell.t_eval,
                     B=cell.B, burn_in=cell.burn_in, rng=rng)
    draws = {"alpha": post.draws_alpha, "beta": post.draws_beta,
             "reliability": post.draws_reliability}
    mle = {"alpha": res.alpha_hat, "beta": res.beta_hat,
           "reliability": mle_system_reliability(res, cell.spec, cell.t_eval)}
    out = {"failures": failures}
    for q in QUANTITIES:
        hpd = credible_interval(draws[q], cell.gamma, "minwidth")
        pct = credible_interval(draws[q], cell.gamma, "percentile")
        aci = intervals[q]
        out[q] = (mle[q], float(np.mean(draws[q])), aci.lower, aci.upper, aci.width,
                  hpd.lower, hpd.upper, hpd.width, pct.width)
    return out


_COLUMNS = ("mle", "bayes", "aci_lower", "aci_upper", "aci_width",
            "hpd_lower", "hpd_upper", "hpd_width", "pct_width")


def aggregate(truth, columns):
    """Reduce per-replication arrays (keyed by ``_COLUMNS``) to a QuantityStats."""
    def mse(est):
        return float(np.mean((est - truth) ** 2))

    covered_aci = (columns["aci_lower"] <= truth) & (truth <= columns["aci_upper"])
    covered_hpd = (columns["hpd_lower"] <= truth) & (truth <= columns["hpd_upper"])
    return QuantityStats(
        truth=float(truth),
        ae_mle=float(np.mean(columns["mle"])), mse_mle=mse(columns["mle"]),
        ae_bayes=float(np.mean(columns["bayes"])), mse_bayes=mse(columns["bayes"]),
        aci_lower=float(np.mean(columns["aci_lower"])),
        aci_upper=float(np.mean(columns["aci_upper"])),
        aw_aci=float(np.mean(columns["aci_width"])),
        hpd_lower=float(np.mean(columns["hpd_lower"])),
        hpd_upper=float(np.mean(columns["hpd_upper"])),
        aw_hpd=float(np.mean(columns["hpd_width"])),
        aw_percentile=float(np.mean(columns["pct_width"])),
        cp_aci=float(np.mean(covered_aci)), cp_hpd=float(np.mean(covered_hpd)))


def run_cell(cell: SimCell, *, sample_hook=None, threads=None) -> CellReport:
    """Replicate one design cell.

    ``sample_hook(rng) -> GphcsSample`` replaces the data generator (testing).
    """
    start = time.perf_counter()
    plan = cell.plan()
    threads = threads or thread_count()
    reps = range(cell.replications)
    if threads > 1 and cell.replications > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(
                lambda r: _one_replication(cell, plan, r, sample_hook), reps))
    else:
        records = [_one_replication(cell, plan, r, sample_hook) for r in reps]
    failures = sum(rec["failures"] for rec in records)
    if failures > FAILURE_CAP * cell.replications:
        raise CellError(f"cell {cell.name}: {failures} failed fits exceed "
                        f"{FAILURE_CAP:.0%} of {cell.replications} replications", cell.name)
    truth = cell.truth()
    replicates, stats = {}, {}
    for q in QUANTITIES:
        table = np.array([rec[q] for rec in records], dtype=np.float64)
        replicates[q] = {name: table[:, j] for j, name in enumerate(_COLUMNS)}
        stats[q] = aggregate(truth[q], replicates[q])
    return CellReport(cell, stats, failures, time.perf_counter() - start, replicates)


def run_design(cells, *, threads=None):
    reports = []
    for cell in cells:
        try:
            reports.append(run_cell(cell, threads=threads))
        except CellError:
            raise
        except Exception as exc:
            raise CellError(f"cell {cell.name}: {exc}", cell.name) from exc
    return reports


# --- design files -----------------------------------------------------------

_POSITIVE = {"type": "number", "exclusiveMinimum": 0}
_CELL_PROPS = {
    "name": {"type": "string"},
    "n": {"type": "integer", "minimum": 1},
    "m": {"type": "integer", "minimum": 1},
    "k": {"type": "integer", "minimum": 1},
    "T": _POSITIVE,
    "scheme": {"enum": ["I", "II", "III"]},
    "true_params": {"type": "object", "properties": {"alpha": _POSITIVE, "beta": _POSITIVE},
                    "required": ["alpha", "beta"], "additionalProperties": False},
    "spec": {"type": "object",
             "properties": {"N": {"type": "integer", "minimum": 1},
                            "K": {"type": "integer", "minimum": 1}},
             "required": ["N", "K"], "additionalProperties": False},
    "t_eval": {"type": "number", "minimum": 0},
    "prior": {"type": "object",
              "properties": {key: _POSITIVE for key in "abcd"},
              "required": list("abcd"), "additionalProperties": False},
    "replications": {"type": "integer", "minimum": 1},
    "B": {"type": "integer", "minimum": 1},
    "burn_in": {"type": "integer", "minimum": 0},
    "gamma": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
    "seed": {"type": "integer", "minimum": 0},
}
DESIGN_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "Simulation design",
    "type": "object",
    "properties": {
        "description": {"type": "string"},
        "defaults": {"type": "object", "properties": _CELL_PROPS,
                     "additionalProperties": False},
        "cells": {"type": "array",
                  "items": {"type": "object", "properties": _CELL_PROPS,
                            "additionalProperties": False}},
    },
    "required": ["cells"],
    "additionalProperties": False,
}


def cell_from_dict(record):
    record = dict(record)
    missing = [key for key in ("n", "m", "k", "T", "scheme") if key not in record]
    if missing:
        raise DomainError(f"cell is missing required fields {missing}")
    if "true_params" in record:
        record["true_params"] = WeibullParams(**record["true_params"])
    if "spec" in record:
        record["spec"] = SystemSpec(**record["spec"])
    if "prior" in record:
        record["prior"] = PriorSpec(**record["prior"])
    return SimCell(**record)


def load_design(source):
    """Parse and validate a design document (path, file object or dict)."""
    if isinstance(source, dict):
        doc = source
    elif hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    try:
        jsonschema.validate(doc, DESIGN_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise DomainError(f"invalid design at {path}: {exc.message}") from None
    defaults = doc.get("defaults", {})
    return [cell_from_dict({**defaults, **cell}) for cell in doc["cells"]]


# --- rendering --------------------------------------------------------------

CSV_HEADER = ("cell", "n", "m", "k", "T", "scheme", "quantity", "truth",
              "AE_mle", "MSE_mle", "AE_bayes", "MSE_bayes",
              "ACI_lower", "ACI_upper", "AW_aci", "HPD_lower", "HPD_upper", "AW_hpd",
              "AW_percentile", "CP_aci", "CP_hpd", "failures", "replications")


def to_csv(reports):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rep in reports:
        c = rep.cell
        for q in QUANTITIES:
            s = rep.stats[q]
            writer.writerow([c.name, c.n, c.m, c.k, repr(c.T), c.scheme.value, q]
                            + [repr(v) for v in (
                                s.truth, s.ae_mle, s.mse_mle, s.ae_bayes, s.mse_bayes,
                                s.aci_lower, s.aci_upper, s.aw_aci,
                                s.hpd_lower, s.hpd_upper, s.aw_hpd,
                                s.aw_percentile, s.cp_aci, s.cp_hpd)]
                            + [rep.failures, c.replications])
    return buf.getvalue()


def _design_cols(cell, first):
    if first:
        return [str(cell.n), str(cell.m), str(cell.k), cell.scheme.value]
    return ["", "", "", ""]


def _align(rows):
    widths = [max(len(r[j]) for r in rows) for j in range(len(rows[0]))]
    lines = []
    for i, r in enumerate(rows):
        lines.append("  ".join(v.rjust(w) for v, w in zip(r, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def render_estimates_table(reports):
    """AE on one line, MSE in parentheses beneath."""
    head = ["n", "m", "k", "CS", "alpha", "beta", "R", "alpha_BE", "beta_BE", "R_BE"]
    rows = [head]
    for rep in reports:
        st = [rep.stats[q] for q in QUANTITIES]
        rows.append(_design_cols(rep.cell, True)
                    + [f"{s.ae_mle:.4f}" for s in st] + [f"{s.ae_bayes:.4f}" for s in st])
        rows.append(_design_cols(rep.cell, False)
                    + [f"({s.mse_mle:.4f})" for s in st]
                    + [f"({s.mse_bayes:.4f})" for s in st])
    return _align(rows)


def render_intervals_table(reports):
    """Average interval endpoints, AW beneath."""
    head = ["n", "m", "k", "CS", "alpha ACI", "alpha HPD", "beta ACI", "beta HPD",
            "R ACI", "R HPD"]
    rows = [head]
    for rep in reports:
        top, bottom = _design_cols(rep.cell, True), _design_cols(rep.cell, False)
        for q in QUANTITIES:
            s = rep.stats[q]
            top += [f"({s.aci_lower:.4f}, {s.aci_upper:.4f})",
                    f"({s.hpd_lower:.4f}, {s.hpd_upper:.4f})"]
            bottom += [f"{s.aw_aci:.4f}", f"{s.aw_hpd:.4f}"]
        rows += [top, bottom]
    return _align(rows)


def render_report(reports):
    if not reports:
        return "(empty design)\n"
    parts = ["Average estimates (MSE in parentheses)", "",
             render_estimates_table(reports), "",
             "Average interval bounds (average width beneath)", "",
             render_intervals_table(reports), "",
             "cell failures / elapsed:"]
    for rep in reports:
        parts.append(f"  {rep.cell.name}: {rep.failures} re-drawn fits, "
                     f"{rep.elapsed:.1f} s")
    return "\n".join(parts) + "\n"


def report_to_dict(rep: CellReport):
    return {"cell": rep.cell.to_dict(), "failures": rep.failures,
            "elapsed_s": rep.elapsed,
            "stats": {q: asdict(rep.stats[q]) for q in QUANTITIES}}
