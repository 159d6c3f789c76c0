"""Command-line interface: ``koon-gphcs {gof,analyze,simulate,reliability}``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

import argparse
import json
import os
import secrets
import sys
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__, mcsim
from .bayes import PriorSpec, mh_sample, self_estimates
from .censoring import (CensoringPlan, GphcsSample, ProgressiveSample, apply_gphcs_rule,
                        progressive_from_complete)
from .datasets import Dataset, design_path, load_dataset
from .errors import (CellError, ContractError, DomainError, GphcsError, NumericalError,
                     ParseError)
from .frequentist import (FitResult, aci_param, aci_reliability, fit, ks_test,
                          mle_system_reliability)
from .koon import SystemSpec, system_reliability
from .weibull import WeibullParams

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
RATE_NOTE = "F(x) = 1 - exp(-beta * x^alpha); beta is a rate in time^(-alpha), not a scale"


@dataclass
class AnalysisReport:
    fit: FitResult
    bayes: object
    intervals: dict
    sample_meta: dict
    settings: dict
    estimates: dict
    gof: tuple = None
    notes: list = field(default_factory=list)

    def to_dict(self):
        return {
            "settings": self.settings,
            "sample": self.sample_meta,
            "fit": self.fit.to_dict(),
            "estimates": self.estimates,
            "bayes": self.bayes.to_dict(),
            "intervals": {k: v.to_dict() for k, v in self.intervals.items()},
            "gof": None if self.gof is None else {"statistic": self.gof[0],
                                                  "p_value": self.gof[1]},
            "parameterisation": RATE_NOTE,
        }


# --- programmatic commands --------------------------------------------------

def cmd_gof(dataset: Dataset):
    """Complete-sample MLE followed by the K-S test against the fitted law."""
    res = fit(GphcsSample.complete(dataset.times))
    ks = ks_test(dataset.times, res.params_hat)
    return {"dataset": dataset.source, "n": len(dataset),
            "alpha_hat": res.alpha_hat, "beta_hat": res.beta_hat,
            "statistic": ks.statistic, "p_value": ks.p_value}


def build_sample(dataset, plan, *, progressive, rng):
    if progressive:
        prog = ProgressiveSample(dataset.times, plan)
    else:
        times = dataset.times
        if times.size > plan.n:
            times = rng.choice(times, size=plan.n, replace=False)
        prog = progressive_from_complete(times, plan, rng)
    return apply_gphcs_rule(prog, plan)


def cmd_analyze(dataset: Dataset, plan: CensoringPlan, spec: SystemSpec, t, *,
                progressive=False, prior=None, B=10_000, burn_in=2_000, gamma=0.05,
                hpd_method="minwidth", seed=0) -> AnalysisReport:
    rng = np.random.default_rng(seed)
    sample = build_sample(dataset, plan, progressive=progressive, rng=rng)
    prior = prior or PriorSpec.noninformative()
    res = fit(sample)
    intervals = {
        "alpha_aci": aci_param(res, "alpha", gamma),
        "beta_aci": aci_param(res, "beta", gamma),
        "reliability_aci": aci_reliability(res, spec, t, gamma),
    }
    post = mh_sample(sample, prior, res, spec, t, B=B, burn_in=burn_in, rng=rng)
    bayes = self_estimates(post, gamma, hpd_method)
    for name, interval in bayes.intervals.items():
        intervals[f"{name}_credible"] = interval
    gof = None
    if sample.r_star == 0 and not sample.removals.any() and sample.D == sample.n:
        gof = tuple(ks_test(sample.times, res.params_hat))
    estimates = {"alpha_mle": res.alpha_hat, "beta_mle": res.beta_hat,
                 "reliability_mle": mle_system_reliability(res, spec, t),
                 "alpha_bayes": bayes.alpha_se, "beta_bayes": bayes.beta_se,
                 "reliability_bayes": bayes.reliability_se,
                 "accept_rate_alpha": post.accept_rate_alpha,
                 "accept_rate_beta": post.accept_rate_beta}
    settings = {"dataset": dataset.source, "mode": "progressive" if progressive else "raw",
                "plan": plan.to_dict(), "system": spec.to_dict(), "t": float(t),
                "prior": prior.to_dict(), "B": B, "burn_in": burn_in, "gamma": gamma,
                "hpd_method": hpd_method, "seed": seed, "backend": post.backend}
    report = AnalysisReport(res, bayes, intervals, sample.to_dict(), settings, estimates, gof)
    report._posterior = post
    return report


def cmd_reliability(alpha, beta, N, K, t):
    return system_reliability(SystemSpec(N, K), WeibullParams(alpha, beta), t)


def cmd_simulate(design, *, fast=False, seed=None, out=None, threads=None):
    cells = mcsim.load_design(design)
    if fast:
        cells = [mcsim.fast_profile(c) for c in cells]
    if seed is not None:
        cells = [replace(c, seed=seed + i) for i, c in enumerate(cells)]
    reports = mcsim.run_design(cells, threads=threads)
    csv_text = mcsim.to_csv(reports)
    table_text = mcsim.render_report(reports)
    if out:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, "results.csv"), "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        with open(os.path.join(out, "tables.md"), "w", encoding="utf-8") as fh:
            fh.write(table_text)
        with open(os.path.join(out, "results.json"), "w", encoding="utf-8") as fh:
            json.dump([mcsim.report_to_dict(r) for r in reports], fh, indent=2)
    return reports, csv_text, table_text


# --- rendering --------------------------------------------------------------

def _fmt_interval(iv):
    return f"({iv.lower:.4f}, {iv.upper:.4f})"


def render_analysis(rep: AnalysisReport):
    s, e, st = rep.sample_meta, rep.estimates, rep.settings
    sys_ = st["system"]
    lines = [
        f"seed: {st['seed']}",
        f"data: {st['dataset']} ({st['mode']} mode)",
        "plan: n={n} m={m} k={k} T={T:g} removals={r}".format(
            r=",".join(str(x) for x in st["plan"]["removals"]), **st["plan"]),
        f"sample: case {s['case']}, D={s['D']}, T*={s['T_star']:g}, R*={s['R_star']}",
        f"parameterisation: {RATE_NOTE}",
        "",
        f"Point estimates, R = {sys_['K']}-out-of-{sys_['N']} reliability at t={st['t']:g}",
        f"  {'':10}{'alpha':>10}{'beta(rate)':>12}{'R':>10}",
        f"  {'MLE':10}{e['alpha_mle']:>10.4f}{e['beta_mle']:>12.4f}{e['reliability_mle']:>10.4f}",
        f"  {'Bayes':10}{e['alpha_bayes']:>10.4f}{e['beta_bayes']:>12.4f}"
        f"{e['reliability_bayes']:>10.4f}",
        "",
        f"{100 * (1 - st['gamma']):g}% intervals (credible: {st['hpd_method']})",
    ]
    for q in ("alpha", "beta", "reliability"):
        aci = rep.intervals[f"{q}_aci"]
        cred = rep.intervals.get(f"{q}_credible")
        cred_txt = _fmt_interval(cred) if cred else "n/a"
        lines.append(f"  {q:12} ACI {_fmt_interval(aci):>20}   credible {cred_txt:>20}")
    lines.append(f"acceptance rates: alpha {e['accept_rate_alpha']:.3f}, "
                 f"beta {e['accept_rate_beta']:.3f}")
    if rep.gof is not None:
        lines.append(f"K-S: statistic {rep.gof[0]:.4f}, p-value {rep.gof[1]:.4f}")
    return "\n".join(lines) + "\n"


# --- argument parsing -------------------------------------------------------

def _parse_removals(text):
    """``2,2,0`` or run-length ``2*5,0*15``."""
    out = []
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        value, _, count = tok.partition("*")
        try:
            out.extend([int(value)] * (int(count) if count else 1))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad removal token {tok!r}") from None
    return out


def _parse_prior(text):
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("prior must be four numbers a,b,c,d") from None
    if len(values) != 4:
        raise argparse.ArgumentTypeError("prior must be four numbers a,b,c,d")
    return values


def _add_data_args(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="data file (commas/whitespace; '#' comments)")
    src.add_argument("--bundled", help="bundled dataset: aircon, aircon-progressive")


def _add_seed(p):
    p.add_argument("--seed", type=int, default=None,
                   help="random seed (drawn from system entropy if omitted)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="koon-gphcs",
        description="Weibull K-out-of-N:G reliability from generalized progressive "
                    "hybrid censored data. " + RATE_NOTE + ".")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gof", help="complete-sample Weibull fit and K-S test")
    _add_data_args(p)
    p.add_argument("--out", help="write gof.json to this directory")

    p = sub.add_parser("analyze", help="MLE + Bayes analysis of one censored sample")
    _add_data_args(p)
    p.add_argument("--progressive", action="store_true",
                   help="data already is a progressive Type-II sample of length m")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--T", type=float, required=True)
    plan = p.add_mutually_exclusive_group()
    plan.add_argument("--scheme", choices=["I", "II", "III"])
    plan.add_argument("--removals", type=_parse_removals,
                      help="R_1..R_m, e.g. 2,2,2,2,2,0,... or 2*5,0*15")
    p.add_argument("--N", type=int, default=5)
    p.add_argument("--K", type=int, default=3)
    p.add_argument("--t", type=float, required=True)
    prior = p.add_mutually_exclusive_group()
    prior.add_argument("--prior", type=_parse_prior, help="gamma hyperparameters a,b,c,d")
    prior.add_argument("--noninformative", action="store_true",
                       help="a=b=c=d=1e-4 (default when --prior is absent)")
    p.add_argument("--B", type=int, default=10_000)
    p.add_argument("--burn-in", type=int, default=2_000)
    p.add_argument("--gamma", type=float, default=0.05)
    p.add_argument("--hpd-method", choices=["minwidth", "percentile"], default="minwidth")
    _add_seed(p)
    p.add_argument("--out", help="write analysis.json, analysis.md and draws.csv here")

    p = sub.add_parser("simulate", help="run a Monte Carlo design")
    p.add_argument("design", help="design JSON file or bundled:<name> "
                                  "(table1_block1, table1, table3, extra_cell)")
    p.add_argument("--fast", action="store_true",
                   help="B=2000, burn-in=500, 1000 replications per cell")
    p.add_argument("--seed", type=int, default=None,
                   help="override cell seeds with seed, seed+1, ...")
    p.add_argument("--out", help="output directory for results.csv/tables.md/results.json")

    p = sub.add_parser("reliability", help="K-out-of-N:G system reliability")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True, help="rate, time^(-alpha)")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    return parser


def _dataset(args):
    return load_dataset(args.data if args.data else f"bundled:{args.bundled}")


def _plan_from_args(args, dataset):
    m = args.m
    if args.progressive:
        m = m or len(dataset)
        if m != len(dataset):
            raise DomainError(f"--m={m} but the progressive sample has {len(dataset)} values")
    n = args.n
    if args.removals is not None:
        if m is None:
            m = len(args.removals)
        if n is None:
            n = m + sum(args.removals)
        removals = args.removals
    else:
        if n is None:
            if args.progressive:
                raise DomainError("--n is required with --scheme in progressive mode")
            n = len(dataset)
        if m is None:
            raise DomainError("--m is required")
        removals = mcsim.build_scheme(args.scheme or "I", n, m)
    if not args.progressive and len(dataset) < n:
        raise DomainError(f"raw mode needs at least n={n} values, got {len(dataset)}")
    return CensoringPlan(n, m, args.k, args.T, removals)


def _run(args, out):
    if args.command == "reliability":
        value = cmd_reliability(args.alpha, args.beta, args.N, args.K, args.t)
        print(f"{value:.6f}", file=out)
        return EXIT_OK

    if args.command == "gof":
        result = cmd_gof(_dataset(args))
        print(f"data: {result['dataset']} (n={result['n']})", file=out)
        print(f"parameterisation: {RATE_NOTE}", file=out)
        print(f"alpha_hat = {result['alpha_hat']:.6f}, beta_hat = {result['beta_hat']:.6f}",
              file=out)
        print(f"K-S statistic = {result['statistic']:.4f}, p-value = {result['p_value']:.4f}",
              file=out)
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            with open(os.path.join(args.out, "gof.json"), "w", encoding="utf-8") as fh:
                json.dump(result, fh, indent=2)
        return EXIT_OK

    if args.command == "analyze":
        dataset = _dataset(args)
        plan = _plan_from_args(args, dataset)
        seed = args.seed if args.seed is not None else secrets.randbits(63)
        prior = PriorSpec(*args.prior) if args.prior else PriorSpec.noninformative()
        report = cmd_analyze(dataset, plan, SystemSpec(args.N, args.K), args.t,
                             progressive=args.progressive, prior=prior, B=args.B,
                             burn_in=args.burn_in, gamma=args.gamma,
                             hpd_method=args.hpd_method, seed=seed)
        text = render_analysis(report)
        out.write(text)
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            with open(os.path.join(args.out, "analysis.json"), "w", encoding="utf-8") as fh:
                json.dump(report.to_dict(), fh, indent=2)
            with open(os.path.join(args.out, "analysis.md"), "w", encoding="utf-8") as fh:
                fh.write(text)
            report._posterior.to_csv(os.path.join(args.out, "draws.csv"))
        return EXIT_OK

    if args.command == "simulate":
        design = args.design
        if design.startswith("bundled:"):
            design = str(design_path(design.split(":", 1)[1]))
        try:
            _, _, table = cmd_simulate(design, fast=args.fast, seed=args.seed, out=args.out)
        except OSError as exc:
            raise ParseError(f"cannot read design: {exc.strerror}", source=design) from None
        except json.JSONDecodeError as exc:
            raise ParseError(f"design is not valid JSON: {exc.msg}", exc.lineno, exc.colno,
                             design) from None
        out.write(table)
        return EXIT_OK
    raise AssertionError(args.command)  # pragma: no cover


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args, out)
    except (ParseError, ContractError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalError, CellError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, GphcsError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
