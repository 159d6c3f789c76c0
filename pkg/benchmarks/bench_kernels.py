"""Time the numba and numpy kernel backends on the same inputs.

    python benchmarks/bench_kernels.py [--iters 12000] [--repeat 5]

The chain benchmark uses the real-data sample with k=12, T=80 and the
simulation prior; both backends consume identical pre-drawn random numbers.
"""

import argparse
import time

import numpy as np

from koon_gphcs import _kernels
from koon_gphcs.bayes import PriorSpec
from koon_gphcs.censoring import CensoringPlan, ProgressiveSample, apply_gphcs_rule
from koon_gphcs.datasets import load_dataset
from koon_gphcs.frequentist import fit


def chain_inputs(iters, seed):
    times = load_dataset("bundled:aircon-progressive").times
    plan = CensoringPlan(30, 20, 12, 80.0, [2] * 5 + [0] * 15)
    s = apply_gphcs_rule(ProgressiveSample(times, plan), plan)
    res = fit(s)
    prior = PriorSpec(3, 2, 2.5, 2.5)
    gen = np.random.default_rng(seed)
    log_x, weights = s.exposure_terms()
    return (log_x, weights, float(s.log_times.sum()), s.D, prior.a, prior.b, prior.c,
            prior.d, res.alpha_hat, res.beta_hat, np.sqrt(res.var_alpha),
            np.sqrt(res.var_beta), gen.standard_normal(iters), gen.standard_normal(iters),
            np.log(gen.random(iters)), np.log(gen.random(iters)), False)


def best_of(fn, repeat):
    fn()  # warm-up (triggers JIT compilation for numba)
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--iters", type=int, default=12_000)
    parser.add_argument("--draws", type=int, default=10_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    inputs = chain_inputs(args.iters, 1)
    gen = np.random.default_rng(2)
    alphas = gen.uniform(0.5, 2.0, args.draws)
    betas = gen.uniform(0.5, 2.0, args.draws)

    rows = []
    for name in _kernels.available():
        impl = _kernels.get(name)
        t_chain = best_of(lambda: impl.mh_chain(*inputs), args.repeat)
        t_rel = best_of(lambda: impl.system_reliability_draws(alphas, betas, 0.5, 5, 3),
                        args.repeat)
        rows.append((name, t_chain, t_rel))

    print(f"mh_chain: {args.iters} iterations; reliability draws: {args.draws}; "
          f"best of {args.repeat}")
    print(f"{'backend':8} {'mh_chain [ms]':>14} {'rel draws [ms]':>15}")
    for name, t_chain, t_rel in rows:
        print(f"{name:8} {1e3 * t_chain:14.2f} {1e3 * t_rel:15.2f}")
    if len(rows) == 2:
        (_, c0, r0), (_, c1, r1) = sorted(rows, key=lambda r: r[0] != "numba")
        print(f"numpy / numba speed ratio: chain {c1 / c0:.1f}x, draws {r1 / r0:.1f}x")


if __name__ == "__main__":
    main()
