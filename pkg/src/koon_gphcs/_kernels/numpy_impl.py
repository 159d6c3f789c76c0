"""Pure-numpy kernels.

The Markov chain is inherently sequential, so ``mh_chain`` keeps a Python
loop over iterations and vectorises only the per-iteration likelihood sums.
"""

import numpy as np

NAME = "numpy"


def log_binomial_coefficients(n_total):
    """log C(n, i) for i = 0..n, built by cumulative ratios."""
    i = np.arange(1, n_total + 1, dtype=np.float64)
    out = np.zeros(n_total + 1)
    out[1:] = np.cumsum(np.log(n_total - i + 1.0) - np.log(i))
    return out


def system_reliability_draws(alphas, betas, t, n_total, k_min):
    """K-out-of-N:G reliability at time ``t`` for each (alpha, beta) pair."""
    alphas = np.asarray(alphas, dtype=np.float64)
    betas = np.asarray(betas, dtype=np.float64)
    if t == 0.0:
        return np.ones(np.broadcast(alphas, betas).shape)
    s = betas * np.exp(alphas * np.log(t))
    q = -np.expm1(-s)
    logc = log_binomial_coefficients(n_total)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_q = np.log(q)
        total = np.zeros_like(s)
        for i in range(k_min, n_total + 1):
            if i == n_total:
                total += np.exp(logc[i] - i * s)
            else:
                total += np.exp(logc[i] - i * s + (n_total - i) * log_q)
    total = np.where(q == 0.0, 1.0, total)
    return np.clip(total, 0.0, 1.0)


def _weighted_power_sum(log_x, weights, alpha):
    return float(np.dot(weights, np.exp(alpha * log_x)))


def mh_chain(log_x, weights, sum_log_failures, n_failures,
             a, b, c, d, alpha0, beta0, sd_alpha, sd_beta,
             z_alpha, z_beta, log_u_alpha, log_u_beta, fix_alpha):
    """Gibbs-within-Metropolis chain for (alpha, beta).

    ``log_x``/``weights`` hold every term of the censored exposure
    sum W(alpha) = sum_j weights[j] * exp(alpha * log_x[j]); the censored
    block at the termination time is just one more entry. ``z_*`` are standard
    normal increments and ``log_u_*`` log-uniforms, one per iteration.

    Returns (alphas, betas, accepted_alpha, accepted_beta) over all
    iterations; burn-in and thinning are left to the caller.
    """
    n_iter = z_alpha.shape[0]
    alphas = np.empty(n_iter)
    betas = np.empty(n_iter)
    shape_a = n_failures + a - 1.0
    shape_b = n_failures + c - 1.0
    cur_a = alpha0
    cur_b = beta0
    cur_w = _weighted_power_sum(log_x, weights, cur_a)
    acc_a = 0
    acc_b = 0
    for j in range(n_iter):
        if not fix_alpha:
            prop = cur_a + sd_alpha * z_alpha[j]
            if prop > 0.0:
                with np.errstate(over="ignore"):
                    prop_w = _weighted_power_sum(log_x, weights, prop)
                log_ratio = (shape_a * (np.log(prop) - np.log(cur_a))
                             - b * (prop - cur_a)
                             + (prop - cur_a) * sum_log_failures
                             - cur_b * (prop_w - cur_w))
                if log_u_alpha[j] < log_ratio:
                    if prop != cur_a:
                        acc_a += 1
                    cur_a = prop
                    cur_w = prop_w
        prop = cur_b + sd_beta * z_beta[j]
        if prop > 0.0:
            log_ratio = (shape_b * (np.log(prop) - np.log(cur_b))
                         - (d + cur_w) * (prop - cur_b))
            if log_u_beta[j] < log_ratio:
                if prop != cur_b:
                    acc_b += 1
                cur_b = prop
        alphas[j] = cur_a
        betas[j] = cur_b
    return alphas, betas, acc_a, acc_b
