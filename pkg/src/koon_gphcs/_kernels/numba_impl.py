"""numba-compiled kernels; same signatures and semantics as ``numpy_impl``."""

import math

import numba as nb
import numpy as np

NAME = "numba"


@nb.njit(cache=True, nogil=True)
def log_binomial_coefficients(n_total):
    out = np.zeros(n_total + 1)
    for i in range(1, n_total + 1):
        out[i] = out[i - 1] + math.log(n_total - i + 1.0) - math.log(float(i))
    return out


@nb.njit(cache=True, nogil=True)
def _reliability_one(alpha, beta, log_t, logc, n_total, k_min):
    s = beta * math.exp(alpha * log_t)
    q = -math.expm1(-s)
    if q == 0.0:
        return 1.0
    log_q = math.log(q) if q > 0.0 else -np.inf
    total = 0.0
    for i in range(k_min, n_total + 1):
        if i == n_total:
            total += math.exp(logc[i] - i * s)
        else:
            total += math.exp(logc[i] - i * s + (n_total - i) * log_q)
    return min(max(total, 0.0), 1.0)


@nb.njit(cache=True, nogil=True)
def _reliability_loop(alphas, betas, t, n_total, k_min):
    out = np.empty(alphas.shape[0])
    if t == 0.0:
        out[:] = 1.0
        return out
    logc = log_binomial_coefficients(n_total)
    log_t = math.log(t)
    for j in range(alphas.shape[0]):
        out[j] = _reliability_one(alphas[j], betas[j], log_t, logc, n_total, k_min)
    return out


def system_reliability_draws(alphas, betas, t, n_total, k_min):
    alphas, betas = np.broadcast_arrays(np.asarray(alphas, dtype=np.float64),
                                        np.asarray(betas, dtype=np.float64))
    shape = alphas.shape
    out = _reliability_loop(np.ascontiguousarray(alphas).ravel(),
                            np.ascontiguousarray(betas).ravel(),
                            float(t), int(n_total), int(k_min))
    return out.reshape(shape)


@nb.njit(cache=True, nogil=True)
def _weighted_power_sum(log_x, weights, alpha):
    total = 0.0
    for j in range(log_x.shape[0]):
        total += weights[j] * math.exp(alpha * log_x[j])
    return total


@nb.njit(cache=True, nogil=True)
def _chain(log_x, weights, sum_log_failures, n_failures, a, b, c, d,
           alpha0, beta0, sd_alpha, sd_beta,
           z_alpha, z_beta, log_u_alpha, log_u_beta, fix_alpha):
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
                prop_w = _weighted_power_sum(log_x, weights, prop)
                log_ratio = (shape_a * (math.log(prop) - math.log(cur_a))
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
            log_ratio = (shape_b * (math.log(prop) - math.log(cur_b))
                         - (d + cur_w) * (prop - cur_b))
            if log_u_beta[j] < log_ratio:
                if prop != cur_b:
                    acc_b += 1
                cur_b = prop
        alphas[j] = cur_a
        betas[j] = cur_b
    return alphas, betas, acc_a, acc_b


def mh_chain(log_x, weights, sum_log_failures, n_failures,
             a, b, c, d, alpha0, beta0, sd_alpha, sd_beta,
             z_alpha, z_beta, log_u_alpha, log_u_beta, fix_alpha):
    return _chain(np.ascontiguousarray(log_x, dtype=np.float64),
                  np.ascontiguousarray(weights, dtype=np.float64),
                  float(sum_log_failures), float(n_failures),
                  float(a), float(b), float(c), float(d),
                  float(alpha0), float(beta0), float(sd_alpha), float(sd_beta),
                  np.ascontiguousarray(z_alpha, dtype=np.float64),
                  np.ascontiguousarray(z_beta, dtype=np.float64),
                  np.ascontiguousarray(log_u_alpha, dtype=np.float64),
                  np.ascontiguousarray(log_u_beta, dtype=np.float64),
                  bool(fix_alpha))
