import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from koon_gphcs.errors import DomainError
from koon_gphcs.koon import (SystemSpec, reliability_from_component, system_reliability,
                             system_reliability_gradient)
from koon_gphcs.weibull import WeibullParams, reliability

P = WeibullParams(1.5, 1.0)


def brute_force(n_total, k_min, r):
    """Sum r^up (1-r)^down over all 2^N component states with >= K up."""
    total = 0.0
    for states in itertools.product((0, 1), repeat=n_total):
        up = sum(states)
        if up >= k_min:
            total += r**up * (1 - r) ** (n_total - up)
    return total


def central_diff(fn, x, h):
    # five-point stencil
    return (fn(x - 2 * h) - 8 * fn(x - h) + 8 * fn(x + h) - fn(x + 2 * h)) / (12 * h)


@pytest.mark.parametrize("n_total, k_min", [(0, 0), (3, 0), (3, 4), (10_001, 1)])
def test_spec_validation(n_total, k_min):
    with pytest.raises(DomainError):
        SystemSpec(n_total, k_min)


def test_three_of_five_value():
    assert system_reliability(SystemSpec(5, 3), P, 0.5) == pytest.approx(0.8398, abs=1e-4)


def test_time_zero_is_one():
    assert system_reliability(SystemSpec(7, 4), WeibullParams(0.3, 9.0), 0.0) == 1.0


def test_single_component_reduces():
    assert system_reliability(SystemSpec(1, 1), P, 0.5) == pytest.approx(
        reliability(P, 0.5), rel=1e-14)


def test_component_form_brute_force_example():
    assert brute_force(4, 2, 0.6) == pytest.approx(0.8208, abs=1e-15)
    assert reliability_from_component(SystemSpec(4, 2), 0.6) == pytest.approx(0.8208,
                                                                              abs=1e-14)


@pytest.mark.parametrize("n_total", range(1, 7))
@pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 2.0])
def test_brute_force_equivalence(n_total, t):
    r = reliability(P, t)
    for k_min in range(1, n_total + 1):
        got = system_reliability(SystemSpec(n_total, k_min), P, t)
        assert got == pytest.approx(brute_force(n_total, k_min, r), abs=1e-12)


@given(st.integers(1, 40), st.data(), st.floats(0.01, 3.0))
def test_structure_identities(n_total, data, t):
    k_min = data.draw(st.integers(1, n_total))
    r = reliability(P, t)
    val = system_reliability(SystemSpec(n_total, k_min), P, t)
    lower_tail = sum(math.comb(n_total, i) * r**i * (1 - r) ** (n_total - i)
                     for i in range(k_min))
    assert val + lower_tail == pytest.approx(1.0, abs=1e-10)
    if k_min > 1:
        assert val <= system_reliability(SystemSpec(n_total, k_min - 1), P, t) + 1e-15
    assert val >= system_reliability(SystemSpec(n_total, k_min), P, t * 1.1) - 1e-15


@given(st.integers(1, 30), st.floats(0.01, 3.0))
def test_series_and_parallel(n_total, t):
    r = reliability(P, t)
    parallel = system_reliability(SystemSpec(n_total, 1), P, t)
    series = system_reliability(SystemSpec(n_total, n_total), P, t)
    assert parallel == pytest.approx(1 - (1 - r) ** n_total, abs=1e-12)
    assert series == pytest.approx(r**n_total, abs=1e-12)


def test_large_system_is_finite():
    val = system_reliability(SystemSpec(10_000, 5_000), WeibullParams(1.0, math.log(2)), 1.0)
    assert 0.0 <= val <= 1.0
    assert val == pytest.approx(0.5, abs=0.01)


def test_gradient_single_component():
    for t in (0.3, 0.5, 2.0):
        g = system_reliability_gradient(SystemSpec(1, 1), P, t)
        assert g.d_beta == pytest.approx(-t**1.5 * math.exp(-t**1.5), rel=1e-12)


def test_gradient_alpha_vanishes_at_unit_time():
    assert system_reliability_gradient(SystemSpec(5, 3), P, 1.0).d_alpha == 0.0


def test_gradient_zero_time():
    g = system_reliability_gradient(SystemSpec(5, 3), P, 0.0)
    assert (g.d_alpha, g.d_beta) == (0.0, 0.0)


GRID_PARAMS = [(1.5, 1.0), (0.9, 0.023), (2.0, 0.5)]


@pytest.mark.parametrize("alpha, beta", GRID_PARAMS)
@pytest.mark.parametrize("n_total", [1, 3, 5, 10])
@pytest.mark.parametrize("t", [0.25, 0.5, 1.0, 2.0])
def test_gradient_matches_finite_differences(alpha, beta, n_total, t):
    for k_min in sorted({1, math.ceil(n_total / 2), n_total}):
        spec = SystemSpec(n_total, k_min)
        g = system_reliability_gradient(spec, WeibullParams(alpha, beta), t)
        fd_a = central_diff(lambda a: system_reliability(spec, WeibullParams(a, beta), t),
                            alpha, 1e-4 * alpha)
        fd_b = central_diff(lambda b: system_reliability(spec, WeibullParams(alpha, b), t),
                            beta, 1e-4 * beta)
        # absolute floor for derivatives that are ~0 to machine precision
        assert g.d_alpha == pytest.approx(fd_a, rel=1e-5, abs=1e-10)
        assert g.d_beta == pytest.approx(fd_b, rel=1e-5, abs=1e-10 / beta)


def test_printed_factor_is_not_the_derivative():
    spec, p, t = SystemSpec(5, 3), WeibullParams(0.8967, 0.02307), 50.0
    exact = system_reliability_gradient(spec, p, t)
    printed = system_reliability_gradient(spec, p, t, factor="printed")
    fd = central_diff(lambda b: system_reliability(spec, WeibullParams(p.alpha, b), t),
                      p.beta, 1e-4 * p.beta)
    assert exact.d_beta == pytest.approx(fd, rel=1e-5)
    assert abs(printed.d_beta - fd) > 0.5 * abs(fd)


def test_gradient_bad_factor():
    with pytest.raises(DomainError):
        system_reliability_gradient(SystemSpec(5, 3), P, 0.5, factor="other")
