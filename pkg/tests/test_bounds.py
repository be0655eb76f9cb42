import json
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subgc.bounds import (
    BoundReport,
    GCParams,
    RevenueParams,
    closed_form_pq,
    lemma_failure_bound,
    massart_bound,
    n0_revenue,
    n0_submult,
    reduce_revenue_to_gc,
    solve_lnln_recursion,
    tail_sum_bounds,
    tune_pq,
)
from subgc.distributions import EqualRevenue, Eta, Pareto, Uniform01

mp.mp.dps = 50


# -- independent high-precision references -------------------------------------

def mp_lemma(n, eps, alpha, p, q):
    n, eps, alpha, p, q = map(mp.mpf, (n, eps, alpha, p, q))
    if q / n >= p:
        mid = mp.mpf(0)
    else:
        m = mp.ceil(mp.log(mp.log(n / q)) / mp.log((1 + alpha) / (2 * alpha)))
        mid = m * p ** ((1 - alpha) / 2) / eps
    return q + mid + 2 * mp.exp(-2 * n * (eps * p**alpha) ** 2)


def mp_n0(eps, delta, alpha):
    eps, delta, alpha = map(mp.mpf, (eps, delta, alpha))
    F = 4 * alpha / (1 - alpha)
    base = mp.log(6 / delta) / (2 * eps**2)
    if alpha == 0:
        first, D = base, base
        second = D + 1
    else:
        first = base * (eps * delta / 3) ** (-F)
        D = base * (eps * delta / 6 * mp.log((1 + alpha) / (2 * alpha))) ** (-F)
        second = (D + 1) * (10 * mp.log(12 * (D + 4) / (delta * (1 - alpha)))) ** F
    return max(first, second)


# -- massart ---------------------------------------------------------------------

@pytest.mark.parametrize("n, eps", [(100, 0.1), (50, 0.2), (20, 0.15), (1, 1.0), (10**6, 0.001)])
def test_massart_matches_mpmath(n, eps):
    assert massart_bound(n, eps) == pytest.approx(float(2 * mp.exp(-2 * n * mp.mpf(eps) ** 2)), rel=1e-13)


def test_massart_examples():
    assert massart_bound(100, 0.1) == pytest.approx(0.270671, abs=5e-7)
    assert massart_bound(50, 0.2) == pytest.approx(0.0366313, abs=5e-8)
    assert massart_bound(10, 1e-12) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        massart_bound(0, 0.1)
    with pytest.raises(ValueError):
        massart_bound(10, 0.0)


# -- lemma bound -------------------------------------------------------------------

def test_lemma_example():
    r = lemma_failure_bound(10**5, 0.5, 0.25, 1e-4, 0.02)
    assert r.feasible and r.m == 3
    assert r.bound == pytest.approx(0.209737, abs=5e-7)
    assert r.bound == pytest.approx(0.02 + 3 * 10**-1.5 / 0.5 + 2 * math.exp(-500), rel=1e-14)
    assert r.bound == 0.20973665961010274  # frozen


def test_lemma_infeasible_p():
    r = lemma_failure_bound(10**5, 0.5, 0.25, 0.5, 0.1)
    assert not r.feasible and r.bound == math.inf and "p=" in r.diagnostic


def test_lemma_empty_middle_region():
    # the size hypothesis fails here, but the middle term is still reported as 0
    r = lemma_failure_bound(2, 0.3, 0.5, 0.05, 0.5)
    assert r.terms[1] == 0.0 and r.m == 0 and not r.feasible


def test_lemma_rejects_bad_inputs():
    for args in [(10, 0.5, 0.0, 0.01, 0.1), (10, 0.5, 1.0, 0.01, 0.1), (10, 0.5, 0.5, 0.0, 0.1),
                 (10, 0.5, 0.5, 0.01, 0.0), (10, -1.0, 0.5, 0.01, 0.1)]:
        r = lemma_failure_bound(*args)
        assert not r.feasible and math.isinf(r.bound)


@given(n=st.integers(10, 10**9), eps=st.floats(0.01, 1.0), alpha=st.floats(0.01, 0.99),
       lp=st.floats(-15, -0.5), lq=st.floats(-8, 0))
@settings(max_examples=300, deadline=None)
def test_lemma_matches_mpmath(n, eps, alpha, lp, lq):
    p, q = 10**lp, 10**lq
    r = lemma_failure_bound(n, eps, alpha, p, q)
    if q / n < p and n / q <= math.e:
        return
    want = float(mp_lemma(n, eps, alpha, p, q))
    assert math.fsum(r.terms) == pytest.approx(want, rel=1e-12)
    if r.feasible:
        assert r.bound == pytest.approx(want, rel=1e-12)


def test_report_json_roundtrip():
    r = lemma_failure_bound(10**5, 0.5, 0.25, 1e-4, 0.02)
    d = json.loads(json.dumps(r.to_dict()))
    assert d["vacuous"] is False
    d.pop("vacuous")
    d["terms"] = tuple(d["terms"])
    assert BoundReport(**d) == r


# -- tuning ----------------------------------------------------------------------------

def test_closed_form_schedule_example():
    r = tune_pq(10**5, 0.5, 0.25, 0.1, strategy="paper")
    assert r.q == 0.1
    inner = mp.mpf("0.05") * mp.log(mp.mpf(1.25) / mp.mpf(0.5)) / (2 * mp.log(mp.log(mp.mpf(10) ** 6)))
    assert r.p == pytest.approx(float(inner ** (mp.mpf(8) / 3)), rel=1e-12)
    assert r.p == pytest.approx(3.23e-6, rel=5e-3)


def test_closed_form_schedule_case_two():
    # when lnln(n/delta) < ln((1+a)/(2a)), p = (eps delta)^(2/(1-a))
    p, q = closed_form_pq(50, 0.5, 0.05, 0.2)
    assert q == 0.2 and p == pytest.approx(0.1 ** (2 / 0.95))


@pytest.mark.parametrize("n", [10**4, 10**5, 10**6, 10**8])
@pytest.mark.parametrize("eps, delta, alpha", [(0.5, 0.1, 0.25), (0.2, 0.05, 0.5), (0.1, 0.2, 0.1),
                                               (0.3, 0.01, 0.75)])
def test_grid_never_loses_to_closed_form(n, eps, delta, alpha):
    closed = tune_pq(n, eps, alpha, delta, "paper")
    try:
        grid = tune_pq(n, eps, alpha, delta, "grid")
    except ValueError:
        assert not closed.feasible
        return
    assert grid.feasible
    assert grid.bound <= closed.bound + 1e-12
    # and the reported optimum is reproducible from its own (p, q)
    assert grid.bound == lemma_failure_bound(n, eps, alpha, grid.p, grid.q).bound


def test_grid_without_delta_is_local_minimum():
    g = tune_pq(10**5, 0.5, 0.25, strategy="grid")
    for fp in (0.9, 1.1):
        for fq in (0.9, 1.1):
            other = lemma_failure_bound(10**5, 0.5, 0.25, g.p * fp, g.q * fq)
            assert g.bound <= other.bound * (1 + 0.05)


def test_tune_errors():
    with pytest.raises(ValueError):
        tune_pq(10, 0.5, 0.9, strategy="grid")  # n below eps^(-1/(1-alpha))
    with pytest.raises(ValueError):
        tune_pq(10**5, 0.5, 0.25, strategy="paper")  # no delta
    with pytest.raises(ValueError):
        tune_pq(10**5, 0.5, 0.25, 0.1, strategy="other")
    assert not tune_pq(10, 0.5, 0.9, 0.1, strategy="paper").feasible


# -- sample sizes ------------------------------------------------------------------------

def test_n0_examples():
    # alpha = 0: max{8 ln 24, 8 ln 24 + 1}
    assert n0_submult(0.25, 0.25, 0.0) == pytest.approx(1 + 8 * math.log(24), rel=1e-14)
    assert n0_submult(0.25, 0.25, 0.0) == pytest.approx(26.42443, abs=1e-5)
    v = n0_submult(0.5, 0.2, 0.25)
    assert v == pytest.approx(float(mp_n0(0.5, 0.2, 0.25)), rel=1e-3)
    assert v == pytest.approx(1.050e6, rel=2e-3)


@given(eps=st.floats(0.01, 0.25), delta=st.floats(0.001, 0.25), alpha=st.floats(0.0, 0.9))
@settings(max_examples=200, deadline=None)
def test_n0_matches_mpmath(eps, delta, alpha):
    assert n0_submult(eps, delta, alpha) == pytest.approx(float(mp_n0(eps, delta, alpha)), rel=1e-9)


def test_n0_monotone_in_alpha():
    vals = [n0_submult(0.1, 0.1, a) for a in np.linspace(0, 0.9, 46)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("eps, delta, alpha", [(0.25, 0.25, 0.1), (0.2, 0.1, 0.25), (0.1, 0.05, 0.5),
                                               (0.25, 0.01, 0.3)])
def test_n0_makes_tuned_lemma_small(eps, delta, alpha):
    # at n0 the closed-form schedule at confidence delta/3 certifies failure <= delta
    n = math.ceil(n0_submult(eps, delta, alpha))
    p, q = closed_form_pq(n, eps, alpha, delta / 3)
    r = lemma_failure_bound(n, eps, alpha, p, q)
    assert r.feasible and r.bound <= delta


def test_n0_validation():
    for args in [(0.0, 0.1, 0.5), (1.5, 0.1, 0.5), (0.1, 1.0, 0.5), (0.1, 0.1, 1.0), (0.1, 0.1, -0.1)]:
        with pytest.raises(ValueError):
            n0_submult(*args)


def test_lnln_recursion():
    assert solve_lnln_recursion(0, 4, 0) == 1
    want = 11 * 10 * (mp.log(14) + mp.log(5) + mp.log(4))
    assert solve_lnln_recursion(10, 4, 1) == pytest.approx(float(want), rel=1e-14)
    assert solve_lnln_recursion(10, 4, 1) == pytest.approx(619.8269, abs=1e-4)
    with pytest.raises(ValueError):
        solve_lnln_recursion(1, 3, 1)


@pytest.mark.parametrize("D", [0.0, 1.0, 50.0, 1e4, 1e9])
@pytest.mark.parametrize("E", [4.0, 20.0, 1e6])
@pytest.mark.parametrize("F", [0.0, 0.5, 1.0, 4.0, 12.0])
def test_lnln_recursion_solves_inequality(D, E, F):
    n = solve_lnln_recursion(D, E, F)
    assert n >= D * math.log(math.log(E * n)) ** F


@pytest.mark.parametrize("eps, theta, C, want", [
    (0.5, 1, 3, (0.5 / math.sqrt(3), 0.5)),
    (0.3, 2, 1, (0.3, 1 / 3)),
    (0.25, 3, 16, (0.125, 0.25)),
])
def test_reduction(eps, theta, C, want):
    got = reduce_revenue_to_gc(eps, theta, C)
    assert got.eps == pytest.approx(want[0], rel=1e-14) and got.alpha == pytest.approx(want[1], rel=1e-14)


def test_n0_revenue_composition():
    assert n0_revenue(0.5, 0.2, 1, 1).value == n0_submult(0.5, 0.2, 0.5)
    assert n0_revenue(0.25, 0.25, 1, 1).value == n0_submult(0.25, 0.25, 0.5)
    r = n0_revenue(0.2, 0.1, 1e7, 1)
    base = math.log(60) / (2 * 0.04)
    assert r.value == pytest.approx(base + 1, rel=1e-3)
    assert r.leading_order > 0


def test_param_validation():
    with pytest.raises(ValueError):
        GCParams(0.1, 0.0, 0.5)
    with pytest.raises(ValueError):
        RevenueParams(0.1, 0.1, 1.0, 0.5)
    with pytest.raises(ValueError):
        reduce_revenue_to_gc(0.5, 0.0, 2.0)


# -- tail sums ---------------------------------------------------------------------------

def test_tail_sums():
    assert tail_sum_bounds(Eta(0.1), 20) == (1.0, 2.0, 0.0)
    assert tail_sum_bounds(Uniform01(), 5) == (0.0, 1.0, 0.0)
    lows = [tail_sum_bounds(EqualRevenue(), N).lower for N in (10, 100, 1000)]
    assert lows == pytest.approx([float(mp.harmonic(N)) for N in (10, 100, 1000)], rel=1e-14)
    t = tail_sum_bounds(Pareto(2.0), 1000)
    assert t.lower <= 2.0 <= t.upper
    assert t.lower + t.remainder >= float(mp.zeta(2)) and t.lower + t.remainder <= 2.0
    with pytest.raises(ValueError):
        tail_sum_bounds(Uniform01(), 0)
