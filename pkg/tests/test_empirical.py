import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import grid_deviations, probe_points
from subgc.distributions import EqualRevenue, Eta, Pareto, Uniform01, sample
from subgc.empirical import (
    Sample,
    batch_region_violations,
    batch_submult_sup,
    check_submult_event,
    eval_empirical,
    region_violations,
    sup_additive_deviation,
    sup_submult_deviation,
)
from subgc.montecarlo import stream

ZOO = [Uniform01(), Pareto(2.0), EqualRevenue(), Eta(0.1), Eta(0.5)]


def test_sample_validation_and_io(tmp_path):
    s = Sample.of([2, 1, 5, 2])
    assert s.values.tolist() == [1, 2, 2, 5] and s.n == 4
    with pytest.raises(ValueError):
        s.values[0] = 3
    with pytest.raises(ValueError):
        Sample(np.array([2.0, 1.0]))
    for bad in ([], [-1.0], [math.nan], [math.inf]):
        with pytest.raises(ValueError):
            Sample.of(bad)
    path = tmp_path / "s.txt"
    s.dump(path)
    assert Sample.load(path) == s
    path.write_text("1\n\n0.5\nabc\n")
    with pytest.raises(ValueError, match=":4:"):
        Sample.load(path)


@pytest.mark.parametrize("t, which, want", [
    (2, "cdf", 0.75), (2, "cdf_strict", 0.25), (2, "tail", 0.75), (0.5, "cdf", 0.0), (5, "tail", 0.25),
])
def test_eval_empirical(t, which, want):
    s = Sample.of([1, 2, 2, 5])
    assert eval_empirical(s, t, which) == want
    assert eval_empirical(s, t, "tail") == 1 - eval_empirical(s, t, "cdf_strict")


def test_ks_examples():
    r = sup_additive_deviation(Sample.of([0.5]), Uniform01())
    assert r.value == pytest.approx(0.5) and r.witness == 0.5 and r.side == "above"
    assert sup_additive_deviation(Sample.of([0.25, 0.75]), Uniform01()).value == pytest.approx(0.25)
    # point mass sample matching its own law
    assert sup_additive_deviation(Sample.of([1.0] * 5), Eta(1.0)).value == 0.0


def test_submult_examples():
    r = sup_submult_deviation(Sample.of([0.5]), Uniform01(), 0.5)
    assert r.value == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert r.witness == 0.5 and r.approach == "at" and r.side == "above"
    assert sup_submult_deviation(Sample.of([0.5]), Pareto(2.0), 0.25).value == math.inf
    assert check_submult_event(Sample.of([0.5]), Uniform01(), 0.5, 1.0)
    assert not check_submult_event(Sample.of([0.5]), Uniform01(), 0.5, 0.5)
    assert check_submult_event(Sample.of([1.0, 1.0]), Eta(1.0), 0.9, 1e-9)
    with pytest.raises(ValueError):
        sup_submult_deviation(Sample.of([0.5]), Uniform01(), 1.0)


@pytest.mark.parametrize("dist", ZOO, ids=str)
@pytest.mark.parametrize("side", ["cdf", "tail"])
def test_matches_grid_oracle(dist, side):
    alphas = [0.0, 0.25, 0.5, 0.8]
    for i in range(12):
        n = 1 + (7 * i) % 15
        v = sample(dist, stream(101, i), n)
        want = grid_deviations(v, dist, alphas, side, points=200_000)
        got = [sup_submult_deviation(Sample(v), dist, a, side).value for a in alphas]
        for g, w in zip(got, want):
            if math.isinf(w):
                assert math.isinf(g)
            else:
                assert g == pytest.approx(w, abs=1e-9)


def test_tail_side_is_mirror():
    # Q_n(v) - q(v) = F(v-) - F_n(v-), so at alpha = 0 both sides agree
    for i in range(20):
        v = Sample(sample(Pareto(2.0), stream(5, i), 9))
        a = sup_submult_deviation(v, Pareto(2.0), 0.0, "cdf").value
        b = sup_submult_deviation(v, Pareto(2.0), 0.0, "tail").value
        assert a == pytest.approx(b, abs=1e-14)


@given(vals=st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=30),
       alpha=st.floats(0, 0.95))
@settings(max_examples=300, deadline=None)
def test_invariants_uniform(vals, alpha):
    s = Sample.of(vals)
    u = Uniform01()
    ks = sup_additive_deviation(s, u).value
    sub = sup_submult_deviation(s, u, alpha).value
    # F^alpha <= 1 so the weighted statistic dominates KS
    assert sub >= ks - 1e-15
    assert 1 / (2 * s.n) - 1e-15 <= ks <= 1
    assert sup_submult_deviation(s, u, 0.0).value == ks
    # the reported witness reproduces the value
    r = sup_submult_deviation(s, u, alpha)
    if r.approach == "at" and math.isfinite(r.value):
        fn = eval_empirical(s, r.witness, "cdf")
        f = float(u.cdf(r.witness))
        if f > 0 or alpha == 0:
            expect = abs(fn - f) / f**alpha
        else:
            expect = 0.0 if fn == 0 else math.inf
        assert r.value == pytest.approx(expect, rel=1e-12, abs=1e-12)


@given(vals=st.lists(st.sampled_from([0.0, 4.0]), min_size=1, max_size=30), alpha=st.floats(0, 0.9))
@settings(max_examples=200, deadline=None)
def test_invariants_atomic(vals, alpha):
    d = Eta(0.25)
    s = Sample.of(vals)
    frac_zero = vals.count(0.0) / len(vals)
    # only two jump points: deviation is |frac_zero - 0.75| weighted at F = 0.75
    assert sup_additive_deviation(s, d).value == pytest.approx(abs(frac_zero - 0.75), abs=1e-15)
    assert sup_submult_deviation(s, d, alpha).value == pytest.approx(abs(frac_zero - 0.75) / 0.75**alpha,
                                                                     abs=1e-14)


def test_batch_matches_scalar():
    for dist in ZOO:
        rows = np.stack([sample(dist, stream(8, t), 25) for t in range(40)])
        for side in ("cdf", "tail"):
            for a in (0.0, 0.3, 0.7):
                want = [sup_submult_deviation(Sample(r), dist, a, side).value for r in rows]
                np.testing.assert_allclose(batch_submult_sup(rows, dist, a, side), want, rtol=0, atol=1e-14)


def _grid_regions(values, dist, alpha, eps, p, q):
    t = probe_points(values, dist, points=200_000)
    n = len(values)
    fn = np.searchsorted(np.sort(values), t, side="right") / n
    f = dist.cdf(t)
    viol = np.abs(fn - f) > eps * f**alpha
    return (bool(viol[f <= q / n].any()), bool(viol[(f > q / n) & (f <= p)].any()), bool(viol[f > p].any()))


def test_region_example():
    got = region_violations(Sample.of([0.001, 0.9]), Uniform01(), 0.5, 0.3, 0.09, 0.5)
    assert got[:2] == (True, False)
    assert got == _grid_regions([0.001, 0.9], Uniform01(), 0.5, 0.3, 0.09, 0.5)


def test_region_trivia():
    # all values above the p-quantile: F_n = 0 on the low region, and F <= eps F^alpha
    # there because (q/n)^(1 - alpha) <= eps
    assert not region_violations(Sample.of([0.9, 0.95]), Uniform01(), 0.5, 0.3, 0.5, 0.1)[0]
    # without that size condition the low region can fail from below
    assert region_violations(Sample.of([0.9, 0.95]), Uniform01(), 0.5, 0.1, 0.5, 0.1)[0]
    assert region_violations(Sample.of([1.0, 1.0]), Eta(1.0), 0.5, 0.1, 0.5, 0.1) == (False, False, False)
    with pytest.raises(ValueError):
        region_violations(Sample.of([0.5]), Uniform01(), 0.5, 0.1, 1.0, 0.1)


def test_regions_match_grid_and_batch():
    eps, alpha, p, q = 0.4, 0.5, 0.3, 0.5
    for dist in (Uniform01(), Pareto(2.0), Eta(0.5)):
        rows = np.stack([sample(dist, stream(12, t), 6) for t in range(40)])
        batch = batch_region_violations(rows, dist, alpha, eps, p, q)
        for r, b in zip(rows, batch):
            one = region_violations(Sample(r), dist, alpha, eps, p, q)
            assert tuple(b) == one == _grid_regions(r, dist, alpha, eps, p, q)
    # any region violation means the full event fails, and conversely
    rows = np.stack([sample(Uniform01(), stream(13, t), 20) for t in range(300)])
    any_region = batch_region_violations(rows, Uniform01(), 0.5, 0.3, 0.2, 0.5).any(axis=1)
    np.testing.assert_array_equal(any_region, batch_submult_sup(rows, Uniform01(), 0.5) > 0.3)
