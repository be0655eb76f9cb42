"""Closed-form failure-probability bounds and sample-size calculators.

* :func:`massart_bound` - the tight DKW inequality ``2 exp(-2 n eps^2)``.
* :func:`lemma_failure_bound` - the three-term bound on the probability
  that ``|F - F_n| > eps F^alpha`` somewhere, as a function of two free
  tuning parameters ``p`` and ``q``.
* :func:`tune_pq` - chooses ``(p, q)`` by the closed-form schedule or by a
  log-spaced grid search.
* :func:`n0_submult` / :func:`n0_revenue` - explicit sample sizes.

Bounds are never clamped to 1; reports carry a ``vacuous`` flag instead.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .distributions import Distribution

log = logging.getLogger(__name__)

__all__ = [
    "BoundReport",
    "GCParams",
    "RevenueN0",
    "RevenueParams",
    "TailSums",
    "lemma_failure_bound",
    "massart_bound",
    "n0_revenue",
    "n0_submult",
    "reduce_revenue_to_gc",
    "solve_lnln_recursion",
    "tail_sum_bounds",
    "tune_pq",
]

# grid tuner resolution; p enters as p^((1-alpha)/2) so it must reach far down
GRID_P_POINTS = 240
GRID_Q_POINTS = 240
GRID_P_MIN = 1e-16
GRID_Q_MIN = 1e-9


@dataclass(frozen=True)
class GCParams:
    eps: float
    delta: float
    alpha: float

    def __post_init__(self):
        if not (0 < self.eps <= 1):
            raise ValueError(f"eps must lie in (0, 1], got {self.eps}")
        if not (0 < self.delta < 1):
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not (0 <= self.alpha < 1):
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")


@dataclass(frozen=True)
class RevenueParams:
    eps: float
    delta: float
    theta: float
    C: float

    def __post_init__(self):
        if not (0 < self.eps < 1):
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if not (0 < self.delta < 1):
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if not self.C >= 1:
            raise ValueError(f"C must be at least 1, got {self.C}")


@dataclass(frozen=True)
class BoundReport:
    """Three-term failure bound together with the parameters that produced it.

    ``terms`` are the small-CDF, middle and Massart summands. When
    ``feasible`` is false the lemma's hypotheses fail at these inputs,
    ``bound`` is ``inf`` and ``diagnostic`` says why; ``terms`` are still
    filled in whenever the expression itself is defined.
    """

    bound: float
    terms: tuple[float, float, float]
    n: int
    eps: float
    alpha: float
    p: float
    q: float
    m: int
    feasible: bool
    diagnostic: str = ""

    @property
    def vacuous(self) -> bool:
        return self.bound >= 1.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["terms"] = list(self.terms)
        d["vacuous"] = self.vacuous
        return d


def massart_bound(n: int, eps: float) -> float:
    """2 exp(-2 n eps^2), uncapped."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not eps > 0:
        raise ValueError("eps must be positive")
    return 2.0 * math.exp(-2.0 * n * eps * eps)


def _lnln(x: float) -> float:
    if not x > 1.0:
        raise ValueError(f"ln ln undefined at {x}")
    return math.log(math.log(x))


def _ladder_rate(alpha: float) -> float:
    # ln((1 + alpha) / (2 alpha)), the log-growth of the exponent ladder
    # in log space so tiny alpha cannot overflow the quotient
    return math.log1p(alpha) - math.log(2.0) - math.log(alpha)


def _infeasible(n, eps, alpha, p, q, why) -> BoundReport:
    return BoundReport(math.inf, (math.inf, math.inf, math.inf), n, eps, alpha, p, q, 0, False, why)


def lemma_failure_bound(n: int, eps: float, alpha: float, p: float, q: float) -> BoundReport:
    """q + ceil(lnln(n/q) / ln((1+a)/(2a))) * p^((1-a)/2) / eps + 2 exp(-2n (eps p^a)^2).

    Hypotheses: ``n >= eps^(-1/(1-a))`` and ``p <= min(eps^(1/(1-a)), 1/e)``.
    The middle term is 0 when ``q/n >= p`` because its region is empty.
    Out-of-range inputs give ``feasible=False`` instead of raising, so that
    tuners can probe freely.
    """
    if not (0 < alpha < 1):
        return _infeasible(n, eps, alpha, p, q, f"alpha={alpha} outside (0, 1)")
    if not eps > 0:
        return _infeasible(n, eps, alpha, p, q, "eps must be positive")
    if not (0 < p < 1) or not (0 < q <= 1) or n < 1:
        return _infeasible(n, eps, alpha, p, q, "need n >= 1, p in (0, 1) and q in (0, 1]")

    t1 = q
    if q / n >= p:
        m, t2 = 0, 0.0
    elif n / q > math.e:
        m = math.ceil(_lnln(n / q) / _ladder_rate(alpha))
        t2 = m * p ** ((1.0 - alpha) / 2.0) / eps
    else:
        return _infeasible(n, eps, alpha, p, q, f"ln ln(n/q) undefined or negative at n/q={n / q:.6g}")
    t3 = 2.0 * math.exp(-2.0 * n * (eps * p**alpha) ** 2)

    # hypotheses of the lemma; terms stay visible when they fail
    why = []
    n_min = eps ** (-1.0 / (1.0 - alpha))
    if n < n_min:
        why.append(f"n={n} below eps^(-1/(1-alpha))={n_min:.6g}")
    p_max = min(eps ** (1.0 / (1.0 - alpha)), 1.0 / math.e)
    if p > p_max:
        why.append(f"p={p:.6g} above min(eps^(1/(1-alpha)), 1/e)={p_max:.6g}")
    if why:
        return BoundReport(math.inf, (t1, t2, t3), n, eps, alpha, p, q, m, False, "; ".join(why))
    return BoundReport(t1 + t2 + t3, (t1, t2, t3), n, eps, alpha, p, q, m, True)


def closed_form_pq(n: int, eps: float, alpha: float, delta: float) -> tuple[float, float]:
    """Closed-form schedule: q = delta and p making the middle term at most delta."""
    rate = _ladder_rate(alpha)
    x = n / delta
    ll = _lnln(x) if x > math.e else 0.0
    if ll / rate >= 1.0:
        p = (eps * delta * rate / (2.0 * ll)) ** (2.0 / (1.0 - alpha))
    else:
        p = (eps * delta) ** (2.0 / (1.0 - alpha))
    return p, delta


def _grid_bounds(n, eps, alpha, ps, qs):
    """Vectorized lemma bound over a (p, q) mesh; inf where infeasible."""
    P, Q = np.meshgrid(ps, qs, indexing="ij")
    rate = _ladder_rate(alpha)
    with np.errstate(invalid="ignore", divide="ignore"):
        lnln = np.log(np.log(n / Q))
        m = np.ceil(lnln / rate)
    middle = np.where(Q / n >= P, 0.0, m * P ** ((1 - alpha) / 2) / eps)
    B = Q + middle + 2 * np.exp(-2 * n * (eps * P**alpha) ** 2)
    p_max = min(eps ** (1 / (1 - alpha)), 1 / math.e)
    ok = (P <= p_max) & (P > 0) & (P < 1) & (Q > 0) & (Q <= 1)
    return np.where(ok, B, np.inf), P, Q


def tune_pq(n: int, eps: float, alpha: float, delta: float | None = None,
            strategy: str = "paper", *, p_points: int = GRID_P_POINTS,
            q_points: int = GRID_Q_POINTS) -> BoundReport:
    """Pick (p, q) for :func:`lemma_failure_bound`.

    ``paper`` uses the closed-form schedule (requires ``delta``) and returns
    whatever report it yields, feasible or not. ``grid`` minimizes over a
    log-spaced mesh with ``p`` down to 1e-16 and ``q`` down to 1e-9; ties go
    to the smallest p, then the smallest q. When ``delta`` is supplied the
    closed-form point is added to the mesh, so the grid optimum never loses
    to it. Raises ``ValueError`` when no mesh point is feasible.
    """
    if not (0 < alpha < 1):
        raise ValueError(f"tuning needs alpha in (0, 1), got {alpha}")
    if strategy == "paper":
        if delta is None or not (0 < delta < 1):
            raise ValueError("the closed-form schedule requires delta in (0, 1)")
        p, q = closed_form_pq(n, eps, alpha, delta)
        return lemma_failure_bound(n, eps, alpha, p, q)
    if strategy != "grid":
        raise ValueError(f"unknown strategy {strategy!r}")
    if p_points < 200 or q_points < 200:
        raise ValueError("grid resolution must be at least 200 x 200")
    if n < eps ** (-1.0 / (1.0 - alpha)):
        raise ValueError("no feasible grid point: n below eps^(-1/(1-alpha))")
    p_max = min(eps ** (1 / (1 - alpha)), 1 / math.e)
    ps = np.geomspace(GRID_P_MIN, p_max, p_points) if p_max > GRID_P_MIN else np.array([p_max])
    qs = np.geomspace(GRID_Q_MIN, 1.0, q_points)
    if delta is not None and 0 < delta < 1:
        pp, qq = closed_form_pq(n, eps, alpha, delta)
        ps = np.union1d(ps, [pp])
        qs = np.union1d(qs, [qq])
    B, P, Q = _grid_bounds(n, eps, alpha, ps, qs)
    if not np.isfinite(B).any():
        raise ValueError("no feasible grid point")
    # row-major argmin over (p ascending, q ascending) gives the tie-break
    i = int(np.argmin(B))
    rep = lemma_failure_bound(n, eps, alpha, float(P.flat[i]), float(Q.flat[i]))
    return rep


def _pow_alpha0(x: float, expo: float) -> float:
    # x^expo with the convention x^0 := 1 even for x in {0, inf}
    return 1.0 if expo == 0 else x**expo


def n0_submult(eps: float, delta: float, alpha: float) -> float:
    """Explicit sample size after which the submultiplicative event holds w.p. 1 - delta.

    max{ ln(6/d)/(2e^2) (e d/3)^(-F), (D+1) (10 ln(12 (D+4) / (d (1-a))))^F }
    with F = 4a/(1-a) and D = ln(6/d)/(2e^2) (e d/6 ln((1+a)/(2a)))^(-F).
    At alpha = 0 every factor raised to F is taken as 1.

    The guarantee is proved for eps, delta <= 1/4; the expression is still
    evaluated for eps <= 1 and delta < 1, with a logged warning.
    """
    if not (0 < eps <= 1):
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    if not (0 < delta < 1):
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if not (0 <= alpha < 1):
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    if eps > 0.25 or delta > 0.25:
        log.warning("n0_submult: eps=%g, delta=%g outside the proven range (<= 1/4)", eps, delta)
    F = 4.0 * alpha / (1.0 - alpha)
    base = math.log(6.0 / delta) / (2.0 * eps * eps)
    first = base * _pow_alpha0(eps * delta / 3.0, -F)
    if alpha == 0:
        D = base
    else:
        D = base * (eps * delta / 6.0 * _ladder_rate(alpha)) ** (-F)
    second = (D + 1.0) * _pow_alpha0(10.0 * math.log(12.0 * (D + 4.0) / (delta * (1.0 - alpha))), F)
    return max(first, second)


def solve_lnln_recursion(D: float, E: float, F: float) -> float:
    """An n satisfying n >= D (ln ln(E n))^F: (D+1) (10 (ln(D+4) + ln(F+4) + ln E))^F."""
    if D < 0 or E < 4 or F < 0:
        raise ValueError("need D >= 0, E >= 4, F >= 0")
    return (D + 1.0) * _pow_alpha0(10.0 * (math.log(D + 4.0) + math.log(F + 4.0) + math.log(E)), F)


class ReducedGC(NamedTuple):
    eps: float
    alpha: float


def reduce_revenue_to_gc(eps: float, theta: float, C: float) -> ReducedGC:
    """Map a revenue accuracy to tail-side submultiplicative parameters.

    If E[V^(1+theta)] <= C then |r - r_n| > eps somewhere forces
    |q - q_n| > eps' q^alpha somewhere, with eps' = eps / C^(1/(1+theta))
    and alpha = 1/(1+theta).
    """
    if not (0 < eps < 1):
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if not theta > 0:
        raise ValueError("theta must be positive")
    if not C >= 1:
        raise ValueError("C must be at least 1")
    k = 1.0 + theta
    return ReducedGC(eps / C ** (1.0 / k), 1.0 / k)


@dataclass(frozen=True)
class RevenueN0:
    """Sample size for uniform revenue estimation.

    ``value`` is the exact composed bound; ``leading_order`` is the
    asymptotic expression with its hidden low-order terms dropped, kept for
    comparison only.
    """

    value: float
    eps_gc: float
    alpha: float
    leading_order: float


def n0_revenue(eps: float, delta: float, theta: float, C: float) -> RevenueN0:
    RevenueParams(eps, delta, theta, C)
    red = reduce_revenue_to_gc(eps, theta, C)
    value = n0_submult(red.eps, delta, red.alpha)
    k = 1.0 + theta
    lead = (math.log(1.0 / delta) / eps**2 * C ** (2.0 / k)
            * (6.0 * C ** (1.0 / k) / (eps * delta * math.log(1.0 + theta / 2.0))) ** (4.0 / theta))
    return RevenueN0(value, red.eps, red.alpha, lead)


class TailSums(NamedTuple):
    lower: float
    upper: float
    remainder: float


def tail_sum_bounds(dist: Distribution, N: int) -> TailSums:
    """Truncated sums bracketing E[V]: sum_{k=1}^N q(k) <= E[V] <= 1 + sum_{k>=1} q(k).

    ``remainder`` bounds the omitted sum_{k>N} q(k) in closed form (``inf``
    when the series diverges).
    """
    if N < 1:
        raise ValueError("N must be a positive integer")
    lower = math.fsum(dist.tail(np.arange(1, N + 1, dtype=float)).tolist())
    return TailSums(lower, lower + 1.0, dist.tail_sum_beyond(N))
