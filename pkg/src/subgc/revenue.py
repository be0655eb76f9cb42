"""Posted-price revenue: true and empirical curves, estimation error, ERM.

The empirical tail ``q_n(v) = #{x_i >= v}/n`` is left-continuous and
constant on each piece ``(u_{j-1}, u_j]`` between distinct sample values,
so ``r_n(p) = p * q_n(p)`` is linear on every piece. That makes both the
uniform estimation error and the empirical maximizer exactly computable.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

import numpy as np

from .distributions import Distribution
from .empirical import Sample, _as_values

__all__ = [
    "PriceReport",
    "RevenueCurve",
    "emp_revenue",
    "pick_price",
    "regret",
    "revenue_curve",
    "revenue_error",
]


def emp_revenue(sample: Sample, p: float) -> float:
    """r_n(p) = p * q_n(p)."""
    if p < 0:
        raise ValueError("price must be nonnegative")
    v = _as_values(sample)
    return p * (v.size - np.searchsorted(v, p, side="left")) / v.size


@dataclass(frozen=True)
class RevenueCurve:
    """Step description of r_n: on (left_j, right_j] the tail is tails[j]."""

    breakpoints: np.ndarray  # distinct sample values, ascending
    tails: np.ndarray

    def pieces(self):
        lefts = np.concatenate([[0.0], self.breakpoints[:-1]])
        for j, (a, b, c) in enumerate(zip(lefts, self.breakpoints, self.tails)):
            yield j, float(a), float(b), float(c)
        # beyond the largest value nobody buys
        yield len(self.tails), float(self.breakpoints[-1]), math.inf, 0.0

    def __call__(self, p: float) -> float:
        j = np.searchsorted(self.breakpoints, p, side="left")
        return 0.0 if j == self.tails.size else float(p * self.tails[j])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["piece", "left", "right", "tail", "slope"])
        for j, a, b, c in self.pieces():
            w.writerow([j, repr(a), repr(b), repr(c), repr(c)])
        return buf.getvalue()


def revenue_curve(sample: Sample) -> RevenueCurve:
    v = _as_values(sample)
    u = np.unique(v)
    tails = (v.size - np.searchsorted(v, u, side="left")) / v.size
    return RevenueCurve(u, tails)


def revenue_error(sample: Sample, dist: Distribution) -> float:
    """Exact sup over p >= 0 of |r_n(p) - r(p)|, possibly ``inf``.

    Knots are 0, the sample values and the breakpoints of r. On each piece
    (k_{j-1}, k_j] the empirical tail is a constant c and r is smooth, so
    the supremum of |c p - r(p)| is reached at the right end, approached at
    the left end, or at an interior stationary point. Past the last knot
    r_n vanishes and the gap is sup_{p > k_last} r(p).
    """
    v = _as_values(sample)
    n = v.size
    k = np.unique(np.concatenate([[0.0], v, np.asarray(dist.revenue_breakpoints(), dtype=float)]))
    k = k[k >= 0]
    c = (n - np.searchsorted(v, k[1:], side="left")) / n
    a, b = k[:-1], k[1:]
    at_right = np.abs(c * b - dist.revenue(b))
    at_left = np.abs(c * a - dist.revenue_right(a))
    s = dist.stationary_points(c)
    inside = np.isfinite(s) & (s > a) & (s < b)
    s = np.where(inside, s, b)
    at_stat = np.where(inside, np.abs(c * s - dist.revenue(s)), 0.0)
    best = max(at_right.max(initial=0.0), at_left.max(initial=0.0), at_stat.max(initial=0.0))
    return float(max(best, dist.sup_revenue_above(float(k[-1]))))


@dataclass(frozen=True)
class PriceReport:
    price: float
    empirical_revenue: float
    true_revenue: float | None
    mode: str

    def to_dict(self) -> dict:
        return asdict(self)


def pick_price(sample: Sample, mode: str = "erm", dist: Distribution | None = None,
               guard: int | None = None) -> PriceReport:
    """Empirical revenue maximizer over the sample values.

    r_n increases linearly inside each piece, so its supremum over a piece is
    reached at the piece's right end, which is a sample value; restricting
    to sample values loses nothing. ``guarded`` only admits prices up to the
    ``guard``-th largest sample value (default ``ceil(sqrt(n))``). Ties go to
    the smallest price.
    """
    v = _as_values(sample)
    n = v.size
    u = np.unique(v)
    rev = u * (n - np.searchsorted(v, u, side="left")) / n
    if mode == "guarded":
        g = math.ceil(math.sqrt(n)) if guard is None else guard
        if not (1 <= g <= n):
            raise ValueError(f"guard index must lie in [1, {n}], got {g}")
        cap = v[n - g]
        keep = u <= cap
        u, rev = u[keep], rev[keep]
    elif mode != "erm":
        raise ValueError(f"unknown mode {mode!r}")
    j = int(np.argmax(rev))
    price = float(u[j])
    true = None if dist is None else float(dist.revenue(price))
    return PriceReport(price, float(rev[j]), true, mode)


def regret(dist: Distribution, price: float) -> float:
    """r* - r(price)."""
    if price < 0:
        raise ValueError("price must be nonnegative")
    best = dist.max_revenue()
    if not math.isfinite(best):
        raise ValueError(f"{dist} has unbounded revenue; regret undefined")
    return best - float(dist.revenue(price))
