"""Closed-form distribution zoo on the nonnegative reals.

Every member exposes its CDF, tail (``q(v) = P[V >= v]``), posted-price
revenue ``r(p) = p * q(p)``, raw moments, atoms and inverse-CDF sampling,
all in closed form so that suprema over the real line can be computed
exactly rather than on a grid.

Members are immutable and vectorized over numpy arrays.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import ClassVar, NamedTuple

import numpy as np

__all__ = [
    "Atom",
    "Distribution",
    "EqualRevenue",
    "Eta",
    "Pareto",
    "Uniform01",
    "eval_distribution",
    "moment",
    "parse_dist",
    "revenue_critical_points",
    "sample",
]


class Atom(NamedTuple):
    location: float
    mass: float


def _arr(x):
    return np.asarray(x, dtype=float)


def _out(values, x):
    # scalar in, scalar out
    return float(values) if np.ndim(x) == 0 else values


class Distribution:
    """Base class for zoo members.

    Subclasses implement ``_cdf``, ``_cdf_left``, ``_ppf`` on float arrays
    plus the scalar closed forms. The public methods accept scalars or
    arrays and return the same shape.
    """

    kind: ClassVar[str] = ""

    # -- point evaluations -------------------------------------------------
    def cdf(self, t):
        """F(t) = P[V <= t]."""
        return _out(self._cdf(_arr(t)), t)

    def cdf_left(self, t):
        """Left limit F(t-) = P[V < t]."""
        return _out(self._cdf_left(_arr(t)), t)

    def tail(self, v):
        """q(v) = P[V >= v] = 1 - F(v-)."""
        return _out(self._tail(_arr(v)), v)

    def tail_right(self, v):
        """Right limit q(v+) = P[V > v] = 1 - F(v)."""
        return _out(self._tail_right(_arr(v)), v)

    def revenue(self, p):
        """Expected posted-price revenue p * q(p)."""
        p = _arr(p)
        return _out(p * self._tail(p), p)

    def revenue_right(self, p):
        """Right limit of the revenue curve, p * P[V > p]."""
        p = _arr(p)
        return _out(p * self._tail_right(p), p)

    def ppf(self, u):
        """Inverse CDF ``inf{t : F(t) > u}`` for u in [0, 1)."""
        return _out(self._ppf(_arr(u)), u)

    def quantile(self, s: float) -> float:
        """Smallest t with F(t) >= s, for s in (0, 1]."""
        raise NotImplementedError

    def _tail(self, v):
        return 1.0 - self._cdf_left(v)

    def _tail_right(self, v):
        return 1.0 - self._cdf(v)

    # -- structure -----------------------------------------------------------
    def atoms(self) -> tuple[Atom, ...]:
        return ()

    @property
    def continuous(self) -> bool:
        return not self.atoms()

    def revenue_breakpoints(self) -> tuple[float, ...]:
        """Points where the closed form of r(p) changes (incl. jumps)."""
        return ()

    def moment(self, k: float) -> float:
        raise NotImplementedError

    def max_revenue(self) -> float:
        """r* = sup_p r(p)."""
        raise NotImplementedError

    def sup_revenue_above(self, lower: float) -> float:
        """sup of r(p) over p > lower (a supremum, possibly not attained)."""
        raise NotImplementedError

    def stationary_points(self, c):
        """Interior stationary point of p -> c*p - r(p) on the smooth pieces.

        Vectorized over the slope ``c``; NaN where none exists.
        """
        return np.full(np.shape(c), np.nan)

    def tail_sum_beyond(self, N: int) -> float:
        """Closed-form upper bound on sum_{k > N} q(k)."""
        raise NotImplementedError

    def spec(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.spec()


@dataclass(frozen=True)
class Uniform01(Distribution):
    kind: ClassVar[str] = "uniform"

    def _cdf(self, t):
        return np.clip(t, 0.0, 1.0)

    _cdf_left = _cdf

    def _ppf(self, u):
        return u.copy()

    def quantile(self, s):
        return float(s)

    def revenue_breakpoints(self):
        return (1.0,)

    def moment(self, k):
        return 1.0 / (k + 1.0)

    def max_revenue(self):
        return 0.25

    def sup_revenue_above(self, lower):
        if lower >= 1.0:
            return 0.0
        return 0.25 if lower < 0.5 else lower * (1.0 - lower)

    def stationary_points(self, c):
        # c*p - p(1-p) on [0, 1] is stationary at (1-c)/2
        return (1.0 - _arr(c)) / 2.0

    def tail_sum_beyond(self, N):
        return 0.0

    def spec(self):
        return "uniform"


@dataclass(frozen=True)
class Pareto(Distribution):
    """Pareto with shape ``a`` and scale 1: F(t) = 1 - t^-a for t >= 1."""

    a: float
    kind: ClassVar[str] = "pareto"

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError(f"Pareto shape must be positive, got {self.a}")

    def _cdf(self, t):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(t >= 1.0, 1.0 - np.power(np.maximum(t, 1.0), -self.a), 0.0)

    _cdf_left = _cdf

    def _tail(self, v):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(v > 1.0, np.power(np.maximum(v, 1.0), -self.a), 1.0)

    _tail_right = _tail

    def _ppf(self, u):
        return np.power(1.0 - u, -1.0 / self.a)

    def quantile(self, s):
        if s >= 1.0:
            return math.inf
        return (1.0 - s) ** (-1.0 / self.a)

    def revenue_breakpoints(self):
        return (1.0,)

    def moment(self, k):
        return self.a / (self.a - k) if k < self.a else math.inf

    def max_revenue(self):
        # p on [0,1], p^(1-a) beyond: bounded iff a >= 1, attained at p = 1
        return 1.0 if self.a >= 1.0 else math.inf

    def sup_revenue_above(self, lower):
        if self.a < 1.0:
            return math.inf
        return 1.0 if lower < 1.0 else lower ** (1.0 - self.a)

    def stationary_points(self, c):
        # d/dp [c p - p^(1-a)] = c - (1-a) p^-a vanishes only when a < 1
        c = _arr(c)
        if self.a >= 1.0:
            return np.full(c.shape, np.nan)
        with np.errstate(divide="ignore"):
            return np.where(c > 0, np.power((1.0 - self.a) / np.where(c > 0, c, 1.0), 1.0 / self.a), np.nan)

    def tail_sum_beyond(self, N):
        if self.a <= 1.0:
            return math.inf
        return N ** (1.0 - self.a) / (self.a - 1.0)

    def spec(self):
        return f"pareto:a={self.a:g}"


@dataclass(frozen=True)
class EqualRevenue(Distribution):
    """Tail min(1, 1/v): every price p >= 1 earns expected revenue exactly 1."""

    kind: ClassVar[str] = "equalrev"

    def _cdf(self, t):
        with np.errstate(divide="ignore"):
            return np.where(t >= 1.0, 1.0 - 1.0 / np.maximum(t, 1.0), 0.0)

    _cdf_left = _cdf

    def _tail(self, v):
        return np.where(v > 1.0, 1.0 / np.maximum(v, 1.0), 1.0)

    _tail_right = _tail

    def _ppf(self, u):
        return 1.0 / (1.0 - u)

    def quantile(self, s):
        return math.inf if s >= 1.0 else 1.0 / (1.0 - s)

    def revenue_breakpoints(self):
        return (1.0,)

    def moment(self, k):
        return math.inf

    def max_revenue(self):
        return 1.0

    def sup_revenue_above(self, lower):
        return 1.0

    def tail_sum_beyond(self, N):
        return math.inf

    def spec(self):
        return "equalrev"


@dataclass(frozen=True)
class Eta(Distribution):
    """Two-point law: value 1/p with probability p, else 0. Mean is 1."""

    p: float
    kind: ClassVar[str] = "eta"

    def __post_init__(self):
        if not (0.0 < self.p <= 1.0):
            raise ValueError(f"Eta parameter must lie in (0, 1], got {self.p}")

    @property
    def top(self) -> float:
        return 1.0 / self.p

    def _cdf(self, t):
        return np.where(t >= self.top, 1.0, np.where(t >= 0.0, 1.0 - self.p, 0.0))

    def _cdf_left(self, t):
        return np.where(t > self.top, 1.0, np.where(t > 0.0, 1.0 - self.p, 0.0))

    def _tail(self, v):
        return np.where(v > self.top, 0.0, np.where(v > 0.0, self.p, 1.0))

    def _tail_right(self, v):
        return np.where(v >= self.top, 0.0, np.where(v >= 0.0, self.p, 1.0))

    def _ppf(self, u):
        return np.where(u < 1.0 - self.p, 0.0, self.top)

    def quantile(self, s):
        return 0.0 if s <= 1.0 - self.p else self.top

    def atoms(self):
        if self.p == 1.0:
            return (Atom(self.top, 1.0),)
        return (Atom(0.0, 1.0 - self.p), Atom(self.top, self.p))

    def revenue_breakpoints(self):
        return (0.0, self.top)

    def moment(self, k):
        return self.p ** (1.0 - k)

    def max_revenue(self):
        return 1.0

    def sup_revenue_above(self, lower):
        return 1.0 if lower < self.top else 0.0

    def tail_sum_beyond(self, N):
        return self.p * max(0, math.floor(self.top) - N)

    def spec(self):
        return f"eta:p={self.p:g}"


_SPEC_RE = re.compile(r"^(?P<kind>[a-z]+)(?::(?P<key>[a-z]+)=(?P<val>[^=:]+))?$")


def parse_dist(text: str) -> Distribution:
    """Parse ``uniform``, ``pareto:a=<real>``, ``equalrev`` or ``eta:p=<real>``."""
    m = _SPEC_RE.match(text.strip())
    if not m:
        raise ValueError(f"malformed distribution spec {text!r}")
    kind, key, val = m["kind"], m["key"], m["val"]
    params = {"uniform": None, "equalrev": None, "pareto": "a", "eta": "p"}
    if kind not in params:
        raise ValueError(f"unknown distribution {kind!r}")
    if params[kind] != key:
        raise ValueError(f"distribution {kind!r} expects parameter {params[kind]!r}")
    if kind == "uniform":
        return Uniform01()
    if kind == "equalrev":
        return EqualRevenue()
    try:
        x = float(val)
    except ValueError:
        raise ValueError(f"bad parameter value {val!r}") from None
    return Pareto(x) if kind == "pareto" else Eta(x)


def eval_distribution(dist: Distribution, x: float, which: str) -> float:
    if which == "cdf":
        return dist.cdf(x)
    if x < 0:
        raise ValueError("tail and revenue are defined for x >= 0")
    if which == "tail":
        return dist.tail(x)
    if which == "revenue":
        return dist.revenue(x)
    raise ValueError(f"unknown evaluation {which!r}")


def moment(dist: Distribution, k: float) -> float:
    """Raw moment E[V^k] for k >= 1; ``math.inf`` when it diverges."""
    if k < 1:
        raise ValueError("moment order must be >= 1")
    return dist.moment(k)


def sample(dist: Distribution, stream: np.random.Generator, n: int) -> np.ndarray:
    """n i.i.d. draws by inverse-CDF transform, sorted ascending."""
    if n < 1:
        raise ValueError("sample size must be positive")
    return np.sort(dist._ppf(stream.random(n)))


def revenue_critical_points(dist: Distribution, c: float, a: float, b: float) -> list[float]:
    """Candidate maximizers of |c*p - r(p)| strictly inside [a, b).

    Returns interior stationary points of ``c*p - r(p)`` together with the
    breakpoints of r that fall inside the interval.
    """
    if not (0.0 <= a < b):
        raise ValueError(f"invalid interval [{a}, {b})")
    if not (0.0 <= c <= 1.0):
        raise ValueError("slope must lie in [0, 1]")
    pts = []
    s = float(dist.stationary_points(c))
    if math.isfinite(s) and a < s < b and _smooth_at(dist, s):
        pts.append(s)
    pts.extend(x for x in dist.revenue_breakpoints() if a < x < b)
    return sorted(set(pts))


def _smooth_at(dist: Distribution, p: float) -> bool:
    # the stationary formula only holds on the piece where it was derived
    if isinstance(dist, Uniform01):
        return 0.0 < p < 1.0
    if isinstance(dist, Pareto):
        return p > 1.0
    return True
