"""Empirical-measure statistics computed exactly against a closed-form law.

The supremum of ``|F_n(t) - F(t)| / F(t)^alpha`` over the real line is found
without grids. Between consecutive knots (sample points and atoms of the
law) the empirical CDF is a constant ``c`` while ``s = F(t)`` sweeps an
interval continuously and monotonically. For fixed ``c`` the ratio
``|c - s| / s^alpha`` is decreasing in ``s`` below ``c`` and increasing
above it, so over any sub-interval of ``s`` the supremum sits at one of its
two ends. Each statistic is therefore a maximum over

* points: ``(c, s)`` pairs attained exactly at a knot, and
* intervals: ``(c, lo, hi)`` triples whose ends are limits.

The tail side (``q_n`` against ``q``) has the same structure with the roles
of left and right limits exchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .distributions import Distribution

__all__ = [
    "DeviationResult",
    "Sample",
    "check_submult_event",
    "eval_empirical",
    "region_violations",
    "sup_additive_deviation",
    "sup_submult_deviation",
]


@dataclass(frozen=True, eq=False)
class Sample:
    """Sorted nonnegative realizations; the order statistics themselves."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("a sample needs at least one value")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("sample values must be finite and nonnegative")
        if np.any(np.diff(v) < 0):
            raise ValueError("sample values must be sorted; use Sample.of")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def of(cls, values) -> "Sample":
        return cls(np.sort(np.asarray(values, dtype=float)))

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return isinstance(other, Sample) and np.array_equal(self.values, other.values)

    @classmethod
    def load(cls, path) -> "Sample":
        """Read one nonnegative decimal per line; blank lines are skipped."""
        vals = []
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.strip()
            if not line:
                continue
            try:
                vals.append(float(line))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {line!r}") from None
        return cls.of(vals)

    def dump(self, path) -> None:
        Path(path).write_text("".join(f"{x!r}\n" for x in self.values.tolist()))


@dataclass(frozen=True)
class DeviationResult:
    """Supremum of a deviation statistic and where it is (approached) attained.

    ``approach`` is ``"at"`` when the value is attained at ``witness``, or
    ``"left"``/``"right"`` when it is the one-sided limit there.
    """

    value: float
    witness: float
    side: str  # "above" if the empirical function exceeds the true one
    approach: str = "at"


def _as_values(sample) -> np.ndarray:
    return sample.values if isinstance(sample, Sample) else np.asarray(sample, dtype=float)


def eval_empirical(sample: Sample, t: float, which: str) -> float:
    """``cdf`` = #{x <= t}/n, ``cdf_strict`` = #{x < t}/n, ``tail`` = #{x >= t}/n."""
    v = _as_values(sample)
    n = v.size
    if which == "cdf":
        return np.searchsorted(v, t, side="right") / n
    if which == "cdf_strict":
        return np.searchsorted(v, t, side="left") / n
    if which == "tail":
        return (n - np.searchsorted(v, t, side="left")) / n
    raise ValueError(f"unknown evaluation {which!r}")


def ratio(c, s, alpha: float):
    """|c - s| / s^alpha with 0/0 := 0 and positive/0 := inf (0^0 is 1)."""
    num = np.abs(np.asarray(c, dtype=float) - s)
    if alpha == 0:
        return num
    with np.errstate(divide="ignore", invalid="ignore"):
        out = num / np.power(s, alpha)
    # nan only arises from 0/0
    return np.where(np.isnan(out), 0.0, out)


@dataclass(frozen=True)
class _Pieces:
    # attained points
    pt_t: np.ndarray
    pt_c: np.ndarray
    pt_s: np.ndarray
    # open intervals between knots: F_n (or q_n) is iv_c, F (or q) sweeps (iv_lo, iv_hi)
    iv_c: np.ndarray
    iv_lo: np.ndarray
    iv_hi: np.ndarray
    # locations and approach direction of the interval ends, for witnesses
    lo_t: np.ndarray
    hi_t: np.ndarray
    lo_dir: str
    hi_dir: str


def _knots(values: np.ndarray, dist: Distribution) -> np.ndarray:
    atoms = [a.location for a in dist.atoms()]
    return np.unique(np.concatenate([values, np.asarray(atoms, dtype=float)]))


def _pieces(values: np.ndarray, dist: Distribution, side: str) -> _Pieces:
    n = values.size
    k = _knots(values, dist)
    below = np.searchsorted(values, k, side="left")
    upto = np.searchsorted(values, k, side="right")
    inf = np.array([np.inf])
    if side == "cdf":
        fn_at = upto / n
        f_at = dist.cdf(k)
        f_left = dist.cdf_left(k)
        return _Pieces(
            pt_t=k, pt_c=fn_at, pt_s=f_at,
            iv_c=np.concatenate([[0.0], fn_at]),
            iv_lo=np.concatenate([[0.0], f_at]),
            iv_hi=np.concatenate([f_left, [1.0]]),
            lo_t=np.concatenate([-inf, k]),
            hi_t=np.concatenate([k, inf]),
            lo_dir="right", hi_dir="left",
        )
    if side == "tail":
        qn_at = (n - below) / n
        qn_right = (n - upto) / n
        q_at = dist.tail(k)
        q_right = dist.tail_right(k)
        # on (k_j, k_{j+1}) q_n is q_n(k_{j+1}) and q sweeps (q(k_{j+1}), q(k_j+))
        return _Pieces(
            pt_t=k, pt_c=qn_at, pt_s=q_at,
            iv_c=np.concatenate([[1.0], qn_right]),
            iv_lo=np.concatenate([q_at, [0.0]]),
            iv_hi=np.concatenate([[1.0], q_right]),
            lo_t=np.concatenate([k, inf]),
            hi_t=np.concatenate([-inf, k]),
            lo_dir="left", hi_dir="right",
        )
    raise ValueError(f"side must be 'cdf' or 'tail', got {side!r}")


def _batch_pieces(rows: np.ndarray, dist: Distribution, side: str):
    """Point/interval arrays for a stack of sorted samples of an atomless law.

    Every order statistic is its own knot. Tied values create degenerate
    intervals and intermediate count levels at a single ``s``; both are
    harmless because the ratio is convex in ``c`` at fixed ``s``.
    """
    m, n = rows.shape
    i = np.arange(n, dtype=float)
    ones = np.ones((m, 1))
    if side == "cdf":
        f = dist.cdf(rows)
        pt_c = np.broadcast_to((i + 1) / n, rows.shape)
        iv_c = np.broadcast_to(np.arange(n + 1, dtype=float) / n, (m, n + 1))
        iv_lo = np.concatenate([0 * ones, f], axis=1)
        iv_hi = np.concatenate([f, ones], axis=1)
        return pt_c, f, iv_c, iv_lo, iv_hi
    if side == "tail":
        q = dist.tail(rows)
        pt_c = np.broadcast_to((n - i) / n, rows.shape)
        iv_c = np.broadcast_to((n - np.arange(n + 1, dtype=float)) / n, (m, n + 1))
        iv_lo = np.concatenate([q, 0 * ones], axis=1)
        iv_hi = np.concatenate([ones, q], axis=1)
        return pt_c, q, iv_c, iv_lo, iv_hi
    raise ValueError(f"side must be 'cdf' or 'tail', got {side!r}")


def _region_sups(pt_c, pt_s, iv_c, iv_lo, iv_hi, alpha, regions):
    """Suprema restricted to {t : s(t) in region}, along the last axis.

    Each region is ``(lower, upper)`` meaning ``(lower, upper]``, or
    ``[0, upper]`` when ``lower`` is None. An empty restriction yields 0.
    """
    rp = ratio(pt_c, pt_s, alpha)
    rlo = ratio(iv_c, iv_lo, alpha)
    rhi = ratio(iv_c, iv_hi, alpha)
    out = []
    for lower, upper in regions:
        if lower is None:
            pmask = pt_s <= upper
            a, ra = iv_lo, rlo
        else:
            pmask = (pt_s > lower) & (pt_s <= upper)
            clip = iv_lo < lower
            a = np.where(clip, lower, iv_lo)
            ra = np.where(clip, ratio(iv_c, lower, alpha), rlo)
        clip = iv_hi > upper
        b = np.where(clip, upper, iv_hi)
        rb = np.where(clip, ratio(iv_c, upper, alpha), rhi)
        pv = np.where(pmask, rp, 0.0).max(axis=-1)
        iv = np.where(a < b, np.maximum(ra, rb), 0.0).max(axis=-1)
        out.append(np.maximum(pv, iv))
    return out


def _full_sup(pt_c, pt_s, iv_c, iv_lo, iv_hi, alpha):
    return np.maximum(
        ratio(pt_c, pt_s, alpha).max(axis=-1),
        np.maximum(ratio(iv_c, iv_lo, alpha), ratio(iv_c, iv_hi, alpha)).max(axis=-1),
    )


def _check_alpha(alpha):
    if not (0.0 <= alpha < 1.0):
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")


def sup_submult_deviation(sample: Sample, dist: Distribution, alpha: float,
                          side: str = "cdf") -> DeviationResult:
    """Exact sup over t of |F_n(t) - F(t)| / F(t)^alpha (or the tail analogue).

    Ties among maximizing locations resolve to the smallest t; at equal t an
    attained value wins over a one-sided limit, and a left limit over a
    right one.
    """
    _check_alpha(alpha)
    pc = _pieces(_as_values(sample), dist, side)
    # gather candidates with an ordering key (t, approach rank)
    rank = {"at": 0, "left": 1, "right": 2}
    t = np.concatenate([pc.pt_t, pc.lo_t, pc.hi_t])
    r = np.concatenate([
        np.full(pc.pt_t.size, rank["at"]),
        np.full(pc.lo_t.size, rank[pc.lo_dir]),
        np.full(pc.hi_t.size, rank[pc.hi_dir]),
    ])
    c = np.concatenate([pc.pt_c, pc.iv_c, pc.iv_c])
    s = np.concatenate([pc.pt_s, pc.iv_lo, pc.iv_hi])
    vals = ratio(c, s, alpha)
    order = np.lexsort((r, t))
    j = order[np.argmax(vals[order])]
    approach = {v: k for k, v in rank.items()}[int(r[j])]
    return DeviationResult(
        value=float(vals[j]),
        witness=float(t[j]),
        side="above" if c[j] > s[j] else "below",
        approach=approach,
    )


def sup_additive_deviation(sample: Sample, dist: Distribution) -> DeviationResult:
    """Exact Kolmogorov-Smirnov statistic sup_t |F_n(t) - F(t)|."""
    return sup_submult_deviation(sample, dist, 0.0, "cdf")


def check_submult_event(sample: Sample, dist: Distribution, alpha: float, eps: float,
                        side: str = "cdf") -> bool:
    """True iff |F_n(t) - F(t)| <= eps * F(t)^alpha holds for every t."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return sup_submult_deviation(sample, dist, alpha, side).value <= eps


def _check_region_params(alpha, eps, p, q):
    _check_alpha(alpha)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if not (0.0 < q <= 1.0):
        raise ValueError(f"q must lie in (0, 1], got {q}")


def _region_bounds(n, p, q):
    return [(None, q / n), (q / n, p), (p, 1.0)]


def region_violations(sample: Sample, dist: Distribution, alpha: float, eps: float,
                      p: float, q: float) -> tuple[bool, bool, bool]:
    """Violation indicators restricted to F(t) in [0, q/n], (q/n, p] and (p, 1].

    The middle region is empty, hence never violated, when q/n >= p.
    """
    _check_region_params(alpha, eps, p, q)
    values = _as_values(sample)
    pc = _pieces(values, dist, "cdf")
    regions = _region_bounds(values.size, p, q)
    sups = _region_sups(pc.pt_c, pc.pt_s, pc.iv_c, pc.iv_lo, pc.iv_hi, alpha, regions)
    return tuple(
        False if (lo is not None and lo >= up) else bool(sup > eps)
        for (lo, up), sup in zip(regions, sups)
    )


# -- batched kernels for the Monte Carlo engine -------------------------------

def batch_submult_sup(rows: np.ndarray, dist: Distribution, alpha: float,
                      side: str = "cdf") -> np.ndarray:
    """Row-wise exact sup for a stack of sorted samples (one row per trial)."""
    _check_alpha(alpha)
    rows = np.atleast_2d(rows)
    if dist.continuous:
        return _full_sup(*_batch_pieces(rows, dist, side), alpha)
    return np.array([sup_submult_deviation(r, dist, alpha, side).value for r in rows])


def batch_region_violations(rows: np.ndarray, dist: Distribution, alpha: float, eps: float,
                            p: float, q: float) -> np.ndarray:
    """Row-wise region indicators, shape (trials, 3)."""
    _check_region_params(alpha, eps, p, q)
    rows = np.atleast_2d(rows)
    if not dist.continuous:
        return np.array([region_violations(r, dist, alpha, eps, p, q) for r in rows])
    regions = _region_bounds(rows.shape[1], p, q)
    sups = _region_sups(*_batch_pieces(rows, dist, "cdf"), alpha, regions)
    cols = [
        np.zeros(rows.shape[0], dtype=bool) if (lo is not None and lo >= up) else sup > eps
        for (lo, up), sup in zip(regions, sups)
    ]
    return np.stack(cols, axis=1)
