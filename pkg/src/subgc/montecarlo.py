"""Reproducible Monte Carlo estimates of the events the bounds control.

Trial ``t`` of a run with seed ``s`` draws its sample from a Philox stream
keyed by ``s`` whose counter starts at ``t << 128``; streams are disjoint,
need no shared state, and a sample of size n is the first n draws of its
stream. Trials are evaluated in blocks that may run on any number of worker
threads. Indicators are gathered back in trial order, so aggregates do not
depend on the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .distributions import Distribution, sample
from .empirical import batch_region_violations, batch_submult_sup, sup_submult_deviation
from .revenue import revenue_error
from .bounds import reduce_revenue_to_gc

__all__ = [
    "FreqEstimate",
    "GCEvent",
    "ImplicationEvent",
    "RegionEvent",
    "RevenueEvent",
    "convergence_curve",
    "estimate_failure",
    "stream",
    "worker_count",
]

_MASK128 = (1 << 128) - 1
# cap on values held per block
_BLOCK_VALUES = 1 << 21


def stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for trial ``index`` of a run seeded with ``seed``."""
    if seed < 0 or index < 0:
        raise ValueError("seed and stream index must be nonnegative")
    key = seed & _MASK128
    counter = [0, 0, index & 0xFFFFFFFFFFFFFFFF, index >> 64]
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def worker_count(workers: int | None = None) -> int:
    """Explicit count, else SUBGC_THREADS, else the available CPUs."""
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("SUBGC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"SUBGC_THREADS must be an integer, got {env!r}") from None
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


# -- events -------------------------------------------------------------------

@dataclass(frozen=True)
class GCEvent:
    """Violation of |F - F_n| <= eps F^alpha somewhere (strict inequality)."""

    eps: float
    alpha: float = 0.0
    side: str = "cdf"

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not (0 <= self.alpha < 1):
            raise ValueError("alpha must lie in [0, 1)")
        if self.side not in ("cdf", "tail"):
            raise ValueError("side must be 'cdf' or 'tail'")

    @property
    def label(self) -> str:
        return f"gc(eps={self.eps:g},alpha={self.alpha:g},side={self.side})"


@dataclass(frozen=True)
class RevenueEvent:
    """sup_p |r_n(p) - r(p)| > eps."""

    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    @property
    def label(self) -> str:
        return f"revenue(eps={self.eps:g})"


@dataclass(frozen=True)
class RegionEvent:
    """Violations split by F(t) in [0, q/n], (q/n, p] and (p, 1]."""

    eps: float
    alpha: float
    p: float
    q: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not (0 <= self.alpha < 1):
            raise ValueError("alpha must lie in [0, 1)")
        if not (0 < self.p < 1) or not (0 < self.q <= 1):
            raise ValueError("need p in (0, 1) and q in (0, 1]")

    @property
    def label(self) -> str:
        return f"region(eps={self.eps:g},alpha={self.alpha:g},p={self.p:g},q={self.q:g})"


@dataclass(frozen=True)
class ImplicationEvent:
    """The pathwise reduction holds: a revenue error above eps forces a
    tail-side submultiplicative deviation above eps / C^(1/(1+theta)).

    Counted as a success when the implication holds in a trial.
    """

    eps: float
    theta: float
    C: float

    def __post_init__(self):
        reduce_revenue_to_gc(self.eps, self.theta, self.C)

    @property
    def label(self) -> str:
        return f"implication(eps={self.eps:g},theta={self.theta:g},C={self.C:g})"


EventSpec = Union[GCEvent, RevenueEvent, RegionEvent, ImplicationEvent]


@dataclass(frozen=True)
class FreqEstimate:
    successes: int
    trials: int
    seed: int
    dist: str
    n: int
    event: str

    @property
    def p_hat(self) -> float:
        return self.successes / self.trials

    @property
    def stderr(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1.0 - p) / self.trials)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p_hat"] = self.p_hat
        d["stderr"] = self.stderr
        return d


# -- trial engine ----------------------------------------------------------------

def draw_block(dist: Distribution, n: int, seed: int, start: int, stop: int) -> np.ndarray:
    """Sorted samples for trials [start, stop), one row each."""
    return np.stack([sample(dist, stream(seed, t), n) for t in range(start, stop)])


def _indicator_fn(dist: Distribution, event: EventSpec) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(event, GCEvent):
        return lambda rows: batch_submult_sup(rows, dist, event.alpha, event.side) > event.eps
    if isinstance(event, RegionEvent):
        return lambda rows: batch_region_violations(rows, dist, event.alpha, event.eps, event.p, event.q)
    if isinstance(event, RevenueEvent):
        return lambda rows: np.array([revenue_error(r, dist) > event.eps for r in rows])
    if isinstance(event, ImplicationEvent):
        mom = dist.moment(1.0 + event.theta)
        if not mom <= event.C:
            raise ValueError(f"E[V^{1 + event.theta:g}] = {mom:g} exceeds C = {event.C:g} for {dist}")
        red = reduce_revenue_to_gc(event.eps, event.theta, event.C)

        def holds(rows):
            out = []
            for r in rows:
                if revenue_error(r, dist) > event.eps:
                    out.append(sup_submult_deviation(r, dist, red.alpha, "tail").value > red.eps)
                else:
                    out.append(True)
            return np.array(out)
        return holds
    raise TypeError(f"unknown event {event!r}")


def _blocks(trials: int, n: int) -> list[tuple[int, int]]:
    size = max(1, min(4096, _BLOCK_VALUES // n))
    return [(s, min(s + size, trials)) for s in range(0, trials, size)]


def run_trials(dist: Distribution, n: int, trials: int, seed: int,
               fn: Callable[[np.ndarray], np.ndarray], workers: int | None = None) -> np.ndarray:
    """Evaluate ``fn`` on every trial's sample; results stacked in trial order."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if n < 1:
        raise ValueError("n must be positive")
    blocks = _blocks(trials, n)

    def job(b):
        return fn(draw_block(dist, n, seed, *b))

    w = worker_count(workers)
    if w == 1 or len(blocks) == 1:
        parts = [job(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=w) as ex:
            parts = list(ex.map(job, blocks))
    return np.concatenate(parts, axis=0)


def estimate_failure(dist: Distribution, n: int, event: EventSpec, trials: int, seed: int,
                     workers: int | None = None):
    """Frequency of ``event`` over ``trials`` independent samples of size n.

    Returns one :class:`FreqEstimate`, or a tuple of three (one per region)
    for a :class:`RegionEvent`.
    """
    hits = run_trials(dist, n, trials, seed, _indicator_fn(dist, event), workers)
    echo = dict(trials=trials, seed=seed, dist=dist.spec(), n=n)
    if isinstance(event, RegionEvent):
        names = ("low", "middle", "high")
        return tuple(
            FreqEstimate(int(hits[:, j].sum()), event=f"{event.label}[{names[j]}]", **echo)
            for j in range(3)
        )
    return FreqEstimate(int(hits.sum()), event=event.label, **echo)


# -- convergence curves ------------------------------------------------------------

STATISTICS = ("revenue_error", "ks", "submult")


@dataclass(frozen=True)
class CurveRow:
    n: int
    q25: float
    q50: float
    q75: float
    n_inf: int
    trials: int

    def to_dict(self) -> dict:
        return asdict(self)


def _statistic_fn(dist, statistic, alpha):
    if statistic == "revenue_error":
        return lambda rows: np.array([revenue_error(r, dist) for r in rows])
    if statistic == "ks":
        return lambda rows: batch_submult_sup(rows, dist, 0.0, "cdf")
    if statistic == "submult":
        if alpha is None:
            raise ValueError("submult statistic needs alpha")
        return lambda rows: batch_submult_sup(rows, dist, alpha, "cdf")
    raise ValueError(f"unknown statistic {statistic!r}; choose from {STATISTICS}")


def convergence_curve(dist: Distribution, n_list: Sequence[int], trials: int, seed: int,
                      statistic: str = "revenue_error", alpha: float | None = None,
                      workers: int | None = None) -> list[CurveRow]:
    """Per-n quartiles of a deviation statistic across trials.

    Trial t uses the same stream at every n, so each trial follows one
    growing sample path. Quartiles are order statistics (no interpolation),
    which keeps them meaningful when some values are infinite; ``n_inf``
    counts those.
    """
    n_list = [int(x) for x in n_list]
    if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])) or n_list[0] < 1:
        raise ValueError("n_list must be a nonempty strictly increasing list of positive integers")
    fn = _statistic_fn(dist, statistic, alpha)
    rows = []
    for n in n_list:
        vals = run_trials(dist, n, trials, seed, fn, workers)
        q = np.quantile(vals, [0.25, 0.5, 0.75], method="inverted_cdf")
        rows.append(CurveRow(n, float(q[0]), float(q[1]), float(q[2]), int(np.isinf(vals).sum()), trials))
    return rows
