"""Submultiplicative Glivenko-Cantelli bounds and revenue learning.

Closed-form failure bounds and sample sizes, exact sup-deviations of
empirical CDFs and revenue curves, and a seeded Monte Carlo harness.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    lemma_failure_bound,
    massart_bound,
    n0_revenue,
    n0_submult,
    tail_sum_bounds,
    tune_pq,
)
from .distributions import EqualRevenue, Eta, Pareto, Uniform01, parse_dist, sample
from .empirical import (
    Sample,
    check_submult_event,
    sup_additive_deviation,
    sup_submult_deviation,
)
from .montecarlo import convergence_curve, estimate_failure
from .revenue import pick_price, revenue_error

__all__ = [
    "BoundReport",
    "EqualRevenue",
    "Eta",
    "Pareto",
    "Sample",
    "Uniform01",
    "check_submult_event",
    "convergence_curve",
    "estimate_failure",
    "lemma_failure_bound",
    "massart_bound",
    "n0_revenue",
    "n0_submult",
    "parse_dist",
    "pick_price",
    "revenue_error",
    "sample",
    "sup_additive_deviation",
    "sup_submult_deviation",
    "tail_sum_bounds",
    "tune_pq",
]
