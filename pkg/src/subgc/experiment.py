"""Batch runner: a JSON config of jobs in, CSV files and a manifest out.

Config::

    {"out_dir": "results",
     "jobs": [{"id": "ks-100", "kind": "massart", "dist": "uniform",
               "n": 100, "eps": 0.1, "trials": 20000, "seed": 1}, ...]}

``kind`` is one of ``massart``, ``gc``, ``region``, ``revenue``,
``implication`` or ``curve``. Every job but ``curve`` writes rows with
:data:`FREQ_HEADER`; ``curve`` jobs write :data:`CURVE_HEADER`. All jobs are
computed before anything is written, so a failing job leaves no output.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import platform
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import lemma_failure_bound, massart_bound, tune_pq
from .distributions import parse_dist
from .montecarlo import (
    GCEvent,
    ImplicationEvent,
    RegionEvent,
    RevenueEvent,
    convergence_curve,
    estimate_failure,
)

FREQ_HEADER = ["job_id", "dist", "n", "event", "successes", "trials", "p_hat", "stderr",
               "bound", "bound_feasible"]
CURVE_HEADER = ["job_id", "dist", "statistic", "n", "q25", "q50", "q75", "n_inf", "trials"]
KINDS = ("massart", "gc", "region", "revenue", "implication", "curve")


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    """Stable text form for CSV cells."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(r.get(h)) for h in header])
    return buf.getvalue()


def gc_bound(n: int, eps: float, alpha: float, p=None, q=None):
    """(bound, feasible) paired with a gc frequency: Massart at alpha = 0,
    the lemma at the given (p, q), otherwise the grid-tuned lemma."""
    if alpha == 0:
        return massart_bound(n, eps), True
    if p is not None and q is not None:
        rep = lemma_failure_bound(n, eps, alpha, p, q)
    else:
        try:
            rep = tune_pq(n, eps, alpha, strategy="grid")
        except ValueError:
            return None, False
    return (rep.bound if rep.feasible else None), rep.feasible


def freq_row(job_id, est, bound=None, feasible=False) -> dict:
    d = est.to_dict()
    d.update(job_id=job_id, bound=bound, bound_feasible=feasible)
    return d


def region_rows(job_id, ests, n, eps, alpha, p, q) -> list[dict]:
    rep = lemma_failure_bound(n, eps, alpha, p, q)
    return [freq_row(job_id, e, t, rep.feasible) for e, t in zip(ests, rep.terms)]


@dataclass
class Job:
    id: str
    kind: str
    spec: dict

    def need(self, key, typ=float):
        if key not in self.spec:
            raise ConfigError(f"job {self.id!r}: missing field {key!r}")
        try:
            return typ(self.spec[key])
        except (TypeError, ValueError):
            raise ConfigError(f"job {self.id!r}: bad value for {key!r}") from None

    def get(self, key, default=None, typ=float):
        return self.need(key, typ) if key in self.spec else default


def _parse_jobs(config: dict) -> list[Job]:
    if not isinstance(config, dict) or not isinstance(config.get("jobs"), list) or not config["jobs"]:
        raise ConfigError("config needs a nonempty 'jobs' list")
    jobs, seen = [], set()
    for i, spec in enumerate(config["jobs"]):
        if not isinstance(spec, dict):
            raise ConfigError(f"job #{i} is not an object")
        jid = str(spec.get("id", f"job{i}"))
        if jid in seen or not jid.replace("-", "").replace("_", "").isalnum():
            raise ConfigError(f"job id {jid!r} is duplicated or not filename-safe")
        seen.add(jid)
        kind = spec.get("kind")
        if kind not in KINDS:
            raise ConfigError(f"job {jid!r}: kind must be one of {KINDS}")
        try:
            parse_dist(str(spec.get("dist", "")))
        except ValueError as e:
            raise ConfigError(f"job {jid!r}: {e}") from None
        jobs.append(Job(jid, kind, spec))
    return jobs


def run_job(job: Job, workers=None) -> tuple[list[str], list[dict]]:
    dist = parse_dist(job.spec["dist"])
    trials = job.need("trials", int)
    seed = job.need("seed", int)
    if job.kind == "curve":
        n_list = job.spec.get("n_list")
        if not isinstance(n_list, list):
            raise ConfigError(f"job {job.id!r}: curve jobs need an 'n_list' array")
        stat = job.spec.get("statistic", "revenue_error")
        rows = convergence_curve(dist, n_list, trials, seed, stat, job.get("alpha"), workers)
        return CURVE_HEADER, [dict(r.to_dict(), job_id=job.id, dist=dist.spec(), statistic=stat) for r in rows]

    n = job.need("n", int)
    eps = job.need("eps")
    if job.kind == "massart":
        est = estimate_failure(dist, n, GCEvent(eps, 0.0), trials, seed, workers)
        return FREQ_HEADER, [freq_row(job.id, est, massart_bound(n, eps), True)]
    if job.kind == "gc":
        alpha = job.get("alpha", 0.0)
        est = estimate_failure(dist, n, GCEvent(eps, alpha, job.spec.get("side", "cdf")), trials, seed, workers)
        b, ok = gc_bound(n, eps, alpha, job.get("p"), job.get("q"))
        return FREQ_HEADER, [freq_row(job.id, est, b, ok)]
    if job.kind == "region":
        alpha, p, q = job.need("alpha"), job.need("p"), job.need("q")
        ests = estimate_failure(dist, n, RegionEvent(eps, alpha, p, q), trials, seed, workers)
        return FREQ_HEADER, region_rows(job.id, ests, n, eps, alpha, p, q)
    if job.kind == "revenue":
        est = estimate_failure(dist, n, RevenueEvent(eps), trials, seed, workers)
        return FREQ_HEADER, [freq_row(job.id, est)]
    if job.kind == "implication":
        ev = ImplicationEvent(eps, job.need("theta"), job.need("C"))
        est = estimate_failure(dist, n, ev, trials, seed, workers)
        return FREQ_HEADER, [freq_row(job.id, est)]
    raise ConfigError(f"unknown kind {job.kind!r}")


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def run_experiment(config: dict, out_dir=None, workers=None) -> dict:
    """Run every job, then write ``<id>.csv`` per job and ``manifest.json``.

    Returns the manifest. ``out_dir`` overrides the config's ``out_dir``.
    """
    jobs = _parse_jobs(config)
    out = Path(out_dir or config.get("out_dir") or "")
    if not str(out):
        raise ConfigError("no output directory given")
    texts = {}
    for job in jobs:
        header, rows = run_job(job, workers)
        texts[f"{job.id}.csv"] = csv_text(header, rows)
    manifest = {
        "config_sha256": config_hash(config),
        "jobs": [{"id": j.id, "kind": j.kind, "seed": j.spec.get("seed"), "file": f"{j.id}.csv"} for j in jobs],
        "versions": {"subgc": __version__, "numpy": np.__version__, "python": platform.python_version()},
    }
    texts["manifest.json"] = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    out.mkdir(parents=True, exist_ok=True)
    tmp = {}
    try:
        for name, text in texts.items():
            tmp[name] = out / f".{name}.tmp"
            tmp[name].write_text(text)
        for name, path in tmp.items():
            os.replace(path, out / name)
    finally:
        for path in tmp.values():
            if path.exists():
                path.unlink()
    return manifest


def load_config(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None

