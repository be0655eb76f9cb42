"""Command-line entry point: ``subgc bound|simulate|sweep|plot``.

Every run first writes its resolved options (defaults included) as one
``# config: {...}`` line on stderr, then the results on stdout or to
``--out``. Exit status is 0 on success, 2 for bad input or an infeasible
request, and 1 for anything unexpected.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path

from .bounds import (
    lemma_failure_bound,
    massart_bound,
    n0_revenue,
    n0_submult,
    tail_sum_bounds,
    tune_pq,
)
from .distributions import parse_dist
from .experiment import (
    CURVE_HEADER,
    FREQ_HEADER,
    csv_text,
    freq_row,
    gc_bound,
    load_config,
    region_rows,
    run_experiment,
)
from .montecarlo import (
    STATISTICS,
    GCEvent,
    ImplicationEvent,
    RegionEvent,
    RevenueEvent,
    convergence_curve,
    estimate_failure,
)
from .plot import plot_csv

BOUND_HEADER = ["kind", "bound", "term_low", "term_middle", "term_high", "n", "eps", "alpha",
                "p", "q", "m", "feasible", "vacuous", "diagnostic"]


class UserError(Exception):
    """Bad input that should end the run with status 2."""


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(args, header, rows):
    if args.format == "json":
        text = json.dumps(rows if len(rows) != 1 or args.command != "bound" else rows[0],
                          indent=2, sort_keys=True) + "\n"
    else:
        text = csv_text(header, rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# -- bound ------------------------------------------------------------------------

def _report_row(kind, rep) -> dict:
    d = rep.to_dict()
    d["term_low"], d["term_middle"], d["term_high"] = d.pop("terms")
    d["kind"] = kind
    return d


def cmd_bound(args) -> int:
    what = args.what
    if what == "massart":
        b = massart_bound(args.n, args.eps)
        row = {"kind": "massart", "bound": b, "n": args.n, "eps": args.eps, "alpha": 0.0,
               "feasible": True, "vacuous": b >= 1.0, "diagnostic": ""}
        _emit(args, BOUND_HEADER, [row])
        return 0
    if what == "lemma":
        if args.tune:
            rep = tune_pq(args.n, args.eps, args.alpha, args.delta, strategy=args.tune)
        elif args.p is None or args.q is None:
            raise UserError("lemma needs --p and --q, or --tune")
        else:
            rep = lemma_failure_bound(args.n, args.eps, args.alpha, args.p, args.q)
        _emit(args, BOUND_HEADER, [_report_row("lemma", rep)])
        if not rep.feasible:
            raise UserError(f"infeasible: {rep.diagnostic}")
        return 0
    if what == "submult-n0":
        v = n0_submult(args.eps, args.delta, args.alpha)
        _emit(args, ["kind", "n0", "eps", "delta", "alpha"],
              [{"kind": "submult-n0", "n0": v, "eps": args.eps, "delta": args.delta, "alpha": args.alpha}])
        return 0
    if what == "revenue-n0":
        r = n0_revenue(args.eps, args.delta, args.theta, args.C)
        _emit(args, ["kind", "n0", "eps_gc", "alpha", "leading_order", "eps", "delta", "theta", "C"],
              [{"kind": "revenue-n0", "n0": r.value, "eps_gc": r.eps_gc, "alpha": r.alpha,
                "leading_order": r.leading_order, "eps": args.eps, "delta": args.delta,
                "theta": args.theta, "C": args.C}])
        return 0
    if what == "tail-sum":
        dist = parse_dist(args.dist)
        t = tail_sum_bounds(dist, args.N)
        _emit(args, ["kind", "dist", "N", "lower", "upper", "remainder", "mean"],
              [{"kind": "tail-sum", "dist": dist.spec(), "N": args.N, "lower": t.lower,
                "upper": t.upper, "remainder": t.remainder, "mean": dist.moment(1.0)}])
        return 0
    raise UserError(f"unknown bound {what!r}")


# -- simulate -------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    dist = parse_dist(args.dist)
    kind = args.event
    jid = f"simulate-{kind}"
    if kind == "gc":
        est = estimate_failure(dist, args.n, GCEvent(args.eps, args.alpha, args.side),
                               args.trials, args.seed)
        b, ok = gc_bound(args.n, args.eps, args.alpha, args.p, args.q)
        rows = [freq_row(jid, est, b, ok)]
    elif kind == "region":
        if args.p is None or args.q is None:
            raise UserError("region needs --p and --q")
        ests = estimate_failure(dist, args.n, RegionEvent(args.eps, args.alpha, args.p, args.q),
                                args.trials, args.seed)
        rows = region_rows(jid, ests, args.n, args.eps, args.alpha, args.p, args.q)
    elif kind == "revenue":
        est = estimate_failure(dist, args.n, RevenueEvent(args.eps), args.trials, args.seed)
        rows = [freq_row(jid, est)]
    else:
        if args.theta is None or args.C is None:
            raise UserError("implication needs --theta and --C")
        est = estimate_failure(dist, args.n, ImplicationEvent(args.eps, args.theta, args.C),
                               args.trials, args.seed)
        rows = [freq_row(jid, est)]
    _emit(args, FREQ_HEADER, rows)
    return 0


# -- sweep ------------------------------------------------------------------------------

def cmd_sweep(args) -> int:
    if args.what == "curve":
        dist = parse_dist(args.dist)
        rows = convergence_curve(dist, args.n_list, args.trials, args.seed, args.statistic, args.alpha)
        out = [dict(r.to_dict(), job_id="sweep-curve", dist=dist.spec(), statistic=args.statistic)
               for r in rows]
        _emit(args, CURVE_HEADER, out)
        return 0
    if args.what == "alpha":
        dist = parse_dist(args.dist)
        out = []
        for a in args.alpha_list:
            est = estimate_failure(dist, args.n, GCEvent(args.eps, a, args.side), args.trials, args.seed)
            b, ok = gc_bound(args.n, args.eps, a)
            out.append(freq_row(f"alpha={a:g}", est, b, ok))
        _emit(args, FREQ_HEADER, out)
        return 0
    config = load_config(args.config)
    manifest = run_experiment(config, out_dir=args.out)
    sys.stdout.write(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return 0


# -- plot ---------------------------------------------------------------------------------

def cmd_plot(args) -> int:
    if not args.out:
        raise UserError("plot needs --out")
    plot_csv(args.input, args.x, args.y, args.out, args.logx, args.logy)
    return 0


# -- parser -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base seed for trial streams (default 0)")
    common.add_argument("--out", help="write results here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    ap = argparse.ArgumentParser(prog="subgc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    # bound
    bp = sub.add_parser("bound", help="evaluate a closed-form bound")
    bsub = bp.add_subparsers(dest="what", required=True)
    p = bsub.add_parser("massart", parents=[common], help="2 exp(-2 n eps^2)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p = bsub.add_parser("lemma", parents=[common], help="three-term submultiplicative failure bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--tune", choices=("paper", "grid"))
    p.add_argument("--delta", type=float)
    p = bsub.add_parser("submult-n0", parents=[common], help="sample size for the submultiplicative event")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p = bsub.add_parser("revenue-n0", parents=[common], help="sample size for uniform revenue estimation")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--C", type=float, required=True)
    p = bsub.add_parser("tail-sum", parents=[common], help="truncated tail sums bracketing the mean")
    p.add_argument("--dist", required=True)
    p.add_argument("--N", type=int, required=True)
    bp.set_defaults(func=cmd_bound)

    # simulate
    sp = sub.add_parser("simulate", help="Monte Carlo frequency of an event")
    ssub = sp.add_subparsers(dest="event", required=True)
    for name in ("gc", "revenue", "region", "implication"):
        p = ssub.add_parser(name, parents=[common])
        p.add_argument("--dist", required=True)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--trials", type=int, required=True)
        p.add_argument("--eps", type=float, required=True)
        if name in ("gc", "region"):
            p.add_argument("--alpha", type=float, default=0.0)
            p.add_argument("--p", type=float)
            p.add_argument("--q", type=float)
        if name == "gc":
            p.add_argument("--side", choices=("cdf", "tail"), default="cdf")
        if name == "implication":
            p.add_argument("--theta", type=float)
            p.add_argument("--C", type=float)
    sp.set_defaults(func=cmd_simulate)

    # sweep
    wp = sub.add_parser("sweep", help="families of simulations")
    wsub = wp.add_subparsers(dest="what", required=True)
    p = wsub.add_parser("curve", parents=[common], help="quartiles of a deviation statistic across n")
    p.add_argument("--dist", required=True)
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--statistic", choices=STATISTICS, default="revenue_error")
    p.add_argument("--alpha", type=float)
    p = wsub.add_parser("alpha", parents=[common], help="gc failure frequency across alpha values")
    p.add_argument("--dist", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--alpha-list", type=_float_list, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--side", choices=("cdf", "tail"), default="cdf")
    p = wsub.add_parser("experiment", parents=[common], help="run a JSON batch config")
    p.add_argument("--config", required=True)
    wp.set_defaults(func=cmd_sweep)

    # plot
    pp = sub.add_parser("plot", parents=[common], help="SVG line chart from a CSV file")
    pp.add_argument("--in", dest="input", required=True)
    pp.add_argument("--x", required=True)
    pp.add_argument("--y", type=lambda s: [c for c in s.split(",") if c], required=True,
                    help="column name, or several separated by commas")
    pp.add_argument("--logx", action="store_true")
    pp.add_argument("--logy", action="store_true")
    pp.set_defaults(func=cmd_plot)
    return ap


def _resolved(args) -> str:
    d = {k: v for k, v in vars(args).items() if k != "func"}
    return "# config: " + json.dumps(d, sort_keys=True, default=str)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    print(_resolved(args), file=sys.stderr)
    try:
        return args.func(args)
    except (UserError, ValueError, OSError) as e:
        print(f"subgc: error: {e}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
