"""Command-line entry point: ``hyperboot {theory,simulate,scan,couple,gw}``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

import numpy as np

from . import branching, theory
from .exceptions import BadPairing, HyperbootError
from .experiments import (TrialConfig, derive_seed, parse_ratios, phase_scan, run_trial,
                          sandwich_check, scan_csv)


def _float(x: float):
    if x is None:
        return None
    if isinstance(x, float) and (math.isinf(x) or math.isnan(x)):
        return str(x)
    return float(f"{x:.12g}")


def _common(p: argparse.ArgumentParser, with_eps: bool = True) -> None:
    p.add_argument("--n", type=int, required=True, help="number of vertices")
    p.add_argument("--k", type=int, required=True, help="edge size")
    p.add_argument("--r", type=int, required=True, help="infection threshold")
    p.add_argument("--p", type=float, required=True, help="edge probability")
    if with_eps:
        p.add_argument("--eps", type=float, default=0.1)
        p.add_argument("--delta", type=float, default=0.05)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hyperboot", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory", help="thresholds, margins and trajectories")
    _common(p)
    p.add_argument("--steps", type=int, default=50)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="print the summary JSON (default)")
    fmt.add_argument("--csv", action="store_true", help="print trajectory tables as CSV")

    p = sub.add_parser("simulate", help="one trial of one process")
    _common(p)
    p.add_argument("--a", type=int, required=True, help="initial infection size")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--process", choices=("bootstrap", "query", "mild"), default="bootstrap")
    p.add_argument("--trace", metavar="FILE", help="write the step trace as JSON")

    p = sub.add_parser("scan", help="phase scan over a / a_c")
    _common(p)
    p.add_argument("--ratios", required=True, help="LO:HI:STEP or a comma list")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="CSV output path ('-' for stdout)")
    p.add_argument("--process", choices=("bootstrap", "query", "mild"), default="bootstrap")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = sub.add_parser("couple", help="check mild <= bootstrap <= query on shared instances")
    _common(p)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--shuffles", type=int, default=0, help="random query orders per instance")

    p = sub.add_parser("gw", help="Galton-Watson total progeny and tail bound")
    p.add_argument("--weights", required=True, help="comma list of positive integers")
    p.add_argument("--probs", required=True, help="comma list of probabilities")
    p.add_argument("--roots", type=int, required=True)
    p.add_argument("--m-max", type=int, default=50)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--chi", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _params(args, side: str = "subcritical") -> theory.RegimeParams:
    return theory.RegimeParams(args.n, args.k, args.r, args.p, args.eps, args.delta, side)


def cmd_theory(args, out) -> int:
    base = dict(n=args.n, k=args.k, r=args.r, p=args.p, eps=args.eps, delta=args.delta)
    sides = {}
    for side in theory.SIDES:
        try:
            sides[side] = theory.RegimeParams(**base, side=side)
        except BadPairing as exc:
            logging.warning("%s", exc)
    any_params = next(iter(sides.values()), None)
    if any_params is None:
        raise BadPairing("(eps, delta) is invalid on both sides")
    m_low, m_high, ok = theory.regime_margin(any_params)
    sub = sides.get("subcritical")
    sup = sides.get("supercritical")
    beta0 = (1 - args.eps) * (1 - 1 / args.r)
    summary = {
        "eta": theory.eta(args.k, args.r),
        "a_star": _float(theory.a_star(any_params)),
        "a_c": _float(theory.a_crit(any_params)),
        "m_low": _float(m_low),
        "m_high": _float(m_high),
        "regime_ok": ok,
        "x0": _float(theory.x0_solve(args.r, args.delta, beta0)) if sub else None,
        "Delta": _float(theory.delta_floor(args.eps, args.delta, args.r)) if sup else None,
        "phi_c": _float(theory.phi_c(args.r)),
    }
    if args.csv:
        if sub:
            table = theory.beta_trajectory(sub, args.steps)
            out.write(_select(table, ("t", "b", "beta")))
        if sup:
            if sub:
                out.write("\n")
            table = theory.gamma_trajectory(sup, args.steps)
            cols = ("t", "c", "gamma") + tuple(f"c_{i}" for i in range(args.r + 1))
            out.write(_select(table, cols))
    else:
        out.write(json.dumps(summary) + "\n")
    return 0


def _select(table: theory.TrajectoryTable, cols) -> str:
    idx = [table.columns.index(c) for c in cols]
    lines = [",".join(cols)]
    for row in table.rows:
        lines.append(",".join(str(row[i]) if isinstance(row[i], int) else f"{row[i]:.12g}" for i in idx))
    return "\n".join(lines) + "\n"


def cmd_simulate(args, out) -> int:
    config = TrialConfig(_params(args), args.a, args.process, args.seed, 0, verbose_trace=bool(args.trace))
    record = run_trial(config)
    data = record.as_dict()
    trace = data.pop("trace", None)
    data["runtime_ms"] = _float(data["runtime_ms"])
    data["a_over_ac"] = _float(data["a_over_ac"])
    data["a_star"] = _float(data["a_star"])
    out.write(json.dumps(data) + "\n")
    if args.trace:
        with open(args.trace, "w") as fh:
            json.dump(trace, fh)
    return 0


def cmd_scan(args, out) -> int:
    rows = phase_scan(_params(args), parse_ratios(args.ratios), args.trials, args.seed,
                      process=args.process, n_jobs=args.jobs)
    text = scan_csv(rows)
    if args.out == "-":
        out.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    return 0


def cmd_couple(args, out) -> int:
    report = sandwich_check(_params(args), args.a, args.trials, args.seed, shuffles=args.shuffles)
    out.write(json.dumps(report.as_dict()) + "\n")
    return 0 if report.violations == 0 else 1


def cmd_gw(args, out) -> int:
    weights = [int(w) for w in args.weights.split(",")]
    probs = [float(q) for q in args.probs.split(",")]
    dist = branching.OffspringDistribution(tuple(weights), tuple(probs))
    proc = branching.GWProcess(dist, args.roots)
    samples = branching.sample_total_progeny_many(proc, args.samples, seed=derive_seed(args.seed, 0))
    out.write("m,dwass,dp,empirical\n")
    for m in range(max(args.roots, 1), args.m_max + 1):
        dw = branching.dwass_pmf(proc, m)
        dp = branching.total_progeny_pmf_dp(proc, m)
        emp = float(np.mean(samples == m)) if samples.size else 0.0
        out.write(f"{m},{dw:.12g},{dp:.12g},{emp:.12g}\n")
    if args.chi is not None:
        thresh = (1 + args.chi) * args.roots
        tail = float(np.mean((samples < 0) | (samples > thresh)))
        se = math.sqrt(tail * (1 - tail) / max(samples.size, 1))
        bound = branching.gw_tail_bound(dist.mu, dist.M, args.chi, args.roots)
        out.write("\nchi,threshold,empirical_tail,std_err,bound\n")
        out.write(f"{args.chi:.12g},{thresh:.12g},{tail:.12g},{se:.12g},{bound:.12g}\n")
    return 0


COMMANDS = {"theory": cmd_theory, "simulate": cmd_simulate, "scan": cmd_scan,
            "couple": cmd_couple, "gw": cmd_gw}


def main(argv=None, out=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, out or sys.stdout)
    except (HyperbootError, ValueError) as exc:
        print(f"hyperboot: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
