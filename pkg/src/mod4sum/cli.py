"""Batch command-line front end.

Every invocation writes one JSON report to stdout and a short summary to
stderr::

    mod4sum search --parties 4 --mode exhaustive
    mod4sum eval --parties 5 --chain "0011|01011010|01011010|01011010"
    mod4sum quantum-verify --parties 8
    mod4sum threshold --pc 5/8 --per-plate 0.995 --mu 0.01 --s 0.9
    mod4sum montecarlo --kind quantum --parties 5 --trials 1000000 --seed 7 --eta 0.33
    mod4sum bounds --exact 3=3/4,4=3/4,5=5/8 --lower 6=5/8,7=9/16,8=9/16

Exit codes: 0 success, 1 internal inconsistency, 2 bad arguments,
3 refused by the resource guard.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .classical import combine_bounds, evaluate_chain_dp, reference_chain, total_inputs
from .core import parse_chain
from .errors import (
    ChainFormatError,
    DegenerateParameters,
    InconsistentBoundsError,
    ResourceLimitError,
)
from .montecarlo import CLASSICAL, QUANTUM, run_experiment
from .noise import (
    NoiseParams,
    bare_eta_threshold,
    chain_transmissivity,
    effective_success,
    eta_threshold,
)
from .probability import SuccessProbability, parse_rational
from .quantum import verify_ideal
from .search import EXHAUSTIVE, default_jobs, exhaustive_search, heuristic_search

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

log = logging.getLogger("mod4sum")


class UsageError(Exception):
    pass


def rational(value) -> dict[str, Any]:
    f = value.fraction if isinstance(value, SuccessProbability) else Fraction(value)
    return {"num": f.numerator, "den": f.denominator, "approx": float(f)}


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _unit_float(text: str) -> float:
    try:
        value = float(parse_rational(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is outside [0, 1]")
    return value


def _parties(text: str) -> int:
    n = int(text)
    if n < 3:
        raise argparse.ArgumentTypeError("need at least 3 parties")
    return n


def _bound_map(text: str) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    if not text:
        return out
    for item in text.split(","):
        try:
            n, value = item.split("=")
            out[int(n)] = parse_rational(value)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"expected N=RAT, got {item!r}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mod4sum", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--csv", type=Path, help="also write the result rows as CSV")
    common.add_argument("--jobs", type=int, default=default_jobs(), help="worker processes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", parents=[common], help="optimal classical success probability")
    p.add_argument("--parties", type=_parties, required=True)
    p.add_argument("--mode", choices=["exhaustive", "heuristic"], required=True)
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--allow-large", action="store_true")

    p = sub.add_parser("eval", parents=[common], help="exact success probability of chains")
    p.add_argument("--parties", type=_parties, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--chain")
    group.add_argument("--chain-file", type=Path)

    p = sub.add_parser("quantum-verify", parents=[common], help="check the qubit protocol on every input")
    p.add_argument("--parties", type=_parties, required=True)

    p = sub.add_parser("threshold", parents=[common], help="minimum detection efficiency")
    p.add_argument("--pc", type=_rational_arg, required=True)
    p.add_argument("--t", type=_unit_float)
    p.add_argument("--mu", type=_unit_float, default=0.0)
    p.add_argument("--s", type=_unit_float, default=1.0)
    p.add_argument("--per-plate", type=_unit_float)
    p.add_argument("--parties", type=_parties, default=5, help="plates for --per-plate")

    p = sub.add_parser("montecarlo", parents=[common], help="seeded sampling experiment")
    p.add_argument("--kind", choices=[QUANTUM, CLASSICAL], required=True)
    p.add_argument("--parties", type=_parties, required=True)
    p.add_argument("--chain", help="classical chain; defaults to the reference chain")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--eta", type=_unit_float, default=1.0)
    p.add_argument("--t", type=_unit_float, default=1.0)
    p.add_argument("--mu", type=_unit_float, default=0.0)
    p.add_argument("--s", type=_unit_float, default=1.0)

    p = sub.add_parser("bounds", parents=[common], help="combine exact optima and lower bounds")
    p.add_argument("--exact", type=_bound_map, default={})
    p.add_argument("--lower", type=_bound_map, default={})
    p.add_argument("--t", type=_unit_float, default=1.0)
    p.add_argument("--mu", type=_unit_float, default=0.0)
    p.add_argument("--s", type=_unit_float, default=1.0)
    return parser


def _load_chains(args) -> list[str]:
    if args.chain is not None:
        return [args.chain]
    try:
        lines = args.chain_file.read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read {args.chain_file}: {exc}") from exc
    return [ln.strip() for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]


def cmd_search(args) -> tuple[dict, dict, list[dict]]:
    inputs = {"parties": args.parties, "mode": args.mode, "allow_large": args.allow_large}
    if args.mode == EXHAUSTIVE:
        result = exhaustive_search(args.parties, jobs=args.jobs, allow_large=args.allow_large)
    else:
        if args.budget < 1:
            raise UsageError("--budget must be positive")
        inputs.update(budget=args.budget, seed=args.seed)
        result = heuristic_search(args.parties, args.budget, seed=args.seed)
    results = {
        "n_parties": result.n_parties,
        "mode": result.mode,
        "optimum": rational(result.optimum),
        "witness": str(result.witness),
        "chains_examined": result.chains_examined,
    }
    log.info("N=%d %s optimum %s (witness %s)", args.parties, result.mode, result.optimum, result.witness)
    row = {"n_parties": result.n_parties, "mode": result.mode,
           "optimum": str(result.optimum), "witness": str(result.witness)}
    return inputs, results, [row]


def cmd_eval(args) -> tuple[dict, dict, list[dict]]:
    texts = _load_chains(args)
    if not texts:
        raise UsageError("no chains given")
    rows, entries = [], []
    for text in texts:
        try:
            chain = parse_chain(text)
        except ChainFormatError as exc:
            raise UsageError(str(exc)) from exc
        if chain.n_parties != args.parties:
            raise UsageError(f"chain {text!r} is for {chain.n_parties} parties, not {args.parties}")
        p = evaluate_chain_dp(chain)
        entries.append({"chain": text, "success": rational(p)})
        rows.append({"chain": text, "success": str(p)})
        log.info("%s -> %s", text, p)
    inputs = {"parties": args.parties, "chains": texts}
    results: dict[str, Any] = {"n_parties": args.parties, "evaluations": entries}
    if len(entries) == 1:
        results["success"] = entries[0]["success"]
    else:
        best = max(range(len(entries)), key=lambda i: Fraction(
            entries[i]["success"]["num"], entries[i]["success"]["den"]))
        results["best"] = entries[best]
    return inputs, results, rows


def cmd_quantum_verify(args) -> tuple[dict, dict, list[dict]]:
    ok = verify_ideal(args.parties)
    results = {
        "n_parties": args.parties,
        "tuples_checked": total_inputs(args.parties),
        "verified": ok,
        "success": rational(Fraction(1) if ok else Fraction(0)),
    }
    log.info("N=%d: qubit protocol %s on %d inputs", args.parties,
             "correct" if ok else "FAILED", total_inputs(args.parties))
    return {"parties": args.parties}, results, [results | {"success": str(int(ok))}]


def cmd_threshold(args) -> tuple[dict, dict, list[dict]]:
    if args.t is not None and args.per_plate is not None:
        raise UsageError("give either --t or --per-plate, not both")
    t = args.t if args.t is not None else 1.0
    inputs: dict[str, Any] = {"pc": rational(args.pc), "mu": args.mu, "s": args.s}
    if args.per_plate is not None:
        t = chain_transmissivity(args.per_plate, args.parties)
        inputs.update(per_plate=args.per_plate, parties=args.parties)
    inputs["t"] = t
    try:
        report = eta_threshold(args.pc, t=t, mu=args.mu, s=args.s)
    except (DegenerateParameters, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    results = {
        "eta_min": report.eta_min,
        "eta_numeric_root": report.eta_numeric,
        "achievable": report.achievable,
        "bare_eta_min": rational(bare_eta_threshold(args.pc)),
        "t": t,
    }
    log.info("p_c=%s: need eta > %.6f (bare %s)", args.pc, report.eta_min, bare_eta_threshold(args.pc))
    row = {"pc": str(args.pc), "t": t, "mu": args.mu, "s": args.s,
           "eta_min": report.eta_min, "achievable": report.achievable}
    return inputs, results, [row]


def cmd_montecarlo(args) -> tuple[dict, dict, list[dict]]:
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    inputs: dict[str, Any] = {"kind": args.kind, "parties": args.parties,
                              "trials": args.trials, "seed": args.seed}
    if args.kind == CLASSICAL:
        try:
            chain = parse_chain(args.chain) if args.chain else reference_chain(args.parties)
        except ChainFormatError as exc:
            raise UsageError(str(exc)) from exc
        if chain.n_parties != args.parties:
            raise UsageError(f"chain is for {chain.n_parties} parties, not {args.parties}")
        inputs["chain"] = str(chain)
        analytic = evaluate_chain_dp(chain)
        est = run_experiment(CLASSICAL, args.parties, args.trials, args.seed, chain=chain, jobs=args.jobs)
        analytic_out, analytic_value = rational(analytic), float(analytic)
    else:
        params = NoiseParams(eta=args.eta, t=args.t, mu=args.mu, s=args.s)
        inputs.update(eta=args.eta, t=args.t, mu=args.mu, s=args.s)
        est = run_experiment(QUANTUM, args.parties, args.trials, args.seed, params=params, jobs=args.jobs)
        analytic_value = effective_success(params)
        analytic_out = analytic_value
    results = {
        "successes": est.successes,
        "trials": est.trials,
        "rate": rational(Fraction(est.successes, est.trials)),
        "ci_halfwidth_3sigma": est.ci_halfwidth,
        "analytic": analytic_out,
        "within_3sigma": est.covers(analytic_value),
    }
    log.info("%s N=%d: %.6f +/- %.6f (analytic %.6f)", args.kind, args.parties,
             est.point, est.ci_halfwidth, analytic_value)
    row = {"kind": args.kind, "parties": args.parties, "trials": est.trials,
           "rate": est.point, "ci_halfwidth": est.ci_halfwidth, "analytic": analytic_value}
    return inputs, results, [row]


def cmd_bounds(args) -> tuple[dict, dict, list[dict]]:
    table = combine_bounds(args.exact, args.lower)
    entries, rows = [], []
    for n, b in table.items():
        try:
            eta = eta_threshold(b.upper, t=args.t, mu=args.mu, s=args.s).eta_min
        except DegenerateParameters:
            eta = None
        entries.append({"n_parties": n, "status": "exact" if b.exact else "interval",
                        "lower": rational(b.lower), "upper": rational(b.upper),
                        "eta_min": eta})
        rows.append({"n_parties": n, "status": "exact" if b.exact else "interval",
                     "lower": str(b.lower), "upper": str(b.upper), "eta_min": eta})
        log.info("N=%d: %s", n, b.lower if b.exact else f"[{b.lower}, {b.upper}]")
    inputs = {
        "exact": {str(n): rational(v) for n, v in sorted(args.exact.items())},
        "lower": {str(n): rational(v) for n, v in sorted(args.lower.items())},
        "t": args.t, "mu": args.mu, "s": args.s,
    }
    return inputs, {"bounds": entries}, rows


COMMANDS = {
    "search": cmd_search,
    "eval": cmd_eval,
    "quantum-verify": cmd_quantum_verify,
    "threshold": cmd_threshold,
    "montecarlo": cmd_montecarlo,
    "bounds": cmd_bounds,
}


def _write_csv(path: Path, rows: list[dict]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)


def dispatch(argv: Sequence[str] | None = None, stdout=None) -> int:
    """Run one command; returns the process exit code."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(message)s",
        stream=sys.stderr,
        force=True,
    )
    start = time.perf_counter()
    try:
        inputs, results, rows = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"mod4sum {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"mod4sum {args.command}: refused: {exc} (pass --allow-large)", file=sys.stderr)
        return EXIT_RESOURCE
    except InconsistentBoundsError as exc:
        print(f"mod4sum {args.command}: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    report = {
        "command": args.command,
        "inputs": inputs,
        "results": results,
        "tool_version": __version__,
        "wall_time": round(time.perf_counter() - start, 6),
    }
    stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    if args.csv is not None:
        _write_csv(args.csv, rows)
    return EXIT_OK


def main() -> None:
    sys.exit(dispatch())
