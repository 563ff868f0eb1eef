"""Command line entry point: ``sweep``, ``solve-one`` and ``selftest``."""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .baselines import solve_ccizf, solve_multicast_bound
from .ci_precoder import precode, solve_ccipm_strict
from .constellation import SymbolVector
from .evaluation import audit_solution
from .harness import SCHEMES, run_sweep, sidecar_path, spec_from_extras, write_csv
from .scenario import generate_channels, load_config


def _jsonable(value):
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return [[float(v.real), float(v.imag)] for v in value.ravel()]
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, (np.integer, np.bool_)):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def cmd_sweep(args) -> int:
    config, extras = load_config(args.config)
    if args.seed is not None:
        config = config.replace(seed=args.seed)
    schemes = args.schemes.split(",") if args.schemes else None
    spec = spec_from_extras(config, extras, trials=args.trials, schemes=schemes)
    result = run_sweep(spec, workers=args.workers)
    try:
        write_csv(result, args.out, spec)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {len(result.rows)} rows to {args.out} (config: {sidecar_path(args.out)})")
    empty = result.empty_points()
    if empty:
        print(f"error: no feasible trial for any scheme at sweep points {empty}", file=sys.stderr)
        return 1
    return 0


def cmd_solve_one(args) -> int:
    config, _ = load_config(args.config)
    if args.seed is not None:
        config = config.replace(seed=args.seed)
    indices = tuple(int(s) for s in args.symbols.split(","))
    if len(indices) != config.num_users:
        print(f"error: expected {config.num_users} symbol indices, got {len(indices)}", file=sys.stderr)
        return 2
    symbols = SymbolVector(indices, config.modulation_order, 0, config.primary_order)
    channels = generate_channels(config, args.trial)
    strict = config.replace(interference_limit=0.0)
    if args.scheme == "ccipm":
        cfg, sol = config, precode(channels, symbols, config)
    elif args.scheme == "ccipm_strict":
        cfg, sol = strict, solve_ccipm_strict(channels, symbols, strict)
    elif args.scheme == "ccizf_standin":
        cfg, sol = strict, solve_ccizf(channels, symbols, strict)
    else:
        cfg = strict if args.scheme.endswith("strict") else config
        bound = solve_multicast_bound(channels, cfg)
        print(json.dumps({"scheme": args.scheme, "status": bound.status.value,
                          "power": _jsonable(bound.power), "rank": bound.rank,
                          "kkt_residual": _jsonable(bound.kkt_residual),
                          "Q": _jsonable(bound.Q)}, indent=2))
        return 0 if bound.ok else 1

    audit = audit_solution(channels, sol.x, symbols, cfg)
    report = {
        "scheme": sol.scheme,
        "status": sol.status.value,
        "x": _jsonable(sol.x),
        "power": _jsonable(sol.power),
        "lambda": _jsonable(sol.lam),
        "mu": _jsonable(sol.mu),
        "alpha": _jsonable(sol.alpha),
        "interference": _jsonable(sol.interference),
        "iterations": sol.iterations,
        "audit": {
            "passed": audit.passed,
            "phase_error": _jsonable(audit.phase_error),
            "snr": _jsonable(audit.snr),
            "snr_margin": _jsonable(audit.snr_margin),
            "interference": _jsonable(audit.interference),
            "interference_limit": _jsonable(audit.interference_limit),
        },
    }
    print(json.dumps(report, indent=2))
    return 0 if sol.ok else 1


def cmd_selftest(args) -> int:
    from .checks import run_all

    results = run_all(quick=not args.full)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cogci", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a Monte-Carlo sweep and write a CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--schemes", help=f"comma-separated subset of {','.join(SCHEMES)}")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("solve-one", help="solve a single slot and print the solution with its audit")
    p.add_argument("--config", required=True)
    p.add_argument("--symbols", required=True, help="comma-separated alphabet indices, one per user")
    p.add_argument("--trial", type=int, default=0, help="channel realization index")
    p.add_argument("--seed", type=int)
    p.add_argument("--scheme", default="ccipm", choices=SCHEMES)
    p.set_defaults(func=cmd_solve_one)

    p = sub.add_parser("selftest", help="run the invariant checks")
    p.add_argument("--full", action="store_true", help="use acceptance-size samples")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
