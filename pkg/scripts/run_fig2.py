"""Mean transmit power against target rate at 10 dB channel strength.

    python3 scripts/run_fig2.py --trials 500

Each rate R maps to 2^R-PSK with SNR target 2^R - 1. Prints mean power per
scheme and the gap between the strict and relaxed bounds, and checks that
power does not decrease with rate.
"""

import argparse
import math
from pathlib import Path

from cogci.harness import run_sweep, spec_from_extras, write_csv
from cogci.scenario import load_config

HERE = Path(__file__).resolve().parent


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=HERE / "configs" / "fig2_rate.toml", type=Path)
    parser.add_argument("--out", default=Path("results") / "fig2.csv", type=Path)
    parser.add_argument("--trials", type=int)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--seed", type=int)
    args = parser.parse_args()

    config, extras = load_config(args.config)
    if args.seed is not None:
        config = config.replace(seed=args.seed)
    spec = spec_from_extras(config, extras, trials=args.trials)
    result = run_sweep(spec, workers=args.workers)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(result, args.out, spec)

    power = {(r.sweep_point, r.scheme): r.metrics.mean_power for r in result.rows}
    print(f"{'rate':>4} " + " ".join(f"{s:>22}" for s in spec.schemes))
    for p in spec.sweep_points:
        print(f"{p:>4.0f} " + " ".join(f"{power[(p, s)]:>22.6f}" for s in spec.schemes))
    if {"multicast_bound", "multicast_bound_strict"} <= set(spec.schemes):
        for p in spec.sweep_points:
            gap = power[(p, "multicast_bound_strict")] - power[(p, "multicast_bound")]
            print(f"rate {p:.0f}: strict minus relaxed bound = {gap:.6g}")
    monotone = all(
        not (power[(a, s)] > power[(b, s)]) or math.isnan(power[(a, s)])
        for s in spec.schemes for a, b in zip(spec.sweep_points, spec.sweep_points[1:]))
    print(f"mean power non-decreasing in rate for every scheme: {monotone}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
