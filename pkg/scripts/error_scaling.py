"""Median max prediction error across a grid of n, with its log-log slope.

    python3 scripts/error_scaling.py --grid 250 500 1000 2000 --seeds 20
"""

import argparse

from erhitting.experiments import ExperimentConfig, cmd_scan
from erhitting.theory import envelope_scale


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, nargs="+", default=[250, 500, 1000, 2000])
    ap.add_argument("--p", type=float, default=0.5)
    ap.add_argument("--seeds", type=int, default=20, help="seeds 0..seeds-1 per size")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", help="also write the per-realization rows as CSV")
    args = ap.parse_args()

    res = cmd_scan(ExperimentConfig(command="scan", p=args.p, grid=args.grid,
                                    seeds=list(range(args.seeds)), threads=args.threads))
    print(f"{'n':>6} {'median max error':>18} {'/ envelope':>12}")
    for n, m in res.metadata["median_max_error"].items():
        print(f"{n:>6} {m:18.4f} {m / envelope_scale(int(n)):12.4f}")
    slope = res.metadata["slope"]
    print("log-log slope:", "n/a" if slope is None else f"{slope:.3f}")
    if res.metadata["skipped_disconnected"]:
        print("skipped disconnected realizations:", res.metadata["skipped_disconnected"])
    if args.out:
        res.write(args.out, "csv")


if __name__ == "__main__":
    main()
