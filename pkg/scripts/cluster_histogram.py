"""Hitting times to one target on G(n, p), binned next to the two predicted locations.

    python3 scripts/cluster_histogram.py --n 4000 --p 0.2 --seed 1 --out hist_p02.csv
"""

import argparse

import numpy as np

from erhitting.experiments import ExperimentConfig, cmd_hist


def text_histogram(values, bins=30, width=50):
    counts, edges = np.histogram(values, bins=bins)
    top = counts.max()
    lines = []
    for c, lo, hi in zip(counts, edges, edges[1:]):
        lines.append(f"{lo:10.3f} .. {hi:10.3f} | {'#' * round(width * c / top)} {c}")
    return "\n".join(lines)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4000)
    ap.add_argument("--p", type=float, default=0.2)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--target", type=int, default=0)
    ap.add_argument("--out", help="also write the per-vertex rows as CSV")
    args = ap.parse_args()

    res = cmd_hist(ExperimentConfig(command="hist", n=args.n, p=args.p, seeds=[args.seed], target=args.target))
    meta = res.metadata
    print(text_histogram([r["H"] for r in res.rows]))
    print(f"predicted adjacent     {meta['predicted_adjacent']:.3f}")
    print(f"predicted non-adjacent {meta['predicted_nonadjacent']:.3f}")
    print(f"cluster means          {meta['cluster_mean_adjacent']:.3f}, {meta['cluster_mean_nonadjacent']:.3f}")
    print(f"separation             {meta['cluster_separation']:.4f} (1/p = {1 / args.p:.4f})")
    print(f"max |H - prediction|   {meta['max_error']:.4f}")
    if args.out:
        res.write(args.out, "csv")


if __name__ == "__main__":
    main()
