"""Standardized H_12 over independent realizations of G(n, p), compared with N(0, 1).

    python3 scripts/clt.py --n 500 --p 0.5 --m 500
"""

import argparse

import numpy as np
import scipy.stats

from erhitting.experiments import ExperimentConfig, cmd_clt


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--p", type=float, default=0.5)
    ap.add_argument("--m", type=int, default=500)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out")
    args = ap.parse_args()

    res = cmd_clt(ExperimentConfig(command="clt", n=args.n, p=args.p, m=args.m, seeds=[args.seed],
                                   threads=args.threads))
    meta = res.metadata
    z = np.array([r["statistic"] for r in res.rows])
    print(f"samples {meta['samples']}  mean {meta['mean']:.4f}  variance {meta['variance']:.4f}")
    print(f"KS distance {meta['ks_distance']:.4f}  p-value {meta['ks_pvalue']:.3f}")
    print("quantile   empirical   normal")
    for q in (0.05, 0.25, 0.5, 0.75, 0.95):
        print(f"{q:8.2f} {np.quantile(z, q):11.3f} {scipy.stats.norm.ppf(q):8.3f}")
    if args.out:
        res.write(args.out, "csv")


if __name__ == "__main__":
    main()
