"""Fit the envelope constant C, then test G(2000, 0.5) realizations against 2C.

    python3 scripts/calibrate_envelope.py --check-seeds 10
"""

import argparse

import numpy as np

from erhitting import graph as gr
from erhitting import markov, theory


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000, help="calibration size")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--quantile", type=float, default=0.99)
    ap.add_argument("--check-n", type=int, default=2000)
    ap.add_argument("--check-seeds", type=int, default=10)
    args = ap.parse_args()

    cal = theory.calibrate_envelope(n=args.n, seeds=range(args.seeds), quantile=args.quantile)
    s = np.asarray(cal.samples)
    print(f"C = {cal.constant:.4f} ({args.quantile:.0%} quantile of {s.size} samples, "
          f"median {np.median(s):.4f}, skipped {cal.skipped})")

    n = args.check_n
    scale = theory.envelope_scale(n)
    for seed in range(args.check_seeds):
        g = gr.generate_er(n, 0.5, 500 + seed)
        err = theory.max_prediction_error(g, markov.exact_hitting(g, 0))
        flag = "ok" if err / scale <= 2 * cal.constant else "EXCEEDS 2C"
        print(f"seed {500 + seed}: max error {err:.4f} steps, normalized {err / scale:.4f}  {flag}")


if __name__ == "__main__":
    main()
