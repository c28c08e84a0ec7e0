#!/usr/bin/env python3
"""Six-variant comparison on 20-variable graphs with n = 10000.

Writes metrics.csv, summary.csv, timing.csv and config.txt to --out and
prints the per-variant means.
"""

import argparse

from pcp.harness import SUITES, bench


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/lowdim")
    ap.add_argument("--replicates", type=int, default=SUITES["lowdim"].replicates)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, help="process count; PCP_THREADS otherwise")
    args = ap.parse_args()

    _, summary = bench("lowdim", args.replicates, args.out, base_seed=args.seed, workers=args.workers)
    print(f"{'variant':<20}{'uc':>9}{'oc':>9}{'ue':>9}{'oe':>9}{'fdr@q':>9}{'shd':>8}")
    for row in summary:
        print(f"{row['variant']:<20}{row['uc']:9.4f}{row['oc']:9.4f}{row['ue']:9.4f}"
              f"{row['oe']:9.4f}{row['realized_fdr_at_q']:9.4f}{row['shd']:8.2f}")


if __name__ == "__main__":
    main()
