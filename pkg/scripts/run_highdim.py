#!/usr/bin/env python3
"""High-dimensional suite: 100 variables by default, 300 with --full.

Only n = 1000 samples per dataset, so most CI tests run far from the
asymptotic regime the BY bound assumes.
"""

import argparse
import dataclasses

from pcp.harness import FULL_HIGHDIM, SUITES, bench


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/highdim")
    ap.add_argument("--full", action="store_true", help="30 graphs with 300 variables")
    ap.add_argument("--vertices", type=int, help="override the variable count")
    ap.add_argument("--replicates", type=int)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int)
    args = ap.parse_args()

    suite = FULL_HIGHDIM if args.full else SUITES["highdim"]
    if args.vertices:
        suite = dataclasses.replace(suite, name=f"highdim_{args.vertices}", vertices=args.vertices)
    n = args.replicates if args.replicates is not None else suite.replicates
    _, summary = bench(suite, n, args.out, base_seed=args.seed, workers=args.workers)
    for row in summary:
        print(f"{row['variant']:<20} uc={row['uc']:.4f} oc={row['oc']:.4f} "
              f"ue={row['ue']:.4f} oe={row['oe']:.4f} shd={row['shd']:.1f}")


if __name__ == "__main__":
    main()
