"""Command-line entry point.

Exit codes: 0 success, 1 bad input data or arguments, 2 internal failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .citest import DegenerateInputError, InsufficientSampleError, Oracle
from .fdr import IntegrityError, by_alpha_star, prune_graph
from .graph import GraphError, MixedGraph, shd, true_cpdag
from .harness import (
    FULL_HIGHDIM,
    SUITES,
    VARIANTS,
    GraphFormatError,
    bench,
    read_graph,
    run_pipeline,
    write_graph,
)
from .simgen import make_rng, random_dag, random_sem, read_csv, sample, write_csv

EXIT_OK, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2

CONFIG_KEYS = {
    "alpha": float,
    "lmax": lambda v: None if v.lower() in ("none", "inf", "") else int(v),
    "variant": str,
    "fdr_q": float,
    "seed": int,
}


class DataError(Exception):
    """User-facing input problem; maps to exit code 1."""


def load_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise DataError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from None
    return out


def _settings(args) -> dict:
    cfg = {"alpha": 0.2, "lmax": 2, "variant": "pcp", "fdr_q": None, "seed": 0}
    if getattr(args, "config", None):
        cfg.update(load_config(args.config))
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = CONFIG_KEYS["lmax"](value) if key == "lmax" else value
    if cfg["variant"] not in VARIANTS:
        raise DataError(f"unknown variant {cfg['variant']!r}; choose from {', '.join(VARIANTS)}")
    if not 0 < cfg["alpha"] < 1:
        raise DataError("alpha must lie in (0, 1)")
    return cfg


def cmd_simulate(args) -> int:
    rng = make_rng(np.random.SeedSequence(args.seed))
    dag = random_dag(args.vertices, args.max_in, args.max_out, rng)
    sem = random_sem(dag, rng)
    data = sample(sem, args.samples, rng)
    names = [f"X{i}" for i in range(args.vertices)]
    write_csv(args.out, data, names)
    if args.truth:
        write_graph(args.truth, true_cpdag(dag), names)
    if args.dag:
        write_graph(args.dag, MixedGraph.from_dag(dag), names)
    print(f"wrote {args.samples} x {args.vertices} samples to {args.out}")
    return EXIT_OK


def _discover(args, cfg):
    try:
        names, data = read_csv(args.data)
    except (OSError, ValueError) as exc:
        raise DataError(str(exc)) from None
    truth = None
    if getattr(args, "truth", None):
        truth, _ = read_graph(args.truth, names)
    rep = run_pipeline(data, VARIANTS[cfg["variant"]], cfg["alpha"], cfg["lmax"], truth=truth,
                       q_report=cfg["fdr_q"] or 0.1)
    return names, rep


def cmd_discover(args) -> int:
    cfg = _settings(args)
    names, rep = _discover(args, cfg)
    graph = rep.graph
    info = {"variant": cfg["variant"], "alpha": cfg["alpha"], "lmax": cfg["lmax"],
            "edges": graph.edge_count(), "hypotheses": len(rep.hypotheses),
            "ci_tests": rep.ci_test_count}
    if cfg["fdr_q"] is not None:
        pvals = rep.hypotheses.p_values
        star = by_alpha_star(pvals, cfg["fdr_q"]) if len(pvals) else 0.0
        graph = prune_graph(graph, rep.hypotheses, star)
        info.update(fdr_q=cfg["fdr_q"], alpha_star=star, pruned_edges=graph.edge_count())
    write_graph(args.out, graph, names)
    if args.pvalues:
        with open(args.pvalues, "w") as fh:
            fh.write("identifier,p_value,edges\n")
            for h in rep.hypotheses:
                edges = ";".join(f"{names[a]}{m.value}{names[b]}" for (a, b), m in h.edges)
                fh.write(f"{h.identifier},{h.p_value:.17g},{edges}\n")
    print(json.dumps(info))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = _settings(args)
    names, rep = _discover(args, cfg)
    r = rep.fdr_report
    print(json.dumps({
        "variant": cfg["variant"], "uc": r.uc, "oc": r.oc, "ue": r.ue, "oe": r.oe,
        "alpha_star": r.alpha_star, "realized_fdr": r.realized_fdr, "shd": r.shd,
        "hypotheses": r.hypothesis_count,
    }))
    return EXIT_OK


def cmd_bench(args) -> int:
    suite = FULL_HIGHDIM if args.full and args.suite == "highdim" else SUITES[args.suite]
    n = args.replicates if args.replicates is not None else suite.replicates
    _, summary = bench(suite, n, args.out, base_seed=args.seed)
    for row in summary:
        print(" ".join(f"{k}={v:.5g}" if isinstance(v, float) else f"{k}={v}" for k, v in row.items()))
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    rng = make_rng(np.random.SeedSequence(args.seed))
    failures = 0
    for i in range(args.dags):
        p = int(rng.integers(2, args.max_vertices + 1))
        dag = random_dag(p, 2, 2, rng)
        rep = run_pipeline(Oracle(dag), VARIANTS[args.variant], alpha=0.5, l_max=None)
        if shd(rep.graph, true_cpdag(dag)) != 0:
            failures += 1
            print(f"mismatch on DAG {i}: {sorted(dag.edges)}")
    print(f"{args.dags - failures}/{args.dags} graphs recovered exactly")
    return EXIT_OK if failures == 0 else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pcp", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def pipeline_flags(p):
        p.add_argument("--config", help="flat key = value settings file")
        p.add_argument("--alpha", type=float)
        p.add_argument("--lmax", help="max conditioning set size, or 'none'")
        p.add_argument("--variant", choices=list(VARIANTS))
        p.add_argument("--fdr-q", dest="fdr_q", type=float)
        p.add_argument("--data", required=True, help="CSV with a header row")

    p = sub.add_parser("simulate", help="random DAG, linear Gaussian SEM, samples")
    p.add_argument("--vertices", type=int, default=20)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--max-in", type=int, default=2)
    p.add_argument("--max-out", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--truth", help="write the true CPDAG here")
    p.add_argument("--dag", help="write the generating DAG here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("discover", help="estimate a CPDAG with per-edge p-value bounds")
    pipeline_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--pvalues", help="write the hypothesis table as CSV")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("evaluate", help="discover, then score against a true CPDAG")
    pipeline_flags(p)
    p.add_argument("--truth", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="six-variant benchmark suite")
    p.add_argument("--suite", choices=list(SUITES), default="lowdim")
    p.add_argument("--replicates", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--full", action="store_true", help="300-variable high-dimensional suite")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle-check", help="exact recovery under a d-separation oracle")
    p.add_argument("--dags", type=int, default=200)
    p.add_argument("--max-vertices", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=list(VARIANTS), default="pcp")
    p.set_defaults(func=cmd_oracle_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DataError, GraphFormatError, DegenerateInputError, InsufficientSampleError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (IntegrityError, GraphError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
