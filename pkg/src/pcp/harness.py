"""End-to-end pipeline, the six-variant ablation matrix, benchmarks and graph I/O."""

from __future__ import annotations

import csv
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .bounds import BoundPolicy
from .citest import CiTester, DatasetStats, FisherZ, Oracle
from .fdr import (
    DEFAULT_ALPHA_GRID,
    DEFAULT_Q_GRID,
    FdrReport,
    HypothesisSet,
    collect_hypotheses,
    evaluate,
)
from .graph import EdgeMark, MixedGraph, true_cpdag
from .meek import apply_orientation_rules
from .simgen import make_rng, random_dag, random_sem, sample
from .skeleton import PValueLedger, SkeletonConfig, discover_skeleton
from .vstruct import orient_v_structures

THREADS_ENV = "PCP_THREADS"


@dataclass(frozen=True)
class VariantConfig:
    stable: bool = True
    ambiguation: bool = True
    policy: BoundPolicy = BoundPolicy.ROBUST
    legacy_pc: bool = False

    def __post_init__(self):
        if self.legacy_pc and (self.stable or self.ambiguation):
            raise ValueError("the legacy baseline runs without stabilization and ambiguation")


VARIANTS: dict[str, VariantConfig] = {
    "pcp": VariantConfig(),
    "no_robust": VariantConfig(policy=BoundPolicy.NON_ROBUST),
    "no_stable": VariantConfig(stable=False),
    "no_ambig": VariantConfig(ambiguation=False),
    "no_stable_no_ambig": VariantConfig(stable=False, ambiguation=False),
    "pc": VariantConfig(stable=False, ambiguation=False, legacy_pc=True),
}


@dataclass
class RunReport:
    variant: VariantConfig
    graph: MixedGraph
    ledger: PValueLedger
    hypotheses: HypothesisSet
    fdr_report: FdrReport | None
    wall_time: float
    ci_test_count: int
    skeleton: MixedGraph | None = None
    skeleton_ledger: PValueLedger | None = None
    vstruct_graph: MixedGraph | None = None
    vstruct_ledger: PValueLedger | None = None


def as_tester(source) -> tuple[CiTester, int]:
    """Accept raw data, ``DatasetStats`` or a ready tester; return it with the vertex count."""
    if isinstance(source, np.ndarray):
        t = FisherZ.from_data(source)
        return t, t.stats.variable_count
    if isinstance(source, DatasetStats):
        return FisherZ(source), source.variable_count
    if isinstance(source, FisherZ):
        return source, source.stats.variable_count
    if isinstance(source, Oracle):
        return source, source.dag.vertex_count
    d = getattr(source, "vertex_count", None)
    if d is None:
        fallback = getattr(source, "fallback", None)
        if fallback is not None:
            return source, as_tester(fallback)[1]
        raise TypeError(f"cannot infer vertex count from {type(source).__name__}")
    return source, d


def run_pipeline(
    source,
    variant: VariantConfig = VARIANTS["pcp"],
    alpha: float = 0.2,
    l_max: int | None = 2,
    q_grid: Sequence[float] = DEFAULT_Q_GRID,
    alpha_grid: Sequence[float] = DEFAULT_ALPHA_GRID,
    truth: MixedGraph | None = None,
    order: Sequence[int] | None = None,
    q_report: float = 0.1,
) -> RunReport:
    """Skeleton, colliders, orientation rules, then hypotheses and (given ``truth``) metrics."""
    tester, d = as_tester(source)
    start = time.perf_counter()
    calls0 = tester.calls
    cfg = SkeletonConfig(alpha=alpha, l_max=l_max, stable=variant.stable,
                         order=tuple(order) if order is not None else None)
    skel, led0 = discover_skeleton(tester, cfg, d)
    g1, led1 = orient_v_structures(
        skel, led0, tester, alpha, l_max, variant.policy,
        ambiguation=variant.ambiguation, legacy=variant.legacy_pc,
    )
    g2, led2 = apply_orientation_rules(
        g1, led1, variant.policy, ambiguation=variant.ambiguation, legacy=variant.legacy_pc
    )
    hyps = collect_hypotheses(g2, led2)
    report = None
    if truth is not None:
        report = evaluate(g2, hyps, truth, q_grid, alpha_grid, q_report=q_report)
    return RunReport(
        variant=variant,
        graph=g2,
        ledger=led2,
        hypotheses=hyps,
        fdr_report=report,
        wall_time=time.perf_counter() - start,
        ci_test_count=tester.calls - calls0,
        skeleton=skel,
        skeleton_ledger=led0,
        vstruct_graph=g1,
        vstruct_ledger=led1,
    )


# ---------------------------------------------------------------- benchmarks


@dataclass(frozen=True)
class SuiteConfig:
    name: str
    replicates: int
    vertices: int
    samples: int
    alpha: float = 0.2
    l_max: int | None = 2
    max_in: int = 2
    max_out: int = 2


SUITES = {
    "lowdim": SuiteConfig("lowdim", replicates=30, vertices=20, samples=10000),
    "highdim": SuiteConfig("highdim", replicates=10, vertices=100, samples=1000),
}
FULL_HIGHDIM = SuiteConfig("highdim_full", replicates=30, vertices=300, samples=1000)

METRIC_FIELDS = [
    "suite", "replicate", "seed", "variant", "uc", "oc", "ue", "oe",
    "realized_fdr_at_q", "alpha_star_at_q", "fdr_curve_mean",
    "fdr_at_0.01", "fdr_at_0.05", "fdr_at_0.1", "shd", "hypotheses", "ci_tests",
]
SUMMARY_FIELDS = ["suite", "variant", "replicates", "uc", "oc", "ue", "oe",
                  "realized_fdr_at_q", "shd"]


def replicate_data(suite: SuiteConfig, seed: int, replicate: int):
    """Ground-truth DAG and dataset for one replicate; seeds derive from ``(seed, replicate)``."""
    ss = np.random.SeedSequence([seed, replicate])
    g_seed, w_seed, x_seed = ss.spawn(3)
    dag = random_dag(suite.vertices, suite.max_in, suite.max_out, make_rng(g_seed))
    sem = random_sem(dag, make_rng(w_seed))
    data = sample(sem, suite.samples, make_rng(x_seed))
    return dag, data


def _fdr_at(report: FdrReport, alpha: float) -> float:
    grid = np.asarray(report.alpha_grid)
    return report.realized[int(np.argmin(np.abs(grid - alpha)))]


def run_replicate(suite: SuiteConfig, seed: int, replicate: int,
                  variants: Sequence[str] = tuple(VARIANTS)) -> tuple[list[dict], dict[str, RunReport]]:
    """All variants on one dataset, sharing one memoised tester."""
    dag, data = replicate_data(suite, seed, replicate)
    truth = true_cpdag(dag)
    tester = FisherZ.from_data(data)
    rows, reports = [], {}
    for name in variants:
        rep = run_pipeline(tester, VARIANTS[name], suite.alpha, suite.l_max, truth=truth)
        r = rep.fdr_report
        rows.append({
            "suite": suite.name, "replicate": replicate, "seed": seed, "variant": name,
            "uc": r.uc, "oc": r.oc, "ue": r.ue, "oe": r.oe,
            "realized_fdr_at_q": r.realized_fdr, "alpha_star_at_q": r.alpha_star,
            "fdr_curve_mean": float(np.mean(r.realized)),
            "fdr_at_0.01": _fdr_at(r, 0.01), "fdr_at_0.05": _fdr_at(r, 0.05),
            "fdr_at_0.1": _fdr_at(r, 0.1),
            "shd": r.shd, "hypotheses": r.hypothesis_count, "ci_tests": rep.ci_test_count,
        })
        reports[name] = rep
    return rows, reports


def _rows_only(args):
    suite, seed, replicate = args
    t0 = time.perf_counter()
    rows, _ = run_replicate(suite, seed, replicate)
    return rows, time.perf_counter() - t0


def thread_count(default: int = 1) -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return default
    n = int(raw)
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer")
    return n


def summarize(rows: list[dict]) -> list[dict]:
    out = []
    variants = list(dict.fromkeys(r["variant"] for r in rows))
    for name in variants:
        sel = [r for r in rows if r["variant"] == name]
        entry = {"suite": sel[0]["suite"], "variant": name, "replicates": len(sel)}
        for k in SUMMARY_FIELDS[3:]:
            entry[k] = float(np.mean([r[k] for r in sel]))
        out.append(entry)
    return out


def _fmt(v):
    return "%.17g" % v if isinstance(v, float) else str(v)


def _write_rows(path: Path, fields: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fields)
        for r in rows:
            w.writerow([_fmt(r[k]) for k in fields])


def bench(suite: str | SuiteConfig, seeds: int | Sequence[int], out_dir, base_seed: int = 0,
          replicates: int | None = None, workers: int | None = None) -> tuple[list[dict], list[dict]]:
    """Run every variant on each replicate and write metrics, summary and timing CSVs.

    ``seeds`` is a replicate count (replicates ``0..seeds-1`` under ``base_seed``)
    or an explicit list of replicate indices. ``metrics.csv`` and
    ``summary.csv`` depend only on the inputs; wall-clock times go to
    ``timing.csv`` so reruns leave the other two byte-identical.
    """
    cfg = SUITES[suite] if isinstance(suite, str) else suite
    if replicates is not None:
        cfg = replace(cfg, replicates=replicates)
    reps = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    workers = thread_count() if workers is None else workers

    jobs = [(cfg, base_seed, r) for r in reps]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_rows_only, jobs))
    else:
        results = [_rows_only(j) for j in jobs]

    rows = [row for rs, _ in results for row in rs]
    summary = summarize(rows)
    _write_rows(out / "metrics.csv", METRIC_FIELDS, rows)
    _write_rows(out / "summary.csv", SUMMARY_FIELDS, summary)
    timing = [{"replicate": r, "seconds": t} for r, (_, t) in zip(reps, results)]
    _write_rows(out / "timing.csv", ["replicate", "seconds"], timing)
    with open(out / "config.txt", "w") as fh:
        for k, v in asdict(cfg).items():
            fh.write(f"{k}={v}\n")
        fh.write(f"base_seed={base_seed}\n")
    return rows, summary


# ---------------------------------------------------------------- graph I/O

_MARKS = {m.value: m for m in (EdgeMark.UNDIRECTED, EdgeMark.FORWARD,
                               EdgeMark.BACKWARD, EdgeMark.BIDIRECTED)}


class GraphFormatError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def format_graph(graph: MixedGraph, names: Sequence[str] | None = None) -> str:
    """Edge-list text: a ``# vertices:`` header, then one sorted ``A MARK B [ambiguous]`` per edge."""
    names = list(names) if names is not None else [f"X{i}" for i in range(graph.vertex_count)]
    if len(names) != graph.vertex_count:
        raise ValueError("one name per vertex required")
    lines = []
    for a, b, mark in graph.edges():
        line = f"{names[a]} {mark.value} {names[b]}"
        if graph.is_ambiguous(a, b):
            line += " ambiguous"
        lines.append(line)
    return "\n".join(["# vertices: " + " ".join(names), *sorted(lines)]) + "\n"


def parse_graph(text: str, names: Sequence[str] | None = None) -> tuple[MixedGraph, list[str]]:
    """Inverse of ``format_graph``. Without a header or ``names``, vertices appear in first-use order."""
    rows = []
    header = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("vertices:"):
                header = body[len("vertices:"):].split()
            continue
        parts = line.split()
        if len(parts) not in (3, 4):
            raise GraphFormatError(lineno, f"expected 'A MARK B [ambiguous]', got {raw!r}")
        if parts[1] not in _MARKS:
            raise GraphFormatError(lineno, f"unknown edge mark {parts[1]!r}")
        if len(parts) == 4 and parts[3] != "ambiguous":
            raise GraphFormatError(lineno, f"unknown flag {parts[3]!r}")
        if parts[0] == parts[2]:
            raise GraphFormatError(lineno, "self loop")
        rows.append((lineno, parts[0], _MARKS[parts[1]], parts[2], len(parts) == 4))

    vertex_names = list(names) if names is not None else header
    if vertex_names is None:
        vertex_names = []
        for _, a, _, b, _ in rows:
            for v in (a, b):
                if v not in vertex_names:
                    vertex_names.append(v)
    index = {v: i for i, v in enumerate(vertex_names)}
    g = MixedGraph(max(len(vertex_names), 1))
    for lineno, a, mark, b, amb in rows:
        if a not in index or b not in index:
            raise GraphFormatError(lineno, f"unknown vertex in {a} {mark.value} {b}")
        i, j = index[a], index[b]
        if g.adjacent(i, j):
            raise GraphFormatError(lineno, f"duplicate edge {a} {b}")
        g.set_mark(i, j, mark)
        if amb:
            if mark is not EdgeMark.UNDIRECTED:
                raise GraphFormatError(lineno, "only undirected edges can be ambiguous")
            g.ambiguous.add((min(i, j), max(i, j)))
    return g, vertex_names


def write_graph(path, graph: MixedGraph, names: Sequence[str] | None = None) -> None:
    Path(path).write_text(format_graph(graph, names))


def read_graph(path, names: Sequence[str] | None = None) -> tuple[MixedGraph, list[str]]:
    return parse_graph(Path(path).read_text(), names)
