"""False discovery rate estimation, threshold selection, pruning and evaluation.

Hypotheses are the distinct tests behind the final graph: one per undirected
edge, one per directed edge, and one per collider test that oriented two
edges under a shared identifier. The estimator is the Benjamini-Yekutieli
one, valid under arbitrary dependence between p-values.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph import EdgeMark, GraphError, MixedGraph, shd
from .skeleton import PValueLedger

DEFAULT_Q_GRID = tuple(np.linspace(0.001, 0.1, 100).tolist())
DEFAULT_ALPHA_GRID = tuple(np.linspace(1e-10, 0.1, 100).tolist())


class IntegrityError(RuntimeError):
    """Graph and hypothesis bookkeeping disagree."""


@dataclass(frozen=True)
class Hypothesis:
    identifier: int
    p_value: float
    # ((a, b), mark) with the mark read from a towards b
    edges: tuple[tuple[tuple[int, int], EdgeMark], ...]


@dataclass
class HypothesisSet:
    entries: list[Hypothesis] = field(default_factory=list)

    def __post_init__(self):
        ids = [h.identifier for h in self.entries]
        if len(set(ids)) != len(ids):
            raise IntegrityError("hypothesis identifiers must be unique")
        for h in self.entries:
            if not 0.0 <= h.p_value <= 1.0:
                raise IntegrityError(f"p-value {h.p_value} outside [0, 1]")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def p_values(self) -> np.ndarray:
        return np.array([h.p_value for h in self.entries], dtype=float)

    def by_identifier(self) -> dict[int, Hypothesis]:
        return {h.identifier: h for h in self.entries}


def collect_hypotheses(graph: MixedGraph, ledger: PValueLedger) -> HypothesisSet:
    """Group the final graph's edges by the test that asserted them.

    A group's p-value is the largest p-value among its edges; members of a
    shared collider test carry the same bound by construction.
    """
    groups: dict[int, list] = defaultdict(list)
    pvals: dict[int, float] = {}
    for a, b, mark in graph.edges():
        if mark is EdgeMark.UNDIRECTED:
            key, p, asserted = (a, b), ledger.p1.get((a, b)), ((a, b), EdgeMark.UNDIRECTED)
        elif mark is EdgeMark.FORWARD:
            key, p, asserted = (a, b), ledger.p2.get((a, b)), ((a, b), EdgeMark.FORWARD)
        elif mark is EdgeMark.BACKWARD:
            key, p, asserted = (b, a), ledger.p2.get((b, a)), ((b, a), EdgeMark.FORWARD)
        else:
            raise IntegrityError(f"unexpected mark {mark.value} on {(a, b)}")
        token = ledger.identifiers.get(key)
        if token is None or p is None:
            raise IntegrityError(f"edge {(a, b)} has no hypothesis")
        groups[token].append(asserted)
        pvals[token] = max(pvals.get(token, 0.0), p)
    return HypothesisSet(
        [Hypothesis(t, pvals[t], tuple(groups[t])) for t in sorted(groups)]
    )


def harmonic(m: int) -> float:
    """Exactly rounded sum of 1/i for i = 1..m."""
    return math.fsum(1.0 / i for i in range(1, m + 1))


def by_estimate(pvals: Sequence[float], alpha: float) -> float:
    """Estimated FDR when rejecting every p-value at or below ``alpha``. Not clamped."""
    p = np.asarray(pvals, dtype=float)
    m = p.size
    if m == 0:
        raise ValueError("need at least one p-value")
    r = int(np.count_nonzero(p <= alpha))
    return m * alpha * harmonic(m) / max(r, 1)


def by_alpha_star(pvals: Sequence[float], q: float) -> float:
    """Largest threshold whose estimated FDR is at most ``q``; 0 when none qualifies.

    Closed form: with sorted p-values and k* the largest k such that
    ``p_(k) <= q k / (m C(m))``, the threshold is ``q k* / (m C(m))``. The
    returned float is nudged down if rounding would push the estimate over
    ``q``; it still admits exactly k* p-values.
    """
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    p = np.sort(np.asarray(pvals, dtype=float))
    m = p.size
    if m == 0:
        raise ValueError("need at least one p-value")
    scale = m * harmonic(m)
    ks = np.arange(1, m + 1)
    feasible = np.flatnonzero(p <= q * ks / scale)
    if feasible.size == 0:
        return 0.0
    k = int(feasible[-1]) + 1
    alpha = q * k / scale
    while alpha > 0 and by_estimate(p, alpha) > q:
        alpha = math.nextafter(alpha, 0.0)
    return alpha


def prune_graph(graph: MixedGraph, hypotheses: HypothesisSet, alpha_star: float) -> MixedGraph:
    """Drop every edge asserted by a hypothesis whose p-value exceeds ``alpha_star``."""
    covered = set()
    out = graph.copy()
    for h in hypotheses:
        for (a, b), _ in h.edges:
            covered.add((min(a, b), max(a, b)))
            if h.p_value > alpha_star:
                out.remove_edge(a, b)
    missing = graph.adjacency_pairs() - covered
    if missing:
        raise IntegrityError(f"edges without a hypothesis: {sorted(missing)}")
    return out


def hypothesis_correct(h: Hypothesis, truth: MixedGraph) -> bool:
    """Undirected claims need adjacency in ``truth``; directed claims need that exact direction."""
    for (a, b), mark in h.edges:
        if mark is EdgeMark.UNDIRECTED:
            if not truth.adjacent(a, b):
                return False
        elif not truth.is_directed(a, b):
            return False
    return True


def realized_fdr(pvals: np.ndarray, false_mask: np.ndarray, alpha: float) -> float:
    rejected = pvals <= alpha
    r = int(np.count_nonzero(rejected))
    v = int(np.count_nonzero(rejected & false_mask))
    return v / max(r, 1)


@dataclass
class FdrReport:
    alpha_grid: list[float]
    estimates: list[float]
    realized: list[float]
    q_grid: list[float]
    alpha_stars: list[float]
    realized_at_star: list[float]
    alpha_star: float
    pruned_graph: MixedGraph
    realized_fdr: float
    uc: float
    oc: float
    ue: float
    oe: float
    shd: int
    hypothesis_count: int


def evaluate(
    graph: MixedGraph,
    hypotheses: HypothesisSet,
    truth: MixedGraph,
    q_grid: Sequence[float] = DEFAULT_Q_GRID,
    alpha_grid: Sequence[float] = DEFAULT_ALPHA_GRID,
    q_report: float = 0.1,
) -> FdrReport:
    """Control and estimation bias of the BY estimate against the realized FDR.

    ``q_report`` picks the level used for the reported pruned graph and its
    realized FDR. With no hypotheses at all every rate is 0.
    """
    if graph.vertex_count != truth.vertex_count:
        raise GraphError("estimated and true graphs have different vertex counts")
    p = hypotheses.p_values
    false_mask = np.array([not hypothesis_correct(h, truth) for h in hypotheses], dtype=bool)
    m = p.size

    estimates, realized = [], []
    for a in alpha_grid:
        estimates.append(by_estimate(p, a) if m else 0.0)
        realized.append(realized_fdr(p, false_mask, a))
    stars, at_star = [], []
    for q in q_grid:
        star = by_alpha_star(p, q) if m else 0.0
        stars.append(star)
        at_star.append(realized_fdr(p, false_mask, star))

    uc = [max(f - q, 0.0) for f, q in zip(at_star, q_grid)]
    oc = [max(q - f, 0.0) for f, q in zip(at_star, q_grid)]
    ue = [max(f - e, 0.0) for f, e in zip(realized, estimates)]
    oe = [max(e - f, 0.0) for f, e in zip(realized, estimates)]

    star = by_alpha_star(p, q_report) if m else 0.0
    return FdrReport(
        alpha_grid=list(alpha_grid),
        estimates=estimates,
        realized=realized,
        q_grid=list(q_grid),
        alpha_stars=stars,
        realized_at_star=at_star,
        alpha_star=star,
        pruned_graph=prune_graph(graph, hypotheses, star),
        realized_fdr=realized_fdr(p, false_mask, star),
        uc=float(np.mean(uc)) if uc else 0.0,
        oc=float(np.mean(oc)) if oc else 0.0,
        ue=float(np.mean(ue)) if ue else 0.0,
        oe=float(np.mean(oe)) if oe else 0.0,
        shd=shd(graph, truth),
        hypothesis_count=m,
    )
