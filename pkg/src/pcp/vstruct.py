"""Unshielded collider orientation with p-value bounds and conflict ambiguation."""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass

from .bounds import BoundPolicy, outer
from .citest import CiTester
from .graph import MixedGraph
from .skeleton import PValueLedger


@dataclass(frozen=True)
class VStructRecord:
    a: int
    b: int
    c: int
    gamma_p: float


def gamma_schedule(graph: MixedGraph, a: int, b: int, c: int, l_max: int | None) -> list[tuple[int, ...]]:
    """Conditioning sets for the collider test on ``a - c - b``.

    Every subset of ``N(a) \\ {b}`` and of ``N(b) \\ {a}`` that contains ``c``,
    of size at most ``l_max``, each listed once, by size then lexicographically.
    """
    sets: set[tuple[int, ...]] = set()
    for x, y in ((a, b), (b, a)):
        rest = sorted(graph.neighbors(x) - {y, c})
        top = len(rest) if l_max is None else min(len(rest), l_max - 1)
        for k in range(top + 1):
            for extra in itertools.combinations(rest, k):
                sets.add(tuple(sorted((c, *extra))))
    return sorted(sets, key=lambda s: (len(s), s))


def gamma_pvalue(
    tester: CiTester, graph: MixedGraph, a: int, b: int, c: int, l_max: int | None
) -> float:
    """Max p-value of ``a _|_ b | S`` over the collider-test schedule.

    Every p-value counts, significant or not. An empty schedule (``l_max`` of 0)
    contributes nothing and yields 0.
    """
    if graph.adjacent(a, b):
        raise ValueError(f"{a} and {b} are adjacent")
    if not (graph.adjacent(a, c) and graph.adjacent(b, c)):
        raise ValueError(f"{c} is not a common neighbour of {a} and {b}")
    best = 0.0
    for s in gamma_schedule(graph, a, b, c, l_max):
        best = max(best, tester.test(a, b, s).p_value)
    return best


def candidate_v_structures(graph: MixedGraph, ledger: PValueLedger) -> list[tuple[int, int, int]]:
    """Triples ``(a, b, c)``, ``a < b`` non-adjacent, ``c`` a common neighbour in no sepset."""
    out = []
    d = graph.vertex_count
    for a, b in itertools.combinations(range(d), 2):
        if graph.adjacent(a, b):
            continue
        common = graph.neighbors(a) & graph.neighbors(b)
        if not common:
            continue
        seps = ledger.sepsets_of(a, b)
        for c in sorted(common):
            if not any(c in s for s in seps):
                out.append((a, b, c))
    return out


def orient_v_structures(
    graph: MixedGraph,
    ledger: PValueLedger,
    tester: CiTester,
    alpha: float,
    l_max: int | None,
    policy: BoundPolicy = BoundPolicy.ROBUST,
    ambiguation: bool = True,
    legacy: bool = False,
) -> tuple[MixedGraph, PValueLedger]:
    """Orient unshielded colliders and assign ``p2`` bounds and identifiers.

    With ``ambiguation`` arrowheads accumulate, and every bidirected edge is
    afterwards unoriented together with all other edges pointing into its
    endpoints; those edges are flagged ambiguous. Without it each collider
    overwrites earlier marks, so the last triple processed wins. ``legacy``
    additionally bounds each edge by the single collider that last wrote it
    instead of summing over every collider explaining that direction.

    ``alpha`` is unused by the collider tests themselves (all p-values enter
    the bound) and is accepted for signature symmetry with the other phases.
    """
    del alpha
    g = graph.copy()
    led = ledger.copy()
    # (x, c) -> list of (other arm, bound term) for direction x --> c
    contrib: dict[tuple[int, int], list[tuple[int, float]]] = defaultdict(list)
    last_writer: dict[tuple[int, int], tuple[int, float]] = {}
    records: list[VStructRecord] = []

    for a, b, c in candidate_v_structures(graph, ledger):
        gamma = gamma_pvalue(tester, graph, a, b, c, l_max)
        records.append(VStructRecord(a, b, c, gamma))
        term_into_b = policy.conj(led.p1[(a, c)], gamma)
        term_into_a = policy.conj(led.p1[(b, c)], gamma)
        led.p_prime.setdefault((b, c), []).append(term_into_b)
        led.p_prime.setdefault((a, c), []).append(term_into_a)
        contrib[(b, c)].append((a, term_into_b))
        contrib[(a, c)].append((b, term_into_a))
        last_writer[(b, c)] = (a, term_into_b)
        last_writer[(a, c)] = (b, term_into_a)
        if ambiguation:
            g.add_arrowhead(a, c)
            g.add_arrowhead(b, c)
        else:
            g.orient(a, c)
            g.orient(b, c)

    if ambiguation:
        g2 = g.copy()
        for x, y in g.bidirected_pairs():
            g2.unorient(x, y, ambiguous=True)
            for v in (x, y):
                for u in g.parents(v):
                    g2.unorient(u, v, ambiguous=True)
        g = g2

    triple_ids: dict[tuple[int, int, int], int] = {}
    for x, y, mark in g.edges():
        if not (g.is_directed(x, y) or g.is_directed(y, x)):
            continue
        src, dst = (x, y) if g.is_directed(x, y) else (y, x)
        parts = [last_writer[(src, dst)]] if legacy else contrib[(src, dst)]
        p2 = outer(led.p1[(src, dst)], sum(t for _, t in parts), policy)
        if len(parts) == 1:
            other = parts[0][0]
            triple = (min(src, other), dst, max(src, other))
            if triple not in triple_ids:
                triple_ids[triple] = led.new_identifier()
            token = triple_ids[triple]
        else:
            token = led.new_identifier()
        led.set_directed(src, dst, p2, token)

    led.vstructs = records
    return g, led
