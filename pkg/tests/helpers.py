"""Builders for hand-made graphs and ledgers."""

from __future__ import annotations

from pcp.citest import CiResult, _query_key
from pcp.graph import EdgeMark, MixedGraph
from pcp.skeleton import PValueLedger, finalize_edge_pvalues


def build(p, undirected=(), directed=()):
    g = MixedGraph(p)
    for a, b in undirected:
        g.set_mark(a, b, EdgeMark.UNDIRECTED)
    for a, b in directed:
        g.set_mark(a, b, EdgeMark.FORWARD)
    return g


def ledger_for(graph, p1=None, p2=None, default=0.01, sepsets=None):
    """Skeleton-phase ledger for ``graph``; ``p1`` overrides per canonical pair."""
    p1 = p1 or {}
    led = PValueLedger()
    for a, b in graph.adjacency_pairs():
        v = p1.get((a, b), p1.get((b, a), default))
        led.p1_samples[(a, b)] = [v]
        led.p1_samples[(b, a)] = [v]
    finalize_edge_pvalues(led)
    for (a, b), v in (p2 or {}).items():
        led.set_directed(a, b, v, led.new_identifier())
    for key, sets in (sepsets or {}).items():
        led.sepsets[(min(key), max(key))] = [frozenset(s) for s in sets]
    return led


class FixedTester:
    """Prescribed p-values per query, ``default`` otherwise; logs every query."""

    def __init__(self, table=None, default=0.5):
        self.table = {_query_key(a, b, s): p for (a, b, s), p in (table or {}).items()}
        self.default = default
        self.calls = 0
        self.log = []

    def test(self, a, b, s):
        self.calls += 1
        key = _query_key(a, b, s)
        self.log.append(key)
        return CiResult(self.table.get(key, self.default), 0.0, len(key[2]))
