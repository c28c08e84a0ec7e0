"""Orientation-rule propagation with additive p-value bounds and provenance."""

from __future__ import annotations

import itertools
from collections import defaultdict

from .bounds import BoundPolicy, bound_rule1, bound_rule2, bound_rule3, outer, rule3_pair_terms
from .graph import MixedGraph
from .skeleton import PValueLedger

Pair = tuple[int, int]

__all__ = [
    "apply_orientation_rules",
    "bound_rule1",
    "bound_rule2",
    "bound_rule3",
    "rule_firings",
]


def _rule1(g: MixedGraph, led: PValueLedger, a: int, b: int, policy):
    sources = [
        c for c in sorted(g.neighbors(a))
        if c != b and g.is_directed(c, a) and not g.adjacent(c, b)
    ]
    terms = [led.p2[(c, a)] for c in sources]
    antecedents = frozenset((c, a) for c in sources)
    return terms, antecedents


def _rule2(g: MixedGraph, led: PValueLedger, a: int, b: int, policy):
    mids = [
        c for c in sorted(g.neighbors(a))
        if c != b and g.is_directed(a, c) and g.is_directed(c, b)
    ]
    terms = [policy.conj(led.p2[(a, c)], led.p2[(c, b)]) for c in mids]
    antecedents = frozenset(e for c in mids for e in ((a, c), (c, b)))
    return terms, antecedents


def _rule3(g: MixedGraph, led: PValueLedger, a: int, b: int, policy):
    mids = [
        c for c in sorted(g.neighbors(a))
        if c != b
        and g.is_undirected(a, c)
        and not g.is_ambiguous(a, c)
        and g.is_directed(c, b)
    ]
    pairs = [
        (i, j) for i, j in itertools.combinations(range(len(mids)), 2)
        if not g.adjacent(mids[i], mids[j])
    ]
    if not pairs:
        return [], frozenset()
    paths = [(led.p1[(a, c)], led.p2[(c, b)]) for c in mids]
    terms = rule3_pair_terms(paths, pairs, policy)
    used = {mids[k] for pair in pairs for k in pair}
    antecedents = frozenset(e for c in used for e in ((a, c), (c, b)))
    return terms, antecedents


RULES = (_rule1, _rule2, _rule3)


def _candidates(g: MixedGraph) -> list[Pair]:
    out = []
    for x, y, _ in g.edges():
        if g.is_undirected(x, y) and not g.is_ambiguous(x, y):
            out.append((x, y))
            out.append((y, x))
    return out


def rule_firings(g: MixedGraph, led: PValueLedger, a: int, b: int, policy=BoundPolicy.ROBUST):
    """Per-rule ``(terms, antecedent edges)`` for orienting ``a --> b`` in ``g``."""
    return [rule(g, led, a, b, policy) for rule in RULES]


def apply_orientation_rules(
    graph: MixedGraph,
    ledger: PValueLedger,
    policy: BoundPolicy = BoundPolicy.ROBUST,
    ambiguation: bool = True,
    legacy: bool = False,
) -> tuple[MixedGraph, PValueLedger]:
    """Propagate orientations to a fixpoint and finalise ``p2`` for every edge.

    Each sweep evaluates all three rules on every non-ambiguous undirected
    edge against the graph as it stood at the start of the sweep, writing
    arrowheads into a copy. Contributions of every rule that fires in the same
    direction are summed into one bound. With ``ambiguation``, a bidirected
    result is unoriented along with the direct antecedents of both arrowheads,
    all flagged ambiguous; without it the direction written last is kept.

    ``legacy`` switches to the classic sequential procedure: the first rule
    that applies (in rule order) orients the edge at once, and the bound uses
    that rule alone.
    """
    g = graph.copy()
    led = ledger.copy()
    if legacy:
        _legacy_rules(g, led, policy)
    else:
        g = _pcp_rules(g, led, policy, ambiguation)

    for x, y, _ in g.edges():
        if not (g.is_directed(x, y) or g.is_directed(y, x)):
            led.set_undirected(x, y)
            led.p2[(x, y)] = led.p2[(y, x)] = led.p1[(x, y)]
    return g, led


def _pcp_rules(g: MixedGraph, led: PValueLedger, policy: BoundPolicy, ambiguation: bool) -> MixedGraph:
    while True:
        g2 = g.copy()
        scratch: dict[Pair, list[float]] = defaultdict(list)
        prov: dict[Pair, list[frozenset[Pair]]] = defaultdict(list)
        last_written: dict[Pair, Pair] = {}
        candidates = _candidates(g)
        for rule in RULES:
            for a, b in candidates:
                terms, antecedents = rule(g, led, a, b, policy)
                if not terms:
                    continue
                g2.add_arrowhead(a, b)
                scratch[(a, b)].extend(terms)
                prov[(a, b)].append(antecedents)
                last_written[(min(a, b), max(a, b))] = (a, b)
        if not scratch:
            return g

        for x, y in g2.bidirected_pairs():
            if ambiguation:
                g2.unorient(x, y, ambiguous=True)
                for direction in ((x, y), (y, x)):
                    for antecedents in prov[direction]:
                        for u, v in antecedents:
                            g2.unorient(u, v, ambiguous=True)
                            led.set_undirected(u, v)
            else:
                keep = last_written[(x, y)]
                g2.orient(*keep)
        g = g2

        for (a, b), terms in sorted(scratch.items()):
            if not g.is_directed(a, b):
                continue
            p2 = outer(led.p1[(a, b)], sum(terms), policy)
            led.set_directed(a, b, p2, led.new_identifier())
            led.provenance[(a, b)] = list(prov[(a, b)])


def _legacy_rules(g: MixedGraph, led: PValueLedger, policy: BoundPolicy) -> None:
    changed = True
    while changed:
        changed = False
        for a, b in _candidates(g):
            if not g.is_undirected(a, b):
                continue
            for rule in RULES:
                terms, antecedents = rule(g, led, a, b, policy)
                if terms:
                    g.orient(a, b)
                    p2 = outer(led.p1[(a, b)], sum(terms), policy)
                    led.set_directed(a, b, p2, led.new_identifier())
                    led.provenance[(a, b)] = [antecedents]
                    changed = True
                    break
