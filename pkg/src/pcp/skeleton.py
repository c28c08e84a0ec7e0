"""Skeleton discovery: order-independent (stable) and classic order-dependent search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .citest import CiTester
from .graph import MixedGraph

Pair = tuple[int, int]


@dataclass
class PValueLedger:
    """Per-pair bookkeeping shared by all phases.

    ``p1_samples`` collects every significant CI p-value per ordered pair during
    the search; ``p1`` holds the finalised undirected-edge bound (their max).
    ``p2`` holds final per-direction bounds, ``p_prime`` the v-structure
    contributions, ``sepsets`` the separating sets keyed by canonical pair.
    ``identifiers`` names the hypothesis test behind each ordered pair;
    ``skeleton_ids`` keeps the undirected-edge token per canonical pair so it
    can be restored when an edge is unoriented.
    """

    p1_samples: dict[Pair, list[float]] = field(default_factory=dict)
    p1: dict[Pair, float] = field(default_factory=dict)
    p2: dict[Pair, float] = field(default_factory=dict)
    p_prime: dict[Pair, list[float]] = field(default_factory=dict)
    sepsets: dict[Pair, list[frozenset[int]]] = field(default_factory=dict)
    identifiers: dict[Pair, int] = field(default_factory=dict)
    skeleton_ids: dict[Pair, int] = field(default_factory=dict)
    next_identifier: int = 0
    vstructs: list = field(default_factory=list)
    provenance: dict[Pair, list[frozenset[Pair]]] = field(default_factory=dict)

    def new_identifier(self) -> int:
        token = self.next_identifier
        self.next_identifier += 1
        return token

    def sepsets_of(self, a: int, b: int) -> list[frozenset[int]]:
        return self.sepsets.get((min(a, b), max(a, b)), [])

    def edge_p1(self, a: int, b: int) -> float:
        return self.p1[(a, b)]

    def set_directed(self, a: int, b: int, p_value: float, identifier: int) -> None:
        """Record ``a --> b`` as its own hypothesis with bound ``p_value``."""
        self.p2[(a, b)] = p_value
        self.p2.pop((b, a), None)
        self.identifiers[(a, b)] = identifier
        self.identifiers.pop((b, a), None)

    def set_undirected(self, a: int, b: int) -> None:
        """Fall back to the undirected-edge hypothesis from the skeleton phase."""
        token = self.skeleton_ids[(min(a, b), max(a, b))]
        self.identifiers[(a, b)] = self.identifiers[(b, a)] = token
        self.p2.pop((a, b), None)
        self.p2.pop((b, a), None)

    def copy(self) -> "PValueLedger":
        return PValueLedger(
            p1_samples={k: list(v) for k, v in self.p1_samples.items()},
            p1=dict(self.p1),
            p2=dict(self.p2),
            p_prime={k: list(v) for k, v in self.p_prime.items()},
            sepsets={k: list(v) for k, v in self.sepsets.items()},
            identifiers=dict(self.identifiers),
            skeleton_ids=dict(self.skeleton_ids),
            next_identifier=self.next_identifier,
            vstructs=list(self.vstructs),
            provenance={k: list(v) for k, v in self.provenance.items()},
        )


@dataclass(frozen=True)
class SkeletonConfig:
    alpha: float = 0.2
    l_max: int | None = 2
    stable: bool = True
    order: tuple[int, ...] | None = None

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.l_max is not None and self.l_max < 0:
            raise ValueError("l_max must be non-negative")


def _resolve_order(order: Sequence[int] | None, d: int) -> list[int]:
    if order is None:
        return list(range(d))
    order = list(order)
    if sorted(order) != list(range(d)):
        raise ValueError("order must be a permutation of the vertices")
    return order


def _record(ledger: PValueLedger, a: int, b: int, p: float) -> None:
    ledger.p1_samples.setdefault((a, b), []).append(p)
    ledger.p1_samples.setdefault((b, a), []).append(p)


def _delete(graph: MixedGraph, ledger: PValueLedger, a: int, b: int, s) -> None:
    graph.remove_edge(a, b)
    ledger.p1_samples.pop((a, b), None)
    ledger.p1_samples.pop((b, a), None)
    ledger.sepsets.setdefault((min(a, b), max(a, b)), []).append(frozenset(s))


def _test_side(tester, graph, ledger, a, b, pool, level, alpha) -> bool:
    """Run ``a _|_ b | S`` over ``S`` of size ``level`` from ``pool``; True if deleted."""
    for s in itertools.combinations(pool, level):
        p = tester.test(a, b, s).p_value
        if p <= alpha:
            _record(ledger, a, b, p)
        else:
            _delete(graph, ledger, a, b, s)
            return True
    return False


def discover_skeleton(
    tester: CiTester, config: SkeletonConfig, d: int
) -> tuple[MixedGraph, PValueLedger]:
    """Search the skeleton from the complete graph, returning graph and ledger.

    Stable mode snapshots adjacency sets once per level and always works
    through a pair as ``(min, max)`` then ``(max, min)`` with subsets in index
    order, so the result cannot depend on ``config.order``; the order only
    fixes the sequence in which pairs are visited. Legacy mode follows the
    classic procedure: live adjacency sets, with pairs and subsets both
    enumerated by position in ``config.order``.
    """
    if d < 2:
        raise ValueError("need at least two variables")
    order = _resolve_order(config.order, d)
    rank = {v: i for i, v in enumerate(order)}
    graph = MixedGraph.complete(d)
    ledger = PValueLedger()
    alpha = config.alpha

    level = 0
    while True:
        if config.stable:
            snapshot = [frozenset(graph.neighbors(v)) for v in range(d)]
            visit = sorted(
                graph.adjacency_pairs(), key=lambda e: (min(rank[e[0]], rank[e[1]]), max(rank[e[0]], rank[e[1]]))
            )
            for a, b in visit:
                for x, y in ((a, b), (b, a)):
                    pool = sorted(snapshot[x] - {y})
                    if len(pool) < level:
                        continue
                    if _test_side(tester, graph, ledger, x, y, pool, level, alpha):
                        break
        else:
            for x in order:
                for y in order:
                    if y == x or not graph.adjacent(x, y):
                        continue
                    pool = sorted(graph.neighbors(x) - {y}, key=rank.__getitem__)
                    if len(pool) < level:
                        continue
                    _test_side(tester, graph, ledger, x, y, pool, level, alpha)

        if config.l_max is not None and level >= config.l_max:
            break
        if all(len(graph.neighbors(a)) - 1 <= level for a in range(d) if graph.neighbors(a)):
            break
        level += 1

    finalize_edge_pvalues(ledger)
    return graph, ledger


def finalize_edge_pvalues(ledger: PValueLedger) -> PValueLedger:
    """Reduce each surviving pair's p-values to their max and assign shared tokens."""
    for (a, b), values in sorted(ledger.p1_samples.items()):
        if not values:
            continue
        ledger.p1[(a, b)] = max(values)
        key = (min(a, b), max(a, b))
        if key not in ledger.skeleton_ids:
            ledger.skeleton_ids[key] = ledger.new_identifier()
        ledger.identifiers[(a, b)] = ledger.skeleton_ids[key]
    return ledger
