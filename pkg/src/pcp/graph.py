"""Graph types: ground-truth DAGs, mixed working graphs, d-separation, CPDAGs, SHD.

Vertices are dense 0-based integer indices. Names only appear at I/O time.
"""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator


class GraphError(ValueError):
    """Invalid graph construction or query."""


@dataclass(frozen=True)
class Dag:
    vertex_count: int
    edges: frozenset[tuple[int, int]]
    _parents: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)
    _children: tuple[frozenset[int], ...] = field(init=False, repr=False, compare=False)

    def __init__(self, vertex_count: int, edges: Iterable[tuple[int, int]] = ()):
        if vertex_count < 1:
            raise GraphError("vertex_count must be positive")
        edges = frozenset((int(a), int(b)) for a, b in edges)
        parents = [set() for _ in range(vertex_count)]
        children = [set() for _ in range(vertex_count)]
        for a, b in edges:
            if not (0 <= a < vertex_count and 0 <= b < vertex_count):
                raise GraphError(f"edge {(a, b)} out of range")
            if a == b:
                raise GraphError(f"self-loop at {a}")
            if (b, a) in edges:
                raise GraphError(f"two edges between {a} and {b}")
            parents[b].add(a)
            children[a].add(b)
        object.__setattr__(self, "vertex_count", vertex_count)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_parents", tuple(frozenset(p) for p in parents))
        object.__setattr__(self, "_children", tuple(frozenset(c) for c in children))
        self.topological_order()  # raises on cycles

    def parents(self, v: int) -> frozenset[int]:
        return self._parents[v]

    def children(self, v: int) -> frozenset[int]:
        return self._children[v]

    def adjacent(self, a: int, b: int) -> bool:
        return (a, b) in self.edges or (b, a) in self.edges

    def topological_order(self) -> list[int]:
        indeg = [len(p) for p in self._parents]
        queue = deque(v for v in range(self.vertex_count) if indeg[v] == 0)
        order = []
        while queue:
            v = queue.popleft()
            order.append(v)
            for c in sorted(self._children[v]):
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if len(order) != self.vertex_count:
            raise GraphError("graph contains a directed cycle")
        return order

    def ancestors(self, vertices: Iterable[int]) -> set[int]:
        """Ancestors of ``vertices``, the vertices themselves included."""
        seen = set(vertices)
        stack = list(seen)
        while stack:
            v = stack.pop()
            for p in self._parents[v]:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return seen

    def descendants(self, v: int) -> set[int]:
        seen = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for c in self._children[u]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return seen

    def unshielded_colliders(self) -> list[tuple[int, int, int]]:
        """Triples (a, c, b) with a < b, a -> c <- b and a, b non-adjacent."""
        out = []
        for c in range(self.vertex_count):
            for a, b in itertools.combinations(sorted(self._parents[c]), 2):
                if not self.adjacent(a, b):
                    out.append((a, c, b))
        return out


class EdgeMark(enum.Enum):
    """Mark of an edge read from its first endpoint towards its second."""

    ABSENT = "absent"
    UNDIRECTED = "---"
    FORWARD = "-->"
    BACKWARD = "<--"
    BIDIRECTED = "<->"

    def reversed(self) -> "EdgeMark":
        if self is EdgeMark.FORWARD:
            return EdgeMark.BACKWARD
        if self is EdgeMark.BACKWARD:
            return EdgeMark.FORWARD
        return self


def _key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


class MixedGraph:
    """Working graph with one mark per unordered vertex pair.

    Marks are stored against the canonical pair ``(min, max)``; every accessor
    takes an ordered pair and translates. ``ambiguous`` holds canonical pairs
    of undirected edges that orientation rules must not use.
    """

    def __init__(self, vertex_count: int):
        if vertex_count < 1:
            raise GraphError("vertex_count must be positive")
        self.vertex_count = vertex_count
        self._marks: dict[tuple[int, int], EdgeMark] = {}
        self._adj: list[set[int]] = [set() for _ in range(vertex_count)]
        self.ambiguous: set[tuple[int, int]] = set()

    @classmethod
    def complete(cls, vertex_count: int) -> "MixedGraph":
        g = cls(vertex_count)
        for a, b in itertools.combinations(range(vertex_count), 2):
            g.set_mark(a, b, EdgeMark.UNDIRECTED)
        return g

    @classmethod
    def from_dag(cls, dag: Dag) -> "MixedGraph":
        g = cls(dag.vertex_count)
        for a, b in dag.edges:
            g.set_mark(a, b, EdgeMark.FORWARD)
        return g

    def copy(self) -> "MixedGraph":
        g = MixedGraph(self.vertex_count)
        g._marks = dict(self._marks)
        g._adj = [set(s) for s in self._adj]
        g.ambiguous = set(self.ambiguous)
        return g

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return (
            self.vertex_count == other.vertex_count
            and self._marks == other._marks
            and self.ambiguous == other.ambiguous
        )

    def __repr__(self) -> str:
        body = ", ".join(
            f"{a}{m.value}{b}" + ("?" if (a, b) in self.ambiguous else "")
            for (a, b), m in sorted(self._marks.items())
        )
        return f"MixedGraph({self.vertex_count}, [{body}])"

    def _check(self, a: int, b: int) -> None:
        n = self.vertex_count
        if not (0 <= a < n and 0 <= b < n):
            raise GraphError(f"vertex out of range: {(a, b)}")
        if a == b:
            raise GraphError(f"self pair {(a, b)}")

    def mark(self, a: int, b: int) -> EdgeMark:
        m = self._marks.get(_key(a, b), EdgeMark.ABSENT)
        return m if a < b else m.reversed()

    def set_mark(self, a: int, b: int, mark: EdgeMark) -> None:
        self._check(a, b)
        key = _key(a, b)
        if mark is EdgeMark.ABSENT:
            self._marks.pop(key, None)
            self._adj[a].discard(b)
            self._adj[b].discard(a)
            self.ambiguous.discard(key)
            return
        self._marks[key] = mark if a < b else mark.reversed()
        self._adj[a].add(b)
        self._adj[b].add(a)
        if mark is not EdgeMark.UNDIRECTED:
            self.ambiguous.discard(key)

    def remove_edge(self, a: int, b: int) -> None:
        self.set_mark(a, b, EdgeMark.ABSENT)

    def adjacent(self, a: int, b: int) -> bool:
        return b in self._adj[a]

    def neighbors(self, a: int) -> set[int]:
        """Live adjacency set of ``a``; callers must not mutate it."""
        return self._adj[a]

    def is_directed(self, a: int, b: int) -> bool:
        """True iff ``a --> b``."""
        return self.mark(a, b) is EdgeMark.FORWARD

    def is_undirected(self, a: int, b: int) -> bool:
        return self.mark(a, b) is EdgeMark.UNDIRECTED

    def is_ambiguous(self, a: int, b: int) -> bool:
        return _key(a, b) in self.ambiguous

    def parents(self, v: int) -> list[int]:
        return sorted(u for u in self._adj[v] if self.mark(u, v) is EdgeMark.FORWARD)

    def children(self, v: int) -> list[int]:
        return sorted(u for u in self._adj[v] if self.mark(v, u) is EdgeMark.FORWARD)

    def add_arrowhead(self, a: int, b: int) -> None:
        """Put an arrowhead at ``b`` on edge a-b, keeping any arrowhead at ``a``."""
        m = self.mark(a, b)
        if m is EdgeMark.ABSENT:
            raise GraphError(f"no edge between {a} and {b}")
        if m is EdgeMark.UNDIRECTED:
            self.set_mark(a, b, EdgeMark.FORWARD)
        elif m is EdgeMark.BACKWARD:
            self.set_mark(a, b, EdgeMark.BIDIRECTED)

    def orient(self, a: int, b: int) -> None:
        """Set ``a --> b``, overwriting whatever mark the edge carried."""
        if not self.adjacent(a, b):
            raise GraphError(f"no edge between {a} and {b}")
        self.set_mark(a, b, EdgeMark.FORWARD)

    def unorient(self, a: int, b: int, ambiguous: bool = False) -> None:
        if not self.adjacent(a, b):
            raise GraphError(f"no edge between {a} and {b}")
        self.set_mark(a, b, EdgeMark.UNDIRECTED)
        if ambiguous:
            self.ambiguous.add(_key(a, b))

    def edges(self) -> Iterator[tuple[int, int, EdgeMark]]:
        """All present edges as ``(a, b, mark)`` with ``a < b``, sorted."""
        for (a, b) in sorted(self._marks):
            yield a, b, self._marks[(a, b)]

    def edge_count(self) -> int:
        return len(self._marks)

    def adjacency_pairs(self) -> set[tuple[int, int]]:
        return set(self._marks)

    def bidirected_pairs(self) -> list[tuple[int, int]]:
        return sorted(k for k, m in self._marks.items() if m is EdgeMark.BIDIRECTED)


def d_separated(dag: Dag, x: int, y: int, z: Iterable[int]) -> bool:
    """Reachability test: is every path between ``x`` and ``y`` blocked by ``z``?"""
    z = set(z)
    n = dag.vertex_count
    for v in (x, y, *z):
        if not 0 <= v < n:
            raise GraphError(f"vertex {v} out of range")
    if x == y:
        raise GraphError("x and y must differ")
    if x in z or y in z:
        raise GraphError("x and y must not be in the conditioning set")

    anc_z = dag.ancestors(z)
    # state: (vertex, came_from_child). Arriving "up" means via an edge out of
    # the vertex (we came from one of its children).
    visited: set[tuple[int, bool]] = set()
    stack = [(x, True)]
    while stack:
        v, up = stack.pop()
        if (v, up) in visited:
            continue
        visited.add((v, up))
        if v == y:
            return False
        if up:
            if v not in z:
                stack.extend((p, True) for p in dag.parents(v))
                stack.extend((c, False) for c in dag.children(v))
        else:
            if v not in z:
                stack.extend((c, False) for c in dag.children(v))
            if v in anc_z:
                stack.extend((p, True) for p in dag.parents(v))
    return True


def _meek_closure(g: MixedGraph) -> None:
    """Apply orientation rules 1-3 in place until nothing changes."""
    changed = True
    while changed:
        changed = False
        for a, b, m in list(g.edges()):
            if m is not EdgeMark.UNDIRECTED:
                continue
            for x, y in ((a, b), (b, a)):
                if not g.is_undirected(x, y):
                    break
                if _compelled(g, x, y):
                    g.orient(x, y)
                    changed = True
                    break


def _compelled(g: MixedGraph, a: int, b: int) -> bool:
    nb_a = g.neighbors(a)
    # rule 1: c -> a - b, c and b non-adjacent
    for c in nb_a:
        if c != b and g.is_directed(c, a) and not g.adjacent(c, b):
            return True
    # rule 2: a -> c -> b
    for c in nb_a:
        if c != b and g.is_directed(a, c) and g.is_directed(c, b):
            return True
    # rule 3: a - c -> b, a - d -> b, c and d non-adjacent
    mids = [c for c in nb_a if c != b and g.is_undirected(a, c) and g.is_directed(c, b)]
    for c, d in itertools.combinations(mids, 2):
        if not g.adjacent(c, d):
            return True
    return False


def true_cpdag(dag: Dag) -> MixedGraph:
    """CPDAG of the Markov equivalence class of ``dag``.

    Built from the skeleton and the unshielded colliders of ``dag``, closed
    under orientation rules 1-3.
    """
    g = MixedGraph(dag.vertex_count)
    for a, b in dag.edges:
        g.set_mark(a, b, EdgeMark.UNDIRECTED)
    for a, c, b in dag.unshielded_colliders():
        g.orient(a, c)
        g.orient(b, c)
    _meek_closure(g)
    return g


def shd(g1: MixedGraph, g2: MixedGraph) -> int:
    """Number of unordered pairs whose marks differ between the two graphs."""
    if g1.vertex_count != g2.vertex_count:
        raise GraphError("graphs have different vertex counts")
    pairs = g1.adjacency_pairs() | g2.adjacency_pairs()
    return sum(1 for a, b in pairs if g1.mark(a, b) is not g2.mark(a, b))
