"""Slow, independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import math

import numpy as np

from pcp.graph import Dag, EdgeMark, MixedGraph


def _undirected_paths(dag: Dag, x: int, y: int):
    nbrs = {v: set(dag.parents(v)) | set(dag.children(v)) for v in range(dag.vertex_count)}

    def walk(path):
        last = path[-1]
        if last == y:
            yield list(path)
            return
        for n in sorted(nbrs[last]):
            if n not in path:
                path.append(n)
                yield from walk(path)
                path.pop()

    yield from walk([x])


def d_separated_by_paths(dag: Dag, x: int, y: int, z) -> bool:
    """Enumerate every simple path and check the blocking rule on each."""
    z = set(z)
    for path in _undirected_paths(dag, x, y):
        open_path = True
        for i in range(1, len(path) - 1):
            prev, v, nxt = path[i - 1], path[i], path[i + 1]
            collider = v in dag.children(prev) and v in dag.children(nxt)
            if collider:
                if not (({v} | dag.descendants(v)) & z):
                    open_path = False
                    break
            elif v in z:
                open_path = False
                break
        if open_path:
            return False
    return True


def all_dags(p: int):
    """Every DAG on ``p`` labelled vertices (feasible for p <= 4)."""
    pairs = list(itertools.combinations(range(p), 2))
    for choice in itertools.product((0, 1, 2), repeat=len(pairs)):
        edges = []
        for (a, b), c in zip(pairs, choice):
            if c == 1:
                edges.append((a, b))
            elif c == 2:
                edges.append((b, a))
        try:
            yield Dag(p, edges)
        except ValueError:
            continue


def independence_model(dag: Dag, separated=None):
    """Frozen set of all d-separation statements (x < y, z)."""
    p = dag.vertex_count
    separated = separated or d_separated_by_paths
    out = set()
    for x, y in itertools.combinations(range(p), 2):
        rest = [v for v in range(p) if v not in (x, y)]
        for k in range(len(rest) + 1):
            for z in itertools.combinations(rest, k):
                if separated(dag, x, y, z):
                    out.add((x, y, z))
    return frozenset(out)


def same_skeleton_dags(dag: Dag):
    """Every acyclic orientation of ``dag``'s skeleton."""
    pairs = sorted((min(a, b), max(a, b)) for a, b in dag.edges)
    for flips in itertools.product((False, True), repeat=len(pairs)):
        edges = [(b, a) if f else (a, b) for (a, b), f in zip(pairs, flips)]
        try:
            yield Dag(dag.vertex_count, edges)
        except ValueError:
            continue


def cpdag_by_enumeration(dag: Dag, candidates=None) -> MixedGraph:
    """An edge is directed iff every DAG with the same d-separations orients it the same way.

    Markov-equivalent DAGs share a skeleton, so by default only orientations
    of ``dag``'s skeleton are searched; equivalence itself is decided by
    comparing full d-separation models computed by path enumeration.
    """
    target = independence_model(dag)
    pool = same_skeleton_dags(dag) if candidates is None else candidates
    members = [d for d in pool if independence_model(d) == target]
    g = MixedGraph(dag.vertex_count)
    for a, b in dag.edges:
        lo, hi = min(a, b), max(a, b)
        directions = {(lo, hi) if (lo, hi) in m.edges else (hi, lo) for m in members}
        if len(directions) == 1:
            x, y = directions.pop()
            g.set_mark(x, y, EdgeMark.FORWARD)
        else:
            g.set_mark(lo, hi, EdgeMark.UNDIRECTED)
    return g


def recursive_partial_correlation(c: np.ndarray, a: int, b: int, s) -> float:
    """Textbook recursion on the last conditioning variable."""
    s = list(s)
    if not s:
        return float(c[a, b])
    z, rest = s[-1], s[:-1]
    r_ab = recursive_partial_correlation(c, a, b, rest)
    r_az = recursive_partial_correlation(c, a, z, rest)
    r_bz = recursive_partial_correlation(c, b, z, rest)
    return (r_ab - r_az * r_bz) / math.sqrt((1 - r_az**2) * (1 - r_bz**2))


def alpha_star_by_search(pvals, q: float, step: float = 1e-6, top: float = 0.1) -> float:
    """Supremum of thresholds with estimate <= q and at least one rejection.

    The estimate is piecewise linear in the threshold with drops only at the
    p-values themselves, so the supremum over each piece is either a p-value
    or the point where the line meets q. Those candidates are checked
    exactly; a dense grid confirms that no grid point beats the answer.
    """
    p = np.sort(np.asarray(pvals, dtype=float))
    m = p.size
    cm = math.fsum(1.0 / i for i in range(1, m + 1))

    def est(a):
        r = np.count_nonzero(p <= a)
        return m * a * cm / max(r, 1), r

    best = 0.0
    candidates = set(p.tolist())
    for r in range(1, m + 1):
        candidates.add(q * r / (m * cm))
    for a in sorted(candidates):
        e, r = est(a)
        if r >= 1 and e <= q * (1 + 1e-12):
            best = max(best, a)

    grid = np.arange(0.0, top + step / 2, step)
    r = np.searchsorted(p, grid, side="right")
    e = m * grid * cm / np.maximum(r, 1)
    ok = (r >= 1) & (e <= q)
    grid_best = float(grid[ok].max()) if ok.any() else 0.0
    assert grid_best <= best + 1e-12, "grid found a larger feasible threshold"
    if best <= top:
        assert best - grid_best <= step + 1e-12, "candidate search disagrees with grid"
    return best
