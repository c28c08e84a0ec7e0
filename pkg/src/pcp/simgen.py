"""Synthetic ground truth: degree-capped random DAGs and linear Gaussian SEMs.

All randomness flows through ``numpy.random.Generator`` backed by PCG64, so a
seed (or ``SeedSequence``) reproduces datasets bit for bit.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .graph import Dag

NOISE_SD_FLOOR = 0.1


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator from an int, ``SeedSequence`` or existing generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def random_dag(
    p: int,
    max_in: int = 2,
    max_out: int = 2,
    rng=None,
    edge_prob: float = 1.0,
) -> Dag:
    """Draw a random vertex order, then add shuffled forward edges under the degree caps.

    Each candidate edge is kept with probability ``edge_prob`` when both caps
    still allow it. The result is not uniform over the capped DAG family.
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    rng = make_rng(rng)
    order = rng.permutation(p)
    candidates = [(order[i], order[j]) for i in range(p) for j in range(i + 1, p)]
    perm = rng.permutation(len(candidates))
    indeg = np.zeros(p, dtype=int)
    outdeg = np.zeros(p, dtype=int)
    edges = []
    for k in perm:
        a, b = candidates[k]
        if outdeg[a] >= max_out or indeg[b] >= max_in:
            continue
        if edge_prob < 1.0 and rng.random() >= edge_prob:
            continue
        edges.append((int(a), int(b)))
        outdeg[a] += 1
        indeg[b] += 1
    return Dag(p, edges)


@dataclass(frozen=True)
class SemModel:
    dag: Dag
    weights: dict[tuple[int, int], float]
    noise_sd: np.ndarray

    def __post_init__(self):
        if set(self.weights) != set(self.dag.edges):
            raise ValueError("weights must be keyed exactly by the DAG's edges")
        if len(self.noise_sd) != self.dag.vertex_count or np.any(np.asarray(self.noise_sd) <= 0):
            raise ValueError("need one positive noise sd per vertex")

    def weight_matrix(self) -> np.ndarray:
        w = np.zeros((self.dag.vertex_count,) * 2)
        for (a, b), v in self.weights.items():
            w[a, b] = v
        return w


def random_sem(dag: Dag, rng=None) -> SemModel:
    """Standard normal edge weights; noise sd is ``|N(0, 1)|`` floored at 0.1."""
    rng = make_rng(rng)
    edges = sorted(dag.edges)
    w = rng.standard_normal(len(edges))
    sd = np.maximum(np.abs(rng.standard_normal(dag.vertex_count)), NOISE_SD_FLOOR)
    return SemModel(dag, {e: float(x) for e, x in zip(edges, w)}, sd)


def sample(sem: SemModel, n: int, rng=None) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be positive")
    rng = make_rng(rng)
    p = sem.dag.vertex_count
    eps = rng.standard_normal((n, p))
    x = np.zeros((n, p))
    for j in sem.dag.topological_order():
        col = sem.noise_sd[j] * eps[:, j]
        for i in sorted(sem.dag.parents(j)):
            col = col + sem.weights[(i, j)] * x[:, i]
        x[:, j] = col
    return x


def population_covariance(sem: SemModel) -> np.ndarray:
    """Covariance of X = W^T X + e: (I - W)^{-T} diag(sd^2) (I - W)^{-1}."""
    w = sem.weight_matrix()
    inv = np.linalg.inv(np.eye(len(w)) - w)
    return inv.T @ np.diag(np.asarray(sem.noise_sd) ** 2) @ inv


def population_correlation(sem: SemModel) -> np.ndarray:
    cov = population_covariance(sem)
    sd = np.sqrt(np.diag(cov))
    c = cov / np.outer(sd, sd)
    np.fill_diagonal(c, 1.0)
    return (c + c.T) / 2


def default_names(p: int) -> list[str]:
    return [f"X{i}" for i in range(p)]


def write_csv(path, data: np.ndarray, names: Sequence[str] | None = None) -> None:
    data = np.asarray(data, dtype=float)
    names = list(names) if names is not None else default_names(data.shape[1])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in data:
            w.writerow(["%.17g" % v for v in row])


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Return ``(names, data)``; raises ``ValueError`` on ragged or non-numeric rows."""
    with open(Path(path), newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    names = [n.strip() for n in rows[0]]
    if len(set(names)) != len(names):
        raise ValueError(f"{path}: duplicate column names")
    body = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(names):
            raise ValueError(f"{path}:{lineno}: expected {len(names)} fields, got {len(row)}")
        try:
            body.append([float(v) for v in row])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not body:
        raise ValueError(f"{path}: no samples")
    return names, np.array(body)
