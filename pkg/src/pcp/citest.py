"""Conditional-independence testers returning p-values.

Every tester exposes ``test(a, b, s) -> CiResult`` and counts the calls it
receives in ``calls``. Results are memoised per unordered pair and
conditioning set, so repeated queries within a run are free and identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Protocol

import numpy as np
from scipy.stats import rankdata

from .graph import Dag, d_separated

CLAMP_EPS = 1e-7


class DegenerateInputError(ValueError):
    """Singular correlation submatrix or constant column."""


class InsufficientSampleError(ValueError):
    """Too few samples for the requested conditioning set size."""


@dataclass(frozen=True)
class CiResult:
    p_value: float
    statistic: float
    conditioning_size: int


@dataclass(frozen=True)
class DatasetStats:
    sample_count: int
    correlation: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.correlation, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("correlation must be a square matrix")
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")
        if not np.allclose(c, c.T, atol=1e-12):
            raise ValueError("correlation must be symmetric")
        if not np.all(np.diag(c) == 1.0):
            raise ValueError("correlation diagonal must be exactly 1")
        object.__setattr__(self, "correlation", c)

    @property
    def variable_count(self) -> int:
        return self.correlation.shape[0]

    @classmethod
    def from_data(cls, data: np.ndarray) -> "DatasetStats":
        data = np.asarray(data, dtype=float)
        if data.ndim != 2:
            raise ValueError("data must be an (n, d) matrix")
        sd = data.std(axis=0)
        if np.any(sd == 0):
            raise DegenerateInputError(f"constant column(s): {np.flatnonzero(sd == 0).tolist()}")
        c = np.corrcoef(data, rowvar=False)
        c = np.clip((c + c.T) / 2, -1.0, 1.0)
        np.fill_diagonal(c, 1.0)
        return cls(data.shape[0], c)


def spearman_prepare(data: np.ndarray) -> DatasetStats:
    """Rank-transform each column (average ranks on ties), then correlate."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[0] < 4:
        raise ValueError("need an (n, d) matrix with n >= 4")
    for j in range(data.shape[1]):
        if np.unique(data[:, j]).size < 2:
            raise DegenerateInputError(f"column {j} is constant")
    ranks = rankdata(data, axis=0, method="average")
    return DatasetStats.from_data(ranks)


def partial_correlation(stats: DatasetStats, a: int, b: int, s: Iterable[int]) -> float:
    """Correlation of ``a`` and ``b`` given ``s``, from the inverse of the submatrix."""
    s = sorted(s)
    if a == b or a in s or b in s:
        raise ValueError("a, b must be distinct and outside the conditioning set")
    # canonical argument order keeps the result bitwise symmetric in (a, b)
    a, b = min(a, b), max(a, b)
    c = stats.correlation
    if not s:
        return float(c[a, b])
    idx = [a, b, *s]
    sub = c[np.ix_(idx, idx)]
    # a near-zero determinant relative to the unit diagonal means collinear columns
    if abs(np.linalg.det(sub)) < 1e-14:
        raise DegenerateInputError(f"singular submatrix for {a}, {b} | {s}")
    omega = np.linalg.inv(sub)
    denom = omega[0, 0] * omega[1, 1]
    if not denom > 0:
        raise DegenerateInputError(f"non-positive precision diagonal for {a}, {b} | {s}")
    r = -omega[0, 1] / math.sqrt(denom)
    return float(min(1.0, max(-1.0, r)))


def two_sided_normal_p(z: float) -> float:
    """2 * (1 - Phi(|z|)) via erfc, which keeps full relative accuracy in the tail."""
    return math.erfc(abs(z) / math.sqrt(2.0))


def fisher_z_test(stats: DatasetStats, a: int, b: int, s: Iterable[int]) -> CiResult:
    s = list(s)
    dof = stats.sample_count - len(s) - 3
    if dof < 1:
        raise InsufficientSampleError(
            f"n={stats.sample_count} too small for conditioning set of size {len(s)}"
        )
    r = partial_correlation(stats, a, b, s)
    r = min(1.0 - CLAMP_EPS, max(-1.0 + CLAMP_EPS, r))
    z = math.atanh(r) * math.sqrt(dof)
    return CiResult(two_sided_normal_p(z), z, len(s))


class CiTester(Protocol):
    calls: int

    def test(self, a: int, b: int, s: Iterable[int]) -> CiResult: ...


def _query_key(a: int, b: int, s: Iterable[int]) -> tuple[int, int, tuple[int, ...]]:
    if a > b:
        a, b = b, a
    return a, b, tuple(sorted(s))


class _Memo:
    def __init__(self):
        self.calls = 0
        self._cache: dict[tuple, CiResult] = {}

    def test(self, a: int, b: int, s: Iterable[int]) -> CiResult:
        self.calls += 1
        key = _query_key(a, b, s)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._compute(*key)
            self._cache[key] = hit
        return hit

    @property
    def unique_queries(self) -> int:
        return len(self._cache)

    def _compute(self, a: int, b: int, s: tuple[int, ...]) -> CiResult:
        raise NotImplementedError


class FisherZ(_Memo):
    """Fisher z test on a precomputed correlation matrix.

    Exactly collinear inputs give p = 0: an edge is kept rather than removed
    on degenerate evidence.
    """

    def __init__(self, stats: DatasetStats):
        super().__init__()
        self.stats = stats

    @classmethod
    def from_data(cls, data: np.ndarray) -> "FisherZ":
        return cls(DatasetStats.from_data(data))

    def _compute(self, a, b, s):
        try:
            return fisher_z_test(self.stats, a, b, s)
        except DegenerateInputError:
            return CiResult(0.0, math.inf, len(s))


class SpearmanZ(FisherZ):
    """Fisher z machinery applied to rank correlations."""

    @classmethod
    def from_data(cls, data: np.ndarray) -> "SpearmanZ":
        return cls(spearman_prepare(data))


def oracle_test(dag: Dag, a: int, b: int, s: Iterable[int]) -> CiResult:
    s = list(s)
    p = 1.0 if d_separated(dag, a, b, s) else 0.0
    return CiResult(p, 0.0, len(s))


class Oracle(_Memo):
    """d-separation in a known DAG: p = 1 when separated, else 0."""

    def __init__(self, dag: Dag):
        super().__init__()
        self.dag = dag

    def _compute(self, a, b, s):
        return oracle_test(self.dag, a, b, s)


@dataclass
class Scripted:
    """Prescribed independence decisions on top of another tester.

    ``script`` maps ``(a, b, S)`` to ``True`` (independent, p = 1) or
    ``False`` (dependent, p = 0). Keys are normalised, so ``(a, b)`` order and
    the order inside ``S`` do not matter. Unscripted queries fall through.
    """

    fallback: CiTester
    script: Mapping[tuple[int, int, Iterable[int]], bool] = field(default_factory=dict)
    calls: int = 0

    def __post_init__(self):
        self._table = {_query_key(a, b, s): bool(v) for (a, b, s), v in self.script.items()}

    def test(self, a: int, b: int, s: Iterable[int]) -> CiResult:
        s = tuple(s)
        self.calls += 1
        key = _query_key(a, b, s)
        if key in self._table:
            return CiResult(1.0 if self._table[key] else 0.0, 0.0, len(s))
        return self.fallback.test(a, b, s)
