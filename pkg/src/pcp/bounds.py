"""Combinators turning constituent p-values into edge-level p-value bounds.

The robust policy bounds a conjunction by the max of its parts; the
non-robust policy uses the min instead, which a single under-estimated part
can drag down. Disjunctions over alternative explanations are always summed.
Every result is clamped to 1.
"""

from __future__ import annotations

import enum
import itertools
from typing import Sequence


class BoundPolicy(enum.Enum):
    ROBUST = "robust"
    NON_ROBUST = "non_robust"

    def conj(self, *values: float) -> float:
        return max(values) if self is BoundPolicy.ROBUST else min(values)


def outer(p_edge: float, disjunction_sum: float, policy: BoundPolicy) -> float:
    return min(1.0, policy.conj(p_edge, disjunction_sum))


def combine_vstruct_bound(
    p_ac: float,
    contributions: Sequence[tuple[float, float]],
    policy: BoundPolicy = BoundPolicy.ROBUST,
) -> float:
    """Bound for ``a --> c`` explained by colliders ``a -> c <- b_i``.

    ``contributions`` holds ``(p_{b_i - c}, p_gamma_i)`` per explaining v-structure.
    """
    if not contributions:
        raise ValueError("at least one v-structure contribution is required")
    total = sum(policy.conj(p_bc, p_g) for p_bc, p_g in contributions)
    return outer(p_ac, total, policy)


def bound_rule1(
    p_ab: float, p_ci_to_a: Sequence[float], policy: BoundPolicy = BoundPolicy.ROBUST
) -> float:
    if not p_ci_to_a:
        raise ValueError("rule 1 needs at least one c -> a")
    return outer(p_ab, sum(p_ci_to_a), policy)


def bound_rule2(
    p_ab: float,
    chains: Sequence[tuple[float, float]],
    policy: BoundPolicy = BoundPolicy.ROBUST,
) -> float:
    if not chains:
        raise ValueError("rule 2 needs at least one a -> c -> b")
    return outer(p_ab, sum(policy.conj(x, y) for x, y in chains), policy)


def rule3_pair_terms(
    paths: Sequence[tuple[float, float]],
    pairs: Sequence[tuple[int, int]] | None = None,
    policy: BoundPolicy = BoundPolicy.ROBUST,
) -> list[float]:
    """One term per pair of ``a - c_k -> b`` paths, combining all four p-values.

    ``pairs`` restricts the index pairs used; default is every pair.
    """
    if pairs is None:
        pairs = list(itertools.combinations(range(len(paths)), 2))
    return [policy.conj(*paths[k], *paths[l]) for k, l in pairs]


def bound_rule3(
    p_ab: float,
    paths: Sequence[tuple[float, float]],
    policy: BoundPolicy = BoundPolicy.ROBUST,
) -> float:
    """``paths`` holds ``(p_{a - c_i}, p_{c_i -> b})`` for pairwise non-adjacent ``c_i``."""
    if len(paths) < 2:
        raise ValueError("rule 3 needs at least two paths")
    return outer(p_ab, sum(rule3_pair_terms(paths, policy=policy)), policy)
