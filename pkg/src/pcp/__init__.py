"""Causal structure discovery with p-value bounds and false discovery rate control."""

from .bounds import BoundPolicy
from .citest import CiResult, DatasetStats, FisherZ, Oracle, Scripted, SpearmanZ
from .fdr import (
    HypothesisSet,
    by_alpha_star,
    by_estimate,
    collect_hypotheses,
    evaluate,
    prune_graph,
)
from .graph import Dag, EdgeMark, MixedGraph, d_separated, shd, true_cpdag
from .harness import VARIANTS, VariantConfig, bench, run_pipeline
from .simgen import random_dag, random_sem, sample

__all__ = [
    "BoundPolicy",
    "CiResult",
    "Dag",
    "DatasetStats",
    "EdgeMark",
    "FisherZ",
    "HypothesisSet",
    "MixedGraph",
    "Oracle",
    "Scripted",
    "SpearmanZ",
    "VARIANTS",
    "VariantConfig",
    "bench",
    "by_alpha_star",
    "by_estimate",
    "collect_hypotheses",
    "d_separated",
    "evaluate",
    "prune_graph",
    "random_dag",
    "random_sem",
    "run_pipeline",
    "sample",
    "shd",
    "true_cpdag",
]
