"""Design-based evaluation of entity resolution: exact pairwise metrics,
nearly unbiased precision/recall estimators for sampled benchmark
clusters, and a Monte-Carlo engine that validates the estimators against
the exact oracle."""

__version__ = "0.1.0"

from .core import (
    Clustering,
    MembershipVector,
    PairStats,
    block_link_counts,
    clustering_from_membership,
    exact_precision_recall,
    f_value,
    g_value,
    pair_stats,
    restrict,
)
from .estimators import (
    ClusterSample,
    Estimate,
    SamplingDesign,
    estimate,
    fpc_theta,
    naive_precision_recall,
    precision_block,
    precision_cluster,
    precision_record,
    ratio_estimate,
    ratio_variance,
    recall_block,
    recall_cluster,
    recall_record,
)

__all__ = [
    "Clustering",
    "MembershipVector",
    "PairStats",
    "ClusterSample",
    "Estimate",
    "SamplingDesign",
    "block_link_counts",
    "clustering_from_membership",
    "estimate",
    "exact_precision_recall",
    "f_value",
    "fpc_theta",
    "g_value",
    "naive_precision_recall",
    "pair_stats",
    "precision_block",
    "precision_cluster",
    "precision_record",
    "ratio_estimate",
    "ratio_variance",
    "recall_block",
    "recall_cluster",
    "recall_record",
    "restrict",
]
