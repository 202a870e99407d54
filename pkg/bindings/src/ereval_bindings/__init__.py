"""DataFrame-friendly wrappers around the ereval estimators.

Clusterings are passed as mention -> cluster mappings: plain dicts,
pandas Series (index = mention id, values = cluster id), or anything else
with an ``items()`` view. The binding layer only converts arguments and
delegates; all computation happens in the core package.
"""

__version__ = "0.1.0"

from typing import Optional

import ereval
import ereval.errors as _core_errors
from ereval import Clustering, ClusterSample, MembershipVector, SamplingDesign
from ereval.estimators import SAMPLING_TYPES, WEIGHT_SCHEMES

from . import errors
from .errors import EvalError, InvalidDesign

__all__ = [
    "exact_precision_recall",
    "pairwise_precision_estimator",
    "pairwise_recall_estimator",
    "errors",
]


def _as_membership(obj, name: str) -> MembershipVector:
    if isinstance(obj, MembershipVector):
        return obj
    if isinstance(obj, Clustering):
        return obj.to_membership()
    items = getattr(obj, "items", None)
    if items is None:
        raise errors.InvalidInput(
            f"{name} must be a mapping of mention id to cluster id "
            f"(dict, pandas Series, ...), got {type(obj).__name__}"
        )
    try:
        return MembershipVector((str(m), str(c)) for m, c in items())
    except _core_errors.EvalError as exc:
        raise errors.wrap(exc) from exc


def _as_clustering(obj, name: str) -> Clustering:
    if isinstance(obj, Clustering):
        return obj
    try:
        return Clustering.from_membership(_as_membership(obj, name))
    except _core_errors.EvalError as exc:
        raise errors.wrap(exc) from exc


def _as_sample(obj, sampling_type: str, weights: str) -> ClusterSample:
    if sampling_type not in SAMPLING_TYPES:
        raise InvalidDesign(
            f"unknown sampling_type {sampling_type!r}; "
            f"valid: {', '.join(SAMPLING_TYPES)}"
        )
    groups: dict[str, set[str]] = {}
    for mention, cluster in _as_membership(obj, "sample").entries:
        groups.setdefault(cluster, set()).add(mention)
    clusters = tuple(frozenset(groups[c]) for c in sorted(groups))
    try:
        return ClusterSample(clusters, SamplingDesign(sampling_type, weights))
    except _core_errors.EvalError as exc:
        raise errors.wrap(exc) from exc


def exact_precision_recall(truth, prediction) -> tuple[float, float]:
    """Exact pairwise precision and recall of prediction against truth.

    Both arguments map every mention id to its cluster id and must cover
    the same mentions.
    """
    try:
        return ereval.exact_precision_recall(
            _as_clustering(truth, "truth"), _as_clustering(prediction, "prediction")
        )
    except _core_errors.EvalError as exc:
        raise errors.wrap(exc) from exc


def _estimator(prediction, sample, sampling_type, weights, metric):
    pred = _as_clustering(prediction, "prediction")
    cluster_sample = _as_sample(sample, sampling_type, weights)
    try:
        result = ereval.estimate(pred, cluster_sample, metric)
    except _core_errors.EvalError as exc:
        raise errors.wrap(exc) from exc
    return result.value, result.std


def pairwise_precision_estimator(
    prediction, sample, sampling_type: str, weights: str = "uniform"
) -> tuple[float, Optional[float]]:
    """Estimated pairwise precision from a sample of ground-truth clusters.

    prediction maps every mention of the population to its predicted
    cluster; sample maps the mentions of the sampled ground-truth clusters
    to their true cluster. Returns (estimate, standard error); the
    standard error is None for single-cluster samples.
    """
    return _estimator(prediction, sample, sampling_type, weights, "precision")


def pairwise_recall_estimator(
    prediction, sample, sampling_type: str, weights: str = "uniform"
) -> tuple[float, Optional[float]]:
    """Estimated pairwise recall; see pairwise_precision_estimator."""
    return _estimator(prediction, sample, sampling_type, weights, "recall")
