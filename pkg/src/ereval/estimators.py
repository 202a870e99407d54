"""Design-based precision and recall estimators from sampled ground-truth
clusters.

The generic engine estimates a ratio of population means from per-sample
quantities (A_s, B_s) with a first-order bias correction and a Taylor
variance. Each sampling design (record, cluster, cluster_block,
single_block) supplies its own substitutions. Accumulation uses
``math.fsum`` so the census identities hold to 1e-12 on long sums.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import (
    Clustering,
    block_link_counts,
    comb2,
    exact_precision_recall,
    f_value,
    restrict,
)
from .errors import (
    DegenerateRatio,
    InsufficientSample,
    InvalidDesign,
    InvalidInput,
    NoPredictedLinks,
)

SAMPLING_TYPES = ("record", "cluster", "cluster_block", "single_block")
WEIGHT_SCHEMES = ("uniform", "cluster_size")


@dataclass(frozen=True)
class SamplingDesign:
    """How the sampled clusters were drawn.

    ``weights`` names a scheme, or ``probabilities`` gives one explicit
    positive weight per sampled element (known possibly only up to
    proportionality, except for record sampling where they must be actual
    probabilities). ``fpc`` is the population size T for the optional
    finite-population correction; absent means theta = 1.
    """

    sampling_type: str
    weights: Optional[str] = "uniform"
    probabilities: Optional[tuple[float, ...]] = None
    fpc: Optional[int] = None

    def __post_init__(self):
        if self.sampling_type not in SAMPLING_TYPES:
            raise InvalidDesign(
                f"unknown sampling_type {self.sampling_type!r}; "
                f"valid: {', '.join(SAMPLING_TYPES)}"
            )
        if self.probabilities is not None:
            object.__setattr__(self, "probabilities", tuple(float(p) for p in self.probabilities))
            if any(p <= 0 for p in self.probabilities):
                raise InvalidDesign("explicit probabilities must be strictly positive")
        elif self.weights not in WEIGHT_SCHEMES:
            raise InvalidDesign(
                f"unknown weights {self.weights!r}; valid: {', '.join(WEIGHT_SCHEMES)}"
            )


@dataclass(frozen=True)
class ClusterSample:
    """Fully resolved ground-truth clusters drawn under a known design.

    Clusters are kept with multiplicity (sampling is with replacement).
    """

    clusters: tuple[frozenset[str], ...]
    design: SamplingDesign

    def __post_init__(self):
        object.__setattr__(
            self, "clusters", tuple(frozenset(str(m) for m in c) for c in self.clusters)
        )
        if not self.clusters:
            raise InvalidInput("a cluster sample must contain at least one cluster")
        if any(not c for c in self.clusters):
            raise InvalidInput("sampled clusters must be non-empty")
        p = self.design.probabilities
        # For single_block, every sampled cluster belongs to the one block,
        # so exactly one probability may be given.
        expected = 1 if self.design.sampling_type == "single_block" else len(self.clusters)
        if p is not None and len(p) != expected:
            raise InvalidDesign(
                f"{len(p)} probabilities given for {expected} sampled elements"
            )

    def __len__(self) -> int:
        return len(self.clusters)


@dataclass(frozen=True)
class Estimate:
    """Point estimate with its estimated standard deviation.

    std is absent for single-sample designs, where no variance estimate
    exists.
    """

    value: float
    std: Optional[float]
    n: int
    theta: float = 1.0

    def __post_init__(self):
        if (self.std is None) != (self.n == 1):
            raise InvalidInput("std must be absent exactly when n == 1")
        if self.std is not None and self.std < 0:
            raise InvalidInput("std must be non-negative")


def fpc_theta(n: int, T: Optional[int] = None) -> float:
    """Finite-population correction 1 - (n-1)/(T-1); 1 when T is unknown."""
    if n < 1:
        raise InvalidDesign(f"sample size must be >= 1, got {n}")
    if T is None or n == 1:
        return 1.0
    if n > T:
        raise InvalidDesign(f"sample size {n} exceeds population size {T}")
    return 1.0 - (n - 1) / (T - 1)


def ratio_estimate(A: Sequence[float], B: Sequence[float], theta: float = 1.0) -> float:
    """Bias-adjusted estimate of mean(B-population) / mean(A-population)."""
    n = _check_ratio_inputs(A, B)
    a_bar = math.fsum(A) / n
    b_bar = math.fsum(B) / n
    _check_nonzero_means(a_bar, b_bar)
    corr = math.fsum(
        (a / a_bar) * (b / b_bar - a / a_bar) for a, b in zip(A, B)
    )
    return (b_bar / a_bar) * (1.0 + theta / (n * (n - 1)) * corr)


def ratio_variance(A: Sequence[float], B: Sequence[float], theta: float = 1.0) -> float:
    """Taylor variance estimate companion to ratio_estimate."""
    n = _check_ratio_inputs(A, B)
    a_bar = math.fsum(A) / n
    b_bar = math.fsum(B) / n
    _check_nonzero_means(a_bar, b_bar)
    ss = math.fsum((a / a_bar - b / b_bar) ** 2 for a, b in zip(A, B))
    return (b_bar / a_bar) ** 2 * theta / (n * (n - 1)) * ss


def _check_ratio_inputs(A: Sequence[float], B: Sequence[float]) -> int:
    if len(A) != len(B):
        raise InvalidInput(f"A and B differ in length ({len(A)} vs {len(B)})")
    if len(A) < 2:
        raise InsufficientSample("ratio estimation requires at least 2 samples")
    return len(A)


def _check_nonzero_means(a_bar: float, b_bar: float) -> None:
    if a_bar == 0.0:
        raise DegenerateRatio("denominator sample mean is zero")
    if b_bar == 0.0:
        raise DegenerateRatio("numerator sample mean is zero")


def _ratio_pair(A: Sequence[float], B: Sequence[float], theta: float) -> Estimate:
    """Ratio machinery with the single-sample degenerate case handled."""
    if len(A) == 1:
        if A[0] == 0.0:
            raise DegenerateRatio("denominator is zero for a single sample")
        return Estimate(B[0] / A[0], None, 1, theta)
    value = ratio_estimate(A, B, theta)
    std = math.sqrt(ratio_variance(A, B, theta))
    return Estimate(value, std, len(A), theta)


# ---------------------------------------------------------------------------
# Stat-level estimator cores. These take per-sample quantities and are shared
# between the object API below and the simulation engine's array fast path.
# ---------------------------------------------------------------------------


def precision_record_core(
    f_vals: Sequence[int],
    sizes: Sequence[int],
    probs: Sequence[float],
    pred_pair_total: int,
    theta: float = 1.0,
    clamp: bool = False,
) -> Estimate:
    """Unbiased record-sampling precision: mean of g(c)/(|c| p) with the
    unbiased variance of a sample mean. Values may exceed 1 unless clamped
    (clamping is biased and off by default)."""
    if pred_pair_total == 0:
        raise NoPredictedLinks("prediction contains no co-clustered pairs")
    n = len(f_vals)
    xs = [f / pred_pair_total / (size * p) for f, size, p in zip(f_vals, sizes, probs)]
    value = math.fsum(xs) / n
    if n == 1:
        std = None
    else:
        var = theta / (n * (n - 1)) * math.fsum(x * x - value * value for x in xs)
        std = math.sqrt(max(var, 0.0))
    if clamp:
        value = min(max(value, 0.0), 1.0)
    return Estimate(value, std, n, theta)


def recall_record_core(
    f_vals: Sequence[int],
    sizes: Sequence[int],
    probs: Sequence[float],
    theta: float = 1.0,
) -> Estimate:
    A = [(size - 1) / p for size, p in zip(sizes, probs)]
    B = [2.0 * f / (size * p) for f, size, p in zip(f_vals, sizes, probs)]
    return _ratio_pair(A, B, theta)


def precision_cluster_core(
    f_vals: Sequence[int],
    sizes: Sequence[int],
    weights: Sequence[float],
    pred_pair_total: int,
    universe_size: int,
    theta: float = 1.0,
) -> Estimate:
    if pred_pair_total == 0:
        raise NoPredictedLinks("prediction contains no co-clustered pairs")
    A = [size / w for size, w in zip(sizes, weights)]
    B = [
        universe_size * (f / pred_pair_total) / w
        for f, w in zip(f_vals, weights)
    ]
    return _ratio_pair(A, B, theta)


def recall_cluster_core(
    f_vals: Sequence[int],
    sizes: Sequence[int],
    weights: Sequence[float],
    theta: float = 1.0,
) -> Estimate:
    A = [comb2(size) / w for size, w in zip(sizes, weights)]
    B = [f / w for f, w in zip(f_vals, weights)]
    return _ratio_pair(A, B, theta)


def precision_block_core(
    within: Sequence[int],
    outgoing: Sequence[int],
    common: Sequence[int],
    weights: Sequence[float],
    theta: float = 1.0,
) -> Estimate:
    A = [(wi + 0.5 * out) / w for wi, out, w in zip(within, outgoing, weights)]
    if math.fsum(A) == 0.0:
        raise NoPredictedLinks("no predicted links touch any sampled block")
    B = [c / w for c, w in zip(common, weights)]
    return _ratio_pair(A, B, theta)


def recall_block_core(
    true_links: Sequence[int],
    common: Sequence[int],
    weights: Sequence[float],
    theta: float = 1.0,
) -> Estimate:
    A = [t / w for t, w in zip(true_links, weights)]
    if math.fsum(A) == 0.0:
        raise DegenerateRatio("all sampled blocks are link-free in the ground truth")
    B = [c / w for c, w in zip(common, weights)]
    return _ratio_pair(A, B, theta)


# ---------------------------------------------------------------------------
# Object-level API: extract per-sample quantities from a Clustering and a
# ClusterSample, resolve weights, and delegate to the cores above.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _SampleStats:
    sizes: tuple[int, ...]
    f_vals: tuple[int, ...]
    within: tuple[int, ...]
    outgoing: tuple[int, ...]
    theta: float


def _sample_stats(pred: Clustering, sample: ClusterSample) -> _SampleStats:
    sizes, f_vals, within, outgoing = [], [], [], []
    for cluster in sample.clusters:
        w, out = block_link_counts(cluster, pred)
        sizes.append(len(cluster))
        # For a block that is a single truth cluster, the within-block
        # predicted-link count equals f(c, pred); asserted as a cross-check.
        fv = f_value(cluster, pred)
        assert fv == w
        f_vals.append(fv)
        within.append(w)
        outgoing.append(out)
    theta = fpc_theta(len(sample), sample.design.fpc)
    return _SampleStats(tuple(sizes), tuple(f_vals), tuple(within), tuple(outgoing), theta)


def _record_probabilities(pred: Clustering, sample: ClusterSample) -> tuple[float, ...]:
    design = sample.design
    if design.probabilities is not None:
        return design.probabilities
    if design.weights == "uniform":
        return tuple(1.0 / pred.universe_size for _ in sample.clusters)
    raise InvalidDesign(
        "record sampling needs uniform weights or explicit per-record "
        "probabilities; size-proportional record probabilities cannot be "
        "normalized from the prediction alone"
    )


def _proportional_weights(sample: ClusterSample) -> tuple[float, ...]:
    design = sample.design
    if design.probabilities is not None:
        return design.probabilities
    if design.weights == "uniform":
        return tuple(1.0 for _ in sample.clusters)
    return tuple(float(len(c)) for c in sample.clusters)


def precision_record(
    pred: Clustering, sample: ClusterSample, p: Optional[Sequence[float]] = None, clamp: bool = False
) -> Estimate:
    stats = _sample_stats(pred, sample)
    probs = tuple(p) if p is not None else _record_probabilities(pred, sample)
    return precision_record_core(
        stats.f_vals, stats.sizes, probs, pred.pair_total, stats.theta, clamp
    )


def recall_record(
    pred: Clustering, sample: ClusterSample, p: Optional[Sequence[float]] = None
) -> Estimate:
    stats = _sample_stats(pred, sample)
    probs = tuple(p) if p is not None else _record_probabilities(pred, sample)
    return recall_record_core(stats.f_vals, stats.sizes, probs, stats.theta)


def precision_cluster(
    pred: Clustering, sample: ClusterSample, p: Optional[Sequence[float]] = None
) -> Estimate:
    stats = _sample_stats(pred, sample)
    weights = tuple(p) if p is not None else _proportional_weights(sample)
    return precision_cluster_core(
        stats.f_vals, stats.sizes, weights, pred.pair_total, pred.universe_size, stats.theta
    )


def recall_cluster(
    pred: Clustering, sample: ClusterSample, p: Optional[Sequence[float]] = None
) -> Estimate:
    stats = _sample_stats(pred, sample)
    weights = tuple(p) if p is not None else _proportional_weights(sample)
    return recall_cluster_core(stats.f_vals, stats.sizes, weights, stats.theta)


def _single_block_quantities(pred: Clustering, sample: ClusterSample):
    """The whole sample is one block: its resolved truth clusters give
    |T_b| and |T_b ∩ P_b|; the prediction gives |P_b| and |P_b⁻|."""
    unique = set(sample.clusters)
    block = frozenset().union(*unique)
    within, outgoing = block_link_counts(block, pred)
    common = sum(f_value(c, pred) for c in unique)
    true_links = sum(comb2(len(c)) for c in unique)
    return within, outgoing, common, true_links


def precision_block(
    pred: Clustering, sample: ClusterSample, p: Optional[Sequence[float]] = None
) -> Estimate:
    if sample.design.sampling_type == "single_block":
        within, outgoing, common, _ = _single_block_quantities(pred, sample)
        return precision_block_core([within], [outgoing], [common], (1.0,))
    stats = _sample_stats(pred, sample)
    weights = tuple(p) if p is not None else _proportional_weights(sample)
    return precision_block_core(
        stats.within, stats.outgoing, stats.f_vals, weights, stats.theta
    )


def recall_block(
    pred: Clustering, sample: ClusterSample, p: Optional[Sequence[float]] = None
) -> Estimate:
    if sample.design.sampling_type == "single_block":
        _, _, common, true_links = _single_block_quantities(pred, sample)
        return recall_block_core([true_links], [common], (1.0,))
    stats = _sample_stats(pred, sample)
    weights = tuple(p) if p is not None else _proportional_weights(sample)
    # With blocks equal to whole truth clusters, |T_b| = C(|b|, 2) and
    # |T_b ∩ P_b| = f(b, pred).
    true_links = tuple(comb2(s) for s in stats.sizes)
    return recall_block_core(true_links, stats.f_vals, weights, stats.theta)


def naive_precision_recall(pred: Clustering, sample: ClusterSample) -> tuple[float, float]:
    """Biased baseline: exact metrics computed on the records of the
    sampled clusters only."""
    unique = sorted(set(sample.clusters), key=sorted)
    members = sorted(m for c in unique for m in c)
    truth_restricted = Clustering.from_sets(unique)
    pred_restricted = restrict(pred, members)
    return exact_precision_recall(truth_restricted, pred_restricted)


def estimate(pred: Clustering, sample: ClusterSample, metric: str) -> Estimate:
    """Dispatch on the design's sampling_type / weights strings."""
    if metric not in ("precision", "recall"):
        raise InvalidDesign(f"unknown metric {metric!r}; valid: precision, recall")
    kind = sample.design.sampling_type
    if kind == "record":
        fn = precision_record if metric == "precision" else recall_record
        return fn(pred, sample)
    if kind == "cluster":
        fn = precision_cluster if metric == "precision" else recall_cluster
        return fn(pred, sample)
    if kind == "cluster_block":
        # Each sampled truth cluster is its own block; recall with cluster
        # blocks coincides with the cluster-sampling recall estimator.
        fn = precision_block if metric == "precision" else recall_cluster
        return fn(pred, sample)
    fn = precision_block if metric == "precision" else recall_block
    return fn(pred, sample)
