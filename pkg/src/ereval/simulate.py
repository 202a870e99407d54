"""Monte-Carlo validation of the estimators against the exact oracle.

The engine corrupts a ground-truth clustering by misattributing records,
draws cluster samples, runs the requested estimators, and aggregates bias
and RMSE against the exact metrics recomputed per repetition. Repetitions
run on independent seeded streams keyed by (master_seed, cell, repetition),
so reports are byte-identical regardless of worker-thread count.

Hot work happens on dense int64 label arrays (see backend); the estimator
math itself is the same stat-level code the public API uses.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .backend import cluster_link_stats, group_pair_count, pair_overlap
from .core import Clustering, MembershipVector
from .errors import DegenerateError, InvalidDesign, InvalidInput
from .estimators import (
    ClusterSample,
    SamplingDesign,
    precision_block_core,
    precision_record_core,
    recall_record_core,
)
from .rngutil import make_rng

ESTIMATOR_REGISTRY = ("P_naive", "R_naive", "P_record", "R_record", "P_cluster_block")


def inject_misattribution(
    truth: Clustering, rate: float, rng: np.random.Generator
) -> Clustering:
    """Reassign floor(rate*N) distinct records to the cluster of an
    independent uniformly chosen donor record (so larger clusters attract
    more errors). The donor draw is unconditioned: it may land a record
    back in its own cluster."""
    labels = _inject_labels(truth.labels, rate, rng)
    mv_entries = zip(truth.mentions, (truth.cluster_ids[lab] for lab in labels))
    return Clustering.from_membership(MembershipVector(mv_entries))


def _inject_labels(labels: np.ndarray, rate: float, rng: np.random.Generator) -> np.ndarray:
    if not 0.0 <= rate <= 1.0:
        raise InvalidInput(f"misattribution rate must be in [0, 1], got {rate}")
    n = labels.shape[0]
    if n == 0:
        raise InvalidInput("cannot corrupt an empty clustering")
    k = int(rate * n)
    out = labels.copy()
    if k == 0:
        return out
    moved = rng.choice(n, size=k, replace=False)
    donors = rng.integers(0, n, size=k)
    out[moved] = labels[donors]  # donor cluster taken from the original labels
    return out


def sample_clusters(
    truth: Clustering,
    n: int,
    weights: str,
    rng: np.random.Generator,
    sampling_type: str = "cluster",
) -> ClusterSample:
    """Draw n clusters with replacement. cluster_size weighting is realized
    as uniform record draws mapped to their clusters; uniform weighting
    draws clusters equiprobably."""
    if truth.universe_size == 0:
        raise InvalidInput("cannot sample from an empty clustering")
    if n < 1:
        raise InvalidInput("sample size must be >= 1")
    if weights == "cluster_size":
        records = rng.integers(0, truth.universe_size, size=n)
        codes = truth.labels[records]
    elif weights == "uniform":
        codes = rng.integers(0, truth.num_clusters, size=n)
    else:
        raise InvalidDesign(f"unknown weights {weights!r}; valid: uniform, cluster_size")
    clusters = tuple(truth.clusters[int(c)] for c in codes)
    return ClusterSample(clusters, SamplingDesign(sampling_type, weights))


def synthetic_clustered_truth(
    num_mentions: int,
    zipf_exponent: float = 2.4,
    max_cluster_size: int = 60,
    seed: int = 0,
) -> Clustering:
    """Ground-truth clustering with a heavy-tailed cluster size
    distribution (truncated power law), mention ids m0000000..."""
    labels = synthetic_truth_labels(num_mentions, zipf_exponent, max_cluster_size, seed)
    mv = MembershipVector(
        (f"m{i:07d}", f"c{int(labels[i]):07d}") for i in range(num_mentions)
    )
    return Clustering.from_membership(mv)


def synthetic_truth_labels(
    num_mentions: int,
    zipf_exponent: float = 2.4,
    max_cluster_size: int = 60,
    seed: int = 0,
) -> np.ndarray:
    if num_mentions < 1:
        raise InvalidInput("num_mentions must be >= 1")
    rng = make_rng(seed, 0xC1)
    sizes_support = np.arange(1, max_cluster_size + 1)
    probs = 1.0 / sizes_support.astype(np.float64) ** zipf_exponent
    probs /= probs.sum()
    labels = np.empty(num_mentions, dtype=np.int64)
    filled = 0
    code = 0
    while filled < num_mentions:
        batch = rng.choice(sizes_support, size=4096, p=probs)
        for size in batch:
            size = min(int(size), num_mentions - filled)
            labels[filled : filled + size] = code
            filled += size
            code += 1
            if filled == num_mentions:
                break
    return labels


@dataclass(frozen=True)
class SimulationConfig:
    rates: tuple[float, ...] = (0.05, 0.10, 0.20)
    sample_sizes: tuple[int, ...] = (100, 200, 400)
    repetitions: int = 100
    estimators: tuple[str, ...] = ESTIMATOR_REGISTRY
    master_seed: int = 0
    truth_file: Optional[str] = None
    truth_num_mentions: int = 100_000
    truth_zipf_exponent: float = 2.4
    truth_max_cluster_size: int = 60
    truth_seed: int = 0

    def __post_init__(self):
        if self.repetitions < 1:
            raise InvalidInput("repetitions must be >= 1")
        for r in self.rates:
            if not 0.0 <= r <= 1.0:
                raise InvalidInput(f"misattribution rate {r} outside [0, 1]")
        for e in self.estimators:
            if e not in ESTIMATOR_REGISTRY:
                raise InvalidInput(
                    f"unknown estimator {e!r}; valid: {', '.join(ESTIMATOR_REGISTRY)}"
                )


@dataclass(frozen=True)
class ReportCell:
    estimator: str
    rate: float
    sample_size: int
    bias: float
    rmse: float
    estimates: tuple[float, ...]
    oracles: tuple[float, ...]
    failures: int


@dataclass(frozen=True)
class SimulationReport:
    cells: tuple[ReportCell, ...]
    config: SimulationConfig


class LabelInstance:
    """Precomputed index structures over a truth label array, shared by all
    repetitions."""

    def __init__(self, labels: np.ndarray):
        self.labels = labels
        self.n = labels.shape[0]
        self.num_clusters = int(labels.max()) + 1 if self.n else 0
        self.sizes = np.bincount(labels, minlength=self.num_clusters)
        self.order = np.argsort(labels, kind="stable")
        self.starts = np.zeros(self.num_clusters + 1, dtype=np.int64)
        np.cumsum(self.sizes, out=self.starts[1:])
        self.pair_total = int(group_pair_count(labels, self.num_clusters))

    @classmethod
    def from_clustering(cls, truth: Clustering) -> "LabelInstance":
        return cls(truth.labels)

    def member_rows(self, codes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Flattened record indices of the given cluster codes plus segment
        offsets."""
        segs = [self.order[self.starts[c] : self.starts[c + 1]] for c in codes]
        offsets = np.zeros(len(segs) + 1, dtype=np.int64)
        np.cumsum([len(s) for s in segs], out=offsets[1:])
        flat = np.concatenate(segs) if segs else np.empty(0, dtype=np.int64)
        return flat, offsets

    def oracle(self, plabels: np.ndarray) -> tuple[float, float]:
        # prediction may use a larger label space than the truth
        num_pred = int(plabels.max()) + 1 if plabels.shape[0] else 0
        pred_pairs = int(group_pair_count(plabels, num_pred))
        common = int(pair_overlap(self.labels, plabels, num_pred))
        return common / pred_pairs, common / self.pair_total


def _cell_estimates(
    inst: LabelInstance,
    rate: float,
    sample_size: int,
    estimators: Sequence[str],
    rng: np.random.Generator,
) -> tuple[dict[str, float], tuple[float, float]]:
    """One repetition: corrupt, sample, estimate. Returns estimator values
    (missing keys mean the estimator degenerated) and the oracle pair."""
    plabels = _inject_labels(inst.labels, rate, rng)
    oracle = inst.oracle(plabels)

    records = rng.integers(0, inst.n, size=sample_size)
    codes = inst.labels[records]
    flat, offsets = inst.member_rows(codes)
    pred_sizes = np.bincount(plabels, minlength=inst.num_clusters)
    within, outgoing = cluster_link_stats(offsets, plabels[flat], pred_sizes)
    within = [int(v) for v in within]
    outgoing = [int(v) for v in outgoing]
    sizes = [int(inst.sizes[c]) for c in codes]
    pred_pair_total = int(group_pair_count(plabels, inst.num_clusters))

    out: dict[str, float] = {}
    if "P_naive" in estimators or "R_naive" in estimators:
        uniq = np.unique(codes)
        sub, _ = inst.member_rows(uniq)
        t_pairs = int(group_pair_count(inst.labels[sub], inst.num_clusters))
        p_pairs = int(group_pair_count(plabels[sub], inst.num_clusters))
        common = int(pair_overlap(inst.labels[sub], plabels[sub], inst.num_clusters))
        if "P_naive" in estimators and p_pairs > 0:
            out["P_naive"] = common / p_pairs
        if "R_naive" in estimators and t_pairs > 0:
            out["R_naive"] = common / t_pairs
    probs = [1.0 / inst.n] * sample_size
    if "P_record" in estimators:
        try:
            out["P_record"] = precision_record_core(
                within, sizes, probs, pred_pair_total
            ).value
        except DegenerateError:
            pass
    if "R_record" in estimators:
        try:
            out["R_record"] = recall_record_core(within, sizes, probs).value
        except DegenerateError:
            pass
    if "P_cluster_block" in estimators:
        try:
            out["P_cluster_block"] = precision_block_core(
                within, outgoing, within, [float(s) for s in sizes]
            ).value
        except DegenerateError:
            pass
    return out, oracle


def _load_truth_labels(cfg: SimulationConfig) -> np.ndarray:
    if cfg.truth_file is not None:
        from .io import read_membership_csv

        mv, _ = read_membership_csv(cfg.truth_file)
        return Clustering.from_membership(mv).labels
    return synthetic_truth_labels(
        cfg.truth_num_mentions,
        cfg.truth_zipf_exponent,
        cfg.truth_max_cluster_size,
        cfg.truth_seed,
    )


def run_simulation(cfg: SimulationConfig, threads: int = 1) -> SimulationReport:
    inst = LabelInstance(_load_truth_labels(cfg))
    cells = [
        (ci, rate, size)
        for ci, (rate, size) in enumerate(
            (r, s) for r in cfg.rates for s in cfg.sample_sizes
        )
    ]
    tasks = [(ci, rate, size, rep) for ci, rate, size in cells for rep in range(cfg.repetitions)]

    def work(task):
        ci, rate, size, rep = task
        rng = make_rng(cfg.master_seed, ci, rep)
        return task, _cell_estimates(inst, rate, size, cfg.estimators, rng)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = dict(pool.map(work, tasks))
    else:
        results = dict(map(work, tasks))

    report_cells = []
    for ci, rate, size in cells:
        reps = [results[(ci, rate, size, rep)] for rep in range(cfg.repetitions)]
        for est in cfg.estimators:
            oracle_idx = 0 if est.startswith("P_") else 1
            pairs = [
                (vals[est], oracle[oracle_idx]) for vals, oracle in reps if est in vals
            ]
            failures = cfg.repetitions - len(pairs)
            devs = [e - o for e, o in pairs]
            bias = math.fsum(devs) / len(devs) if devs else math.nan
            rmse = math.sqrt(math.fsum(d * d for d in devs) / len(devs)) if devs else math.nan
            report_cells.append(
                ReportCell(
                    estimator=est,
                    rate=rate,
                    sample_size=size,
                    bias=bias,
                    rmse=rmse,
                    estimates=tuple(e for e, _ in pairs),
                    oracles=tuple(o for _, o in pairs),
                    failures=failures,
                )
            )
    return SimulationReport(tuple(report_cells), cfg)


@dataclass(frozen=True)
class BenchmarkResult:
    naive: tuple[float, ...]
    adjusted: tuple[float, ...]
    oracle_precision: float
    oracle_recall: float
    naive_bias: float
    naive_rmse: float
    adjusted_bias: float
    adjusted_rmse: float
    naive_failures: int


def run_benchmark_bias_experiment(
    cfg,
    reps: int,
    records_per_sample: int,
    master_seed: int = 0,
) -> BenchmarkResult:
    """Sample records, recover their truth clusters, and compare the naive
    precision on the benchmark with the adjusted cluster-block precision
    (cluster_size weights) against the exact oracle."""
    from .synthetic import generate_synthetic_population, rule_based_matcher

    if records_per_sample < 1:
        raise InvalidInput("records_per_sample must be >= 1")
    rng = make_rng(master_seed, 0xDA7A)
    table, truth = generate_synthetic_population(cfg, rng)
    pred = rule_based_matcher(table)

    inst = LabelInstance(truth.labels)
    plabels = pred.labels  # both clusterings sort the same mention ids
    oracle_p, oracle_r = inst.oracle(plabels)
    pred_sizes = np.bincount(plabels, minlength=int(plabels.max()) + 1)

    naive, adjusted = [], []
    naive_failures = 0
    for rep in range(reps):
        rrng = make_rng(master_seed, 0xE5, rep)
        records = rrng.integers(0, inst.n, size=records_per_sample)
        codes = inst.labels[records]
        flat, offsets = inst.member_rows(codes)
        within, outgoing = cluster_link_stats(offsets, plabels[flat], pred_sizes)
        sizes = [float(inst.sizes[c]) for c in codes]
        try:
            adjusted.append(
                precision_block_core(
                    [int(v) for v in within], [int(v) for v in outgoing],
                    [int(v) for v in within], sizes,
                ).value
            )
        except DegenerateError:
            adjusted.append(math.nan)
        uniq = np.unique(codes)
        sub, _ = inst.member_rows(uniq)
        p_pairs = int(group_pair_count(plabels[sub], pred_sizes.shape[0]))
        if p_pairs == 0:
            naive_failures += 1
            naive.append(math.nan)
        else:
            common = int(pair_overlap(inst.labels[sub], plabels[sub], pred_sizes.shape[0]))
            naive.append(common / p_pairs)

    def _stats(values, oracle):
        devs = [v - oracle for v in values if not math.isnan(v)]
        bias = math.fsum(devs) / len(devs)
        rmse = math.sqrt(math.fsum(d * d for d in devs) / len(devs))
        return bias, rmse

    nb, nr = _stats(naive, oracle_p)
    ab, ar = _stats(adjusted, oracle_p)
    return BenchmarkResult(
        tuple(naive), tuple(adjusted), oracle_p, oracle_r, nb, nr, ab, ar, naive_failures
    )
