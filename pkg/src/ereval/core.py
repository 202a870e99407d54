"""Clustering data model, exact pair counting, and the cluster
decomposition functions used by the sampling estimators.

A clustering is canonically represented as a membership vector (mention id
to cluster id). Internally mentions are interned to dense integer codes so
pair counting runs on int64 label arrays; all identifiers stay opaque
strings at the API boundary. Iteration order is sorted by id everywhere,
which makes every downstream report byte-reproducible.
"""

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping

import numpy as np

from .backend import group_pair_count, pair_overlap
from .errors import (
    DuplicateMention,
    InvalidInput,
    NoPredictedLinks,
    NoTrueLinks,
    OverflowGuard,
    UniverseMismatch,
    UnknownMention,
)

# Pair counts are kept in int64 kernels; C(N, 2) fits for N < 2**32 but the
# contingency key encoding needs num_clusters**2 < 2**63, so cap N at 2**31.
_MAX_UNIVERSE = 2**31


def comb2(n: int) -> int:
    """Number of unordered pairs among n items, exact integer."""
    if n < 0:
        raise InvalidInput(f"comb2 requires a non-negative count, got {n}")
    return n * (n - 1) // 2


class MembershipVector:
    """Immutable map from mention id to cluster id, iterated in sorted
    mention-id order regardless of insertion order."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[tuple[str, str]]):
        seen: dict[str, str] = {}
        for mention_id, cluster_id in entries:
            mention_id, cluster_id = str(mention_id), str(cluster_id)
            if not cluster_id:
                raise InvalidInput(f"empty cluster_id for mention {mention_id!r}")
            if mention_id in seen:
                raise DuplicateMention(f"mention {mention_id!r} assigned more than once")
            seen[mention_id] = cluster_id
        self._entries: tuple[tuple[str, str], ...] = tuple(sorted(seen.items()))

    @classmethod
    def from_dict(cls, mapping: Mapping[str, str]) -> "MembershipVector":
        return cls(mapping.items())

    @property
    def entries(self) -> tuple[tuple[str, str], ...]:
        return self._entries

    def to_dict(self) -> dict[str, str]:
        return dict(self._entries)

    def __iter__(self) -> Iterator[tuple[str, str]]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, MembershipVector) and self._entries == other._entries

    def __hash__(self) -> int:
        return hash(self._entries)

    def __repr__(self) -> str:
        return f"MembershipVector({len(self._entries)} mentions)"


class Clustering:
    """A partition of a mention universe into disjoint non-empty clusters.

    Mentions are stored sorted; cluster codes are assigned in sorted
    cluster-id order. Instances are immutable and safe to share across
    threads.
    """

    __slots__ = ("_mentions", "_labels", "_cluster_ids", "__dict__")

    def __init__(self, mentions: list[str], labels: np.ndarray, cluster_ids: tuple[str, ...]):
        # Internal constructor: inputs must already be canonical
        # (mentions sorted, labels dense codes aligned with mentions).
        if len(mentions) >= _MAX_UNIVERSE:
            raise OverflowGuard(f"universe of {len(mentions)} mentions exceeds kernel range")
        self._mentions = mentions
        self._labels = labels
        self._cluster_ids = cluster_ids

    @classmethod
    def from_membership(cls, mv: MembershipVector) -> "Clustering":
        mentions = [m for m, _ in mv.entries]
        cluster_ids = tuple(sorted({c for _, c in mv.entries}))
        code = {c: i for i, c in enumerate(cluster_ids)}
        labels = np.fromiter(
            (code[c] for _, c in mv.entries), dtype=np.int64, count=len(mentions)
        )
        return cls(mentions, labels, cluster_ids)

    @classmethod
    def from_sets(cls, clusters: Iterable[Iterable[str]]) -> "Clustering":
        """Build from bare member sets; each cluster is named after its
        smallest member id."""
        entries = []
        for members in clusters:
            members = [str(m) for m in members]
            if not members:
                raise InvalidInput("empty cluster in from_sets")
            cid = min(members)
            entries.extend((m, cid) for m in members)
        return cls.from_membership(MembershipVector(entries))

    def to_membership(self) -> MembershipVector:
        return MembershipVector(
            (m, self._cluster_ids[lab]) for m, lab in zip(self._mentions, self._labels)
        )

    @property
    def universe_size(self) -> int:
        return len(self._mentions)

    @property
    def mentions(self) -> list[str]:
        return self._mentions

    @property
    def num_clusters(self) -> int:
        return len(self._cluster_ids)

    @property
    def cluster_ids(self) -> tuple[str, ...]:
        return self._cluster_ids

    @property
    def labels(self) -> np.ndarray:
        return self._labels

    @cached_property
    def sizes(self) -> np.ndarray:
        """Cluster sizes indexed by label code."""
        return np.bincount(self._labels, minlength=self.num_clusters)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {m: i for i, m in enumerate(self._mentions)}

    @cached_property
    def clusters(self) -> tuple[frozenset[str], ...]:
        """Member sets in sorted cluster-id order."""
        groups: list[list[str]] = [[] for _ in self._cluster_ids]
        for m, lab in zip(self._mentions, self._labels):
            groups[lab].append(m)
        return tuple(frozenset(g) for g in groups)

    @cached_property
    def pair_total(self) -> int:
        """Number of co-clustered pairs, Σ C(size, 2)."""
        return int(group_pair_count(self._labels, self.num_clusters))

    def cluster_id_of(self, mention_id: str) -> str:
        return self._cluster_ids[self._labels[self._position(mention_id)]]

    def members(self, cluster_id: str) -> frozenset[str]:
        try:
            lab = self._cluster_ids.index(cluster_id)
        except ValueError:
            raise UnknownMention(f"unknown cluster id {cluster_id!r}") from None
        return self.clusters[lab]

    def _position(self, mention_id: str) -> int:
        try:
            return self._index[mention_id]
        except KeyError:
            raise UnknownMention(f"unknown mention id {mention_id!r}") from None

    def _positions(self, mention_ids: Iterable[str]) -> np.ndarray:
        return np.fromiter((self._position(m) for m in mention_ids), dtype=np.int64)

    def __contains__(self, mention_id: str) -> bool:
        return mention_id in self._index

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Clustering)
            and self._mentions == other._mentions
            and self._cluster_ids == other._cluster_ids
            and np.array_equal(self._labels, other._labels)
        )

    def __hash__(self) -> int:
        return hash((tuple(self._mentions), self._cluster_ids))

    def __repr__(self) -> str:
        return f"Clustering({self.num_clusters} clusters, N={self.universe_size})"


@dataclass(frozen=True)
class PairStats:
    """Exact pair counts for a (truth, prediction) clustering pair."""

    matching_pairs: int
    predicted_pairs: int
    common_pairs: int

    def __post_init__(self):
        if min(self.matching_pairs, self.predicted_pairs, self.common_pairs) < 0:
            raise InvalidInput("pair counts must be non-negative")
        if self.common_pairs > min(self.matching_pairs, self.predicted_pairs):
            raise InvalidInput("common pairs exceed a marginal pair count")


def clustering_from_membership(mv: MembershipVector) -> Clustering:
    return Clustering.from_membership(mv)


def _check_same_universe(truth: Clustering, pred: Clustering) -> None:
    if truth.mentions != pred.mentions:
        a, b = set(truth.mentions), set(pred.mentions)
        diff = sorted(a.symmetric_difference(b))[:20]
        raise UniverseMismatch(
            f"clusterings cover different mention sets; first differing ids: {diff}"
        )


def pair_stats(truth: Clustering, pred: Clustering) -> PairStats:
    """Count matching, predicted, and common pairs via cluster
    intersections (pairs are never materialized)."""
    _check_same_universe(truth, pred)
    common = int(pair_overlap(truth.labels, pred.labels, pred.num_clusters))
    return PairStats(truth.pair_total, pred.pair_total, common)


def exact_precision_recall(truth: Clustering, pred: Clustering) -> tuple[float, float]:
    """Exact pairwise precision and recall of pred against truth."""
    stats = pair_stats(truth, pred)
    if stats.predicted_pairs == 0:
        raise NoPredictedLinks("prediction contains no co-clustered pairs")
    if stats.matching_pairs == 0:
        raise NoTrueLinks("ground truth contains no co-clustered pairs")
    return (
        stats.common_pairs / stats.predicted_pairs,
        stats.common_pairs / stats.matching_pairs,
    )


def _pred_label_counts(cluster: Iterable[str], pred: Clustering) -> Counter:
    positions = pred._positions(cluster)
    return Counter(pred.labels[positions].tolist())


def f_value(cluster: Iterable[str], pred: Clustering) -> int:
    """Number of predicted links among the members of one truth cluster:
    Σ over predicted clusters of C(intersection size, 2)."""
    return sum(comb2(k) for k in _pred_label_counts(cluster, pred).values())


def g_value(cluster: Iterable[str], pred: Clustering) -> float:
    """f normalized by the total predicted-pair count; sums to exact
    precision over a full partition of the universe."""
    if pred.pair_total == 0:
        raise NoPredictedLinks("prediction contains no co-clustered pairs")
    return f_value(cluster, pred) / pred.pair_total


def restrict(clustering: Clustering, subset: Iterable[str]) -> Clustering:
    """Clustering induced on a subset of the universe; empty intersections
    are dropped."""
    keep = set()
    for m in subset:
        if m not in clustering:
            raise UnknownMention(f"unknown mention id {m!r}")
        keep.add(m)
    mv = MembershipVector(
        (m, c) for m, c in clustering.to_membership() if m in keep
    )
    return Clustering.from_membership(mv)


def block_link_counts(block: Iterable[str], pred: Clustering) -> tuple[int, int]:
    """Predicted links inside a block and predicted links leaving it.

    For each predicted cluster with k members in the block: k choose 2
    links are within, k * (cluster size - k) are outgoing.
    """
    counts = _pred_label_counts(block, pred)
    sizes = pred.sizes
    within = sum(comb2(k) for k in counts.values())
    outgoing = sum(k * (int(sizes[lab]) - k) for lab, k in counts.items())
    return within, outgoing
