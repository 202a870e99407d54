"""Shared helpers: random instance generation and an O(n^2) pair oracle
that materializes every pair explicitly."""

from itertools import combinations
from pathlib import Path

import numpy as np
import pytest

from ereval import Clustering, MembershipVector

FIXTURES = Path(__file__).parent / "fixtures"


def random_clustering(rng: np.random.Generator, max_mentions: int = 20) -> Clustering:
    n = int(rng.integers(2, max_mentions + 1))
    num_clusters = int(rng.integers(1, n + 1))
    labels = rng.integers(0, num_clusters, size=n)
    mv = MembershipVector((f"m{i}", f"c{int(labels[i])}") for i in range(n))
    return Clustering.from_membership(mv)


def random_pair(rng: np.random.Generator, max_mentions: int = 20):
    """A (truth, pred) pair over the same mention universe."""
    truth = random_clustering(rng, max_mentions)
    n = truth.universe_size
    num_pred = int(rng.integers(1, n + 1))
    plabels = rng.integers(0, num_pred, size=n)
    mv = MembershipVector(
        (m, f"p{int(lab)}") for m, lab in zip(truth.mentions, plabels)
    )
    return truth, Clustering.from_membership(mv)


def brute_force_pairs(clustering: Clustering) -> set[frozenset]:
    pairs = set()
    for cluster in clustering.clusters:
        for a, b in combinations(sorted(cluster), 2):
            pairs.add(frozenset((a, b)))
    return pairs


def brute_force_metrics(truth: Clustering, pred: Clustering):
    t = brute_force_pairs(truth)
    p = brute_force_pairs(pred)
    return len(t), len(p), len(t & p)


@pytest.fixture
def fig2():
    truth = Clustering.from_sets([{"1", "2", "3"}, {"4", "5"}, {"6", "7"}, {"8"}])
    pred = Clustering.from_sets([{"1", "4"}, {"2", "3"}, {"5"}, {"6", "7", "8"}])
    return truth, pred
