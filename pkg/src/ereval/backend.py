"""Numeric kernels for pair counting over dense label arrays.

Two interchangeable implementations are kept: a numba-jitted path and a
pure-numpy path. Selection happens once at import time from the
``EREVAL_BACKEND`` environment variable ("numba" or "numpy"); the default
is numba when importable. Both paths are exercised by the test suite and
compared by ``benchmarks/bench_kernels.py``.

All labels are dense int64 codes in ``[0, num_groups)``. Counts stay within
int64: for N mentions the largest possible sum is C(N, 2), which fits for
any N below 2**32 (guarded at clustering construction).
"""

import os

import numpy as np


def _group_pair_count_np(labels: np.ndarray, num_groups: int) -> int:
    counts = np.bincount(labels, minlength=num_groups)
    return int(np.sum(counts * (counts - 1) // 2))


def _pair_overlap_np(tlabels: np.ndarray, plabels: np.ndarray, num_pred: int) -> int:
    key = tlabels * np.int64(num_pred) + plabels
    _, counts = np.unique(key, return_counts=True)
    return int(np.sum(counts * (counts - 1) // 2))


def _cluster_link_stats_np(offsets, plab_flat, pred_sizes):
    n = len(offsets) - 1
    within = np.zeros(n, dtype=np.int64)
    outgoing = np.zeros(n, dtype=np.int64)
    for s in range(n):
        seg = plab_flat[offsets[s] : offsets[s + 1]]
        labels, counts = np.unique(seg, return_counts=True)
        within[s] = np.sum(counts * (counts - 1) // 2)
        outgoing[s] = np.sum(counts * (pred_sizes[labels] - counts))
    return within, outgoing


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _group_pair_count_nb(labels, num_groups):  # pragma: no cover - jitted
        counts = np.zeros(num_groups, dtype=np.int64)
        for lab in labels:
            counts[lab] += 1
        total = np.int64(0)
        for c in counts:
            total += c * (c - 1) // 2
        return total

    @numba.njit(cache=True)
    def _pair_overlap_nb(tlabels, plabels, num_pred):  # pragma: no cover - jitted
        key = tlabels * np.int64(num_pred) + plabels
        key = np.sort(key)
        total = np.int64(0)
        run = np.int64(1)
        for i in range(1, key.shape[0]):
            if key[i] == key[i - 1]:
                run += 1
            else:
                total += run * (run - 1) // 2
                run = 1
        if key.shape[0] > 0:
            total += run * (run - 1) // 2
        return total

    @numba.njit(cache=True)
    def _cluster_link_stats_nb(offsets, plab_flat, pred_sizes):  # pragma: no cover
        n = offsets.shape[0] - 1
        within = np.zeros(n, dtype=np.int64)
        outgoing = np.zeros(n, dtype=np.int64)
        for s in range(n):
            seg = np.sort(plab_flat[offsets[s] : offsets[s + 1]].copy())
            i = 0
            while i < seg.shape[0]:
                j = i + 1
                while j < seg.shape[0] and seg[j] == seg[i]:
                    j += 1
                k = np.int64(j - i)
                within[s] += k * (k - 1) // 2
                outgoing[s] += k * (pred_sizes[seg[i]] - k)
                i = j
        return within, outgoing


_requested = os.environ.get("EREVAL_BACKEND", "numba" if HAVE_NUMBA else "numpy")
if _requested not in ("numba", "numpy"):
    raise RuntimeError(f"EREVAL_BACKEND must be 'numba' or 'numpy', got {_requested!r}")
if _requested == "numba" and not HAVE_NUMBA:
    _requested = "numpy"
ACTIVE_BACKEND = _requested

if ACTIVE_BACKEND == "numba":
    group_pair_count = _group_pair_count_nb
    pair_overlap = _pair_overlap_nb
    cluster_link_stats = _cluster_link_stats_nb
else:
    group_pair_count = _group_pair_count_np
    pair_overlap = _pair_overlap_np
    cluster_link_stats = _cluster_link_stats_np
