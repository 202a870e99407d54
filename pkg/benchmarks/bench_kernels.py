"""Timing comparison of the numba and pure-numpy pair-counting kernels.

Run directly:

    python3 benchmarks/bench_kernels.py [--mentions 2000000] [--repeats 5]

Numbers are median seconds per call after a warmup call (the warmup also
absorbs JIT compilation for the numba path).
"""

import argparse
import statistics
import time

import numpy as np

from ereval import backend
from ereval.simulate import synthetic_truth_labels


def _time(fn, repeats):
    fn()  # warmup / jit compile
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--mentions", type=int, default=2_000_000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    labels = synthetic_truth_labels(args.mentions, seed=0)
    num_clusters = int(labels.max()) + 1
    rng = np.random.default_rng(1)
    plabels = labels.copy()
    moved = rng.choice(args.mentions, size=args.mentions // 10, replace=False)
    plabels[moved] = labels[rng.integers(0, args.mentions, size=moved.size)]
    pred_sizes = np.bincount(plabels, minlength=num_clusters)

    # a 400-cluster sample for the per-cluster link-stats kernel
    order = np.argsort(labels, kind="stable")
    starts = np.zeros(num_clusters + 1, dtype=np.int64)
    np.cumsum(np.bincount(labels, minlength=num_clusters), out=starts[1:])
    codes = rng.integers(0, num_clusters, size=400)
    segs = [order[starts[c] : starts[c + 1]] for c in codes]
    offsets = np.zeros(len(segs) + 1, dtype=np.int64)
    np.cumsum([len(s) for s in segs], out=offsets[1:])
    flat = plabels[np.concatenate(segs)]

    cases = [
        (
            "group_pair_count",
            lambda: backend._group_pair_count_np(labels, num_clusters),
            lambda: backend._group_pair_count_nb(labels, num_clusters),
        ),
        (
            "pair_overlap",
            lambda: backend._pair_overlap_np(labels, plabels, num_clusters),
            lambda: backend._pair_overlap_nb(labels, plabels, num_clusters),
        ),
        (
            "cluster_link_stats",
            lambda: backend._cluster_link_stats_np(offsets, flat, pred_sizes),
            lambda: backend._cluster_link_stats_nb(offsets, flat, pred_sizes),
        ),
    ]

    print(f"mentions={args.mentions} clusters={num_clusters} repeats={args.repeats}")
    print(f"{'kernel':22s} {'numpy':>12s} {'numba':>12s} {'speedup':>9s}")
    for name, np_fn, nb_fn in cases:
        t_np = _time(np_fn, args.repeats)
        if backend.HAVE_NUMBA:
            t_nb = _time(nb_fn, args.repeats)
            print(f"{name:22s} {t_np:12.6f} {t_nb:12.6f} {t_np / t_nb:8.1f}x")
        else:
            print(f"{name:22s} {t_np:12.6f} {'n/a':>12s} {'n/a':>9s}")


if __name__ == "__main__":
    main()
