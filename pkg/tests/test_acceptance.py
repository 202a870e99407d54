"""Acceptance criteria.

Each test checks one release criterion end to end and prints a single
PASS/FAIL line (run with -s to see them on success). Tolerances are stated
inline next to each check.
"""

import math
import os
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from ereval.cli import main as cli_main
from ereval.core import (
    Clustering,
    block_link_counts,
    comb2,
    exact_precision_recall,
    f_value,
    g_value,
    pair_stats,
    restrict,
)
from ereval.estimators import (
    ClusterSample,
    SamplingDesign,
    estimate,
    precision_block_core,
    ratio_estimate,
    ratio_variance,
)
from ereval.simulate import (
    LabelInstance,
    SimulationConfig,
    _inject_labels,
    run_benchmark_bias_experiment,
    run_simulation,
    synthetic_truth_labels,
)
from ereval.synthetic import SyntheticPersonConfig
from ereval.backend import cluster_link_stats, group_pair_count

from conftest import random_pair

THREADS = min(8, os.cpu_count() or 1)


def _verdict(name: str, ok: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    print(line, file=sys.stderr, flush=True)
    assert ok, line


@pytest.fixture(scope="module")
def default_report():
    return run_simulation(SimulationConfig(), threads=THREADS)


def test_criterion_1_exact_fixture_value_and_speed(fig2):
    # hand-checked fixture: precision = recall = 2/5 exactly, and the exact
    # path must cost well under 1 ms per call after warmup
    truth, pred = fig2
    p, r = exact_precision_recall(truth, pred)
    t0 = time.perf_counter()
    for _ in range(100):
        exact_precision_recall(truth, pred)
    per_call = (time.perf_counter() - t0) / 100
    ok = p == 0.4 and r == 0.4 and per_call < 1e-3
    _verdict(
        "1 exact fixture",
        ok,
        f"precision={p} recall={r} per_call={per_call * 1e6:.1f}us",
    )


def test_criterion_2_census_identities():
    # on 200 random instances (<= 20 mentions) the three design identities,
    # evaluated as exact weighted sums over the whole population, must
    # reproduce the exact metrics to 1e-12 for uniform and size-weighted
    # draw probabilities; the whole sweep stays under 5 s
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    checked = 0
    for _ in range(200):
        truth, pred = random_pair(rng)
        stats = pair_stats(truth, pred)
        if stats.predicted_pairs == 0 or stats.matching_pairs == 0:
            continue
        checked += 1
        p_exact, r_exact = exact_precision_recall(truth, pred)
        clusters = truth.clusters
        N = truth.universe_size

        # record draws, one mention i with probability p_i: expectations
        # are evaluated exactly as Σ_i p_i X_i; a random positive p shows
        # that the draw probabilities cancel term by term
        pm = rng.uniform(0.1, 1.0, size=N)
        pm /= pm.sum()
        starts = {}
        pos = 0
        for c in clusters:
            starts[id(c)] = pos
            pos += len(c)
        p_record = math.fsum(
            pm[starts[id(c)] + j] * g_value(c, pred) / (pm[starts[id(c)] + j] * len(c))
            for c in clusters
            for j in range(len(c))
        )
        r_record_num = 2 * math.fsum(
            pm[starts[id(c)] + j] * f_value(c, pred) / (len(c) * pm[starts[id(c)] + j])
            for c in clusters
            for j in range(len(c))
        )
        r_record_den = math.fsum(
            pm[starts[id(c)] + j] * (len(c) - 1) / pm[starts[id(c)] + j]
            for c in clusters
            for j in range(len(c))
        )
        worst = max(worst, abs(p_record - p_exact))
        worst = max(worst, abs(r_record_num / r_record_den - r_exact))

        raw = {
            "uniform": [1.0] * len(clusters),
            "cluster_size": [float(len(c)) for c in clusters],
        }
        for weights in raw.values():
            total = math.fsum(weights)
            pc = [w / total for w in weights]

            # cluster draws with probability pc[k]
            e_g = math.fsum(q * g_value(c, pred) / q for q, c in zip(pc, clusters))
            e_size = math.fsum(q * len(c) / q for q, c in zip(pc, clusters))
            e_f = math.fsum(q * f_value(c, pred) / q for q, c in zip(pc, clusters))
            e_pairs = math.fsum(q * comb2(len(c)) / q for q, c in zip(pc, clusters))
            worst = max(worst, abs(N * e_g / e_size - p_exact))
            worst = max(worst, abs(e_f / e_pairs - r_exact))

            # block draws: blocks are unions of truth clusters; every
            # cross-block predicted link is halved between its two blocks
            k = int(rng.integers(1, len(clusters) + 1))
            assignment = rng.integers(0, k, size=len(clusters))
            blocks = [
                frozenset().union(*(clusters[j] for j in np.flatnonzero(assignment == b)))
                for b in range(k)
                if np.any(assignment == b)
            ]
            e_common, e_pden, e_tlinks = 0.0, 0.0, 0.0
            for b in blocks:
                within, outgoing = block_link_counts(b, pred)
                tw, _ = block_link_counts(b, truth)
                common = pair_stats(
                    restrict(truth, b), restrict(pred, b)
                ).common_pairs
                e_common += common
                e_pden += within + 0.5 * outgoing
                e_tlinks += tw
            worst = max(worst, abs(e_common / e_pden - p_exact))
            worst = max(worst, abs(e_common / e_tlinks - r_exact))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 5.0 and checked >= 150
    _verdict(
        "2 census identities",
        ok,
        f"instances={checked} worst_abs_err={worst:.2e} elapsed={elapsed:.2f}s",
    )


def test_criterion_3_ratio_engine_hand_values():
    # A=(2,4), B=(1,3), theta=1: estimate 19/27 and variance 1/81, both
    # derived independently with exact rational arithmetic; tolerance 1e-15
    est = ratio_estimate([2, 4], [1, 3])
    var = ratio_variance([2, 4], [1, 3])
    ok = abs(est - float(Fraction(19, 27))) <= 1e-15 and abs(
        var - float(Fraction(1, 81))
    ) <= 1e-15
    _verdict("3 ratio engine", ok, f"estimate={est!r} variance={var!r}")


def test_criterion_4_simulation_pattern(default_report):
    # full default study (3 rates x 3 sizes x 100 reps on a 100k-mention
    # truth); the qualitative pattern must hold cell by cell:
    #   a) adjusted P_cluster_block is nearly unbiased (|bias| <= 0.01)
    #   b) naive precision bias grows with the error rate (>= 0.05 at 5%,
    #      >= 0.15 at 20%) and is roughly constant in the sample size
    #      (spread <= 0.03)
    #   c) record-sampling precision has higher rmse than the adjusted
    #      cluster-block precision in every cell
    #   d) record-sampling recall has rmse no worse than naive recall
    #   e) rmse is monotone nonincreasing in the sample size
    cells = {(c.estimator, c.rate, c.sample_size): c for c in default_report.cells}
    cfg = default_report.config
    problems = []
    for rate in cfg.rates:
        for size in cfg.sample_sizes:
            pcb = cells[("P_cluster_block", rate, size)]
            if abs(pcb.bias) > 0.01:
                problems.append(f"a: PCB bias {pcb.bias:+.4f} @ {rate}/{size}")
            nb = cells[("P_naive", rate, size)].bias
            floor = {0.05: 0.05, 0.10: 0.05, 0.20: 0.15}[rate]
            if nb < floor:
                problems.append(f"b: naive bias {nb:+.4f} < {floor} @ {rate}/{size}")
            if cells[("P_record", rate, size)].rmse <= pcb.rmse:
                problems.append(f"c: P_record rmse not above PCB @ {rate}/{size}")
            if (
                cells[("R_record", rate, size)].rmse
                > cells[("R_naive", rate, size)].rmse
            ):
                problems.append(f"d: R_record rmse above R_naive @ {rate}/{size}")
        biases = [cells[("P_naive", rate, s)].bias for s in cfg.sample_sizes]
        if max(biases) - min(biases) > 0.03:
            problems.append(f"b: naive bias spread {max(biases) - min(biases):.4f} @ {rate}")
        for est in cfg.estimators:
            rmses = [cells[(est, rate, s)].rmse for s in cfg.sample_sizes]
            if any(b > a for a, b in zip(rmses, rmses[1:])):
                problems.append(f"e: {est} rmse not monotone @ {rate}: {rmses}")
    _verdict("4 simulation pattern", not problems, "; ".join(problems) or "all cells")


def test_criterion_5_person_benchmark_bias():
    # 5000-repetition person benchmark: adjusted estimator |bias| <= 0.02,
    # naive estimator overestimates precision by at least +0.2
    result = run_benchmark_bias_experiment(
        SyntheticPersonConfig(), reps=5000, records_per_sample=200, master_seed=0
    )
    ok = abs(result.adjusted_bias) <= 0.02 and result.naive_bias >= 0.2
    _verdict(
        "5 person benchmark",
        ok,
        f"adjusted_bias={result.adjusted_bias:+.4f} naive_bias={result.naive_bias:+.4f} "
        f"oracle_precision={result.oracle_precision:.4f}",
    )


def test_criterion_6_ci_coverage():
    # nominal 95% intervals from the adjusted precision estimator must
    # cover the per-repetition oracle between 90% and 98% of the time
    # (1000 repetitions, 10% misattribution, 400 records per sample)
    labels = synthetic_truth_labels(20_000, seed=3)
    inst = LabelInstance(labels)
    rng = np.random.default_rng(99)
    hits, total = 0, 0
    for _ in range(1000):
        plabels = _inject_labels(inst.labels, 0.10, rng)
        oracle_p, _ = inst.oracle(plabels)
        records = rng.integers(0, inst.n, size=400)
        codes = inst.labels[records]
        flat, offsets = inst.member_rows(codes)
        pred_sizes = np.bincount(plabels, minlength=inst.num_clusters)
        within, outgoing = cluster_link_stats(offsets, plabels[flat], pred_sizes)
        sizes = [float(inst.sizes[c]) for c in codes]
        est = precision_block_core(
            [int(v) for v in within], [int(v) for v in outgoing],
            [int(v) for v in within], sizes,
        )
        if est.std is None:
            continue
        total += 1
        if est.value - 1.96 * est.std <= oracle_p <= est.value + 1.96 * est.std:
            hits += 1
    coverage = hits / total
    ok = 0.90 <= coverage <= 0.98 and total >= 990
    _verdict("6 ci coverage", ok, f"coverage={coverage:.3f} n={total}")


def test_criterion_7_thread_determinism(tmp_path):
    # the simulate command must produce byte-identical reports regardless
    # of the thread count
    from click.testing import CliRunner

    config = tmp_path / "sim.yaml"
    config.write_text(
        "schema_version: 1\n"
        "rates: [0.05, 0.2]\n"
        "sample_sizes: [50, 100]\n"
        "repetitions: 10\n"
        "master_seed: 5\n"
        "truth:\n"
        "  kind: synthetic_clusters\n"
        "  num_mentions: 20000\n"
        "  seed: 2\n",
        encoding="utf-8",
    )
    runner = CliRunner()
    out1, out8 = tmp_path / "t1", tmp_path / "t8"
    r1 = runner.invoke(cli_main, ["simulate", str(config), "--out-dir", str(out1), "--threads", "1"])
    r8 = runner.invoke(cli_main, ["simulate", str(config), "--out-dir", str(out8), "--threads", "8"])
    same = all(
        (out1 / name).read_bytes() == (out8 / name).read_bytes()
        for name in ("report.csv", "report.json")
    )
    ok = r1.exit_code == 0 and r8.exit_code == 0 and same
    _verdict("7 thread determinism", ok, "report.csv and report.json byte-identical")


def test_criterion_8_design_equivalences():
    # on 100 random fixtures: uniform record sampling equals cluster-size
    # weighted cluster sampling, and cluster-block recall equals cluster
    # recall, both to 1e-12 on the same sampled clusters
    rng = np.random.default_rng(77)
    worst = 0.0
    checked = 0
    for _ in range(100):
        truth, pred = random_pair(rng)
        if pair_stats(truth, pred).common_pairs == 0:
            continue
        clusters = truth.clusters
        draw = [clusters[int(i)] for i in rng.integers(0, len(clusters), size=6)]
        pairs = [
            (
                ClusterSample(tuple(draw), SamplingDesign("record", "uniform")),
                ClusterSample(tuple(draw), SamplingDesign("cluster", "cluster_size")),
                ("precision", "recall"),
            ),
            (
                ClusterSample(tuple(draw), SamplingDesign("cluster_block", "uniform")),
                ClusterSample(tuple(draw), SamplingDesign("cluster", "uniform")),
                ("recall",),
            ),
        ]
        for left, right, metrics in pairs:
            for metric in metrics:
                try:
                    a = estimate(pred, left, metric)
                    b = estimate(pred, right, metric)
                except Exception:
                    continue
                checked += 1
                worst = max(worst, abs(a.value - b.value))
                if a.std is not None and b.std is not None:
                    worst = max(worst, abs(a.std - b.std))
    ok = worst <= 1e-12 and checked >= 100
    _verdict("8 design equivalences", ok, f"checks={checked} worst_abs_err={worst:.2e}")
