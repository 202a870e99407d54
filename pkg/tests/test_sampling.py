"""Error injection, samplers, synthetic data, and the simulation engine."""

import math

import numpy as np
import pytest

from ereval.core import Clustering
from ereval.errors import InvalidInput, SchemaError
from ereval.rngutil import make_rng
from ereval.simulate import (
    SimulationConfig,
    inject_misattribution,
    run_simulation,
    sample_clusters,
    synthetic_clustered_truth,
    synthetic_truth_labels,
)
from ereval.synthetic import (
    NoiseConfig,
    SyntheticPersonConfig,
    generate_synthetic_population,
    rule_based_matcher,
)
from ereval.unionfind import UnionFind


def test_unionfind_groups():
    uf = UnionFind(4)
    assert uf.union(0, 1)
    assert uf.union(2, 1)
    assert not uf.union(0, 2)
    groups = {frozenset(g) for g in uf.groups().values()}
    assert groups == {frozenset({0, 1, 2}), frozenset({3})}


def test_inject_preserves_universe_and_bounds_moves():
    truth = synthetic_clustered_truth(500, seed=1)
    rng = make_rng(0, 1)
    corrupted = inject_misattribution(truth, 0.2, rng)
    assert corrupted.mentions == truth.mentions
    changed = sum(
        truth.cluster_id_of(m) != corrupted.cluster_id_of(m) for m in truth.mentions
    )
    assert changed <= int(0.2 * 500)


def test_inject_rate_zero_is_identity():
    truth = synthetic_clustered_truth(100, seed=2)
    assert inject_misattribution(truth, 0.0, make_rng(0)) == truth


def test_inject_is_deterministic_per_stream():
    truth = synthetic_clustered_truth(200, seed=3)
    a = inject_misattribution(truth, 0.1, make_rng(7, 1))
    b = inject_misattribution(truth, 0.1, make_rng(7, 1))
    c = inject_misattribution(truth, 0.1, make_rng(7, 2))
    assert a == b
    assert a != c


def test_inject_validates_rate():
    truth = synthetic_clustered_truth(10)
    with pytest.raises(InvalidInput):
        inject_misattribution(truth, 1.5, make_rng(0))


def test_sample_clusters_designs():
    truth = synthetic_clustered_truth(1000, seed=4)
    rng = make_rng(5)
    uniform = sample_clusters(truth, 50, "uniform", rng)
    size = sample_clusters(truth, 50, "cluster_size", rng)
    assert len(uniform) == len(size) == 50
    assert uniform.design.weights == "uniform"
    # size-biased draws should land on larger clusters on average
    mean_u = np.mean([len(c) for c in uniform.clusters])
    mean_s = np.mean([len(c) for c in size.clusters])
    assert mean_s > mean_u


def test_synthetic_truth_labels_shape():
    labels = synthetic_truth_labels(5000, zipf_exponent=2.0, max_cluster_size=30, seed=9)
    assert labels.shape == (5000,)
    sizes = np.bincount(labels)
    assert sizes.max() <= 30
    assert sizes.min() >= 1
    again = synthetic_truth_labels(5000, zipf_exponent=2.0, max_cluster_size=30, seed=9)
    assert np.array_equal(labels, again)


def test_generate_population_shapes_and_truth():
    cfg = SyntheticPersonConfig(population_size=500, duplication_rate=0.2)
    table, truth = generate_synthetic_population(cfg, make_rng(1))
    assert len(table) == 500
    assert truth.universe_size == 500
    assert truth.num_clusters == 400  # 100 duplicates fold into entities
    assert len(set(table.mention_id)) == 500


def test_matcher_permutation_invariant():
    cfg = SyntheticPersonConfig(population_size=300, duplication_rate=0.2)
    table, _ = generate_synthetic_population(cfg, make_rng(2))
    base = rule_based_matcher(table)
    order = np.random.default_rng(0).permutation(len(table))
    shuffled = type(table)(
        *[
            [table.column(c)[i] for i in order]
            for c in ("mention_id", "first_name", "last_name", "birth_day", "birth_month", "birth_year")
        ]
    )
    assert rule_based_matcher(shuffled) == base


def test_matcher_rejects_missing_column():
    cfg = SyntheticPersonConfig(population_size=50)
    table, _ = generate_synthetic_population(cfg, make_rng(3))
    table.first_name.clear()
    with pytest.raises(SchemaError):
        rule_based_matcher(table)


def test_simulation_config_validation():
    with pytest.raises(InvalidInput):
        SimulationConfig(repetitions=0)
    with pytest.raises(InvalidInput):
        SimulationConfig(rates=(1.2,))
    with pytest.raises(InvalidInput):
        SimulationConfig(estimators=("P_magic",))


SMALL = dict(
    rates=(0.0, 0.1),
    sample_sizes=(20, 40),
    repetitions=5,
    truth_num_mentions=2000,
)


def test_simulation_report_invariants():
    report = run_simulation(SimulationConfig(**SMALL))
    assert len(report.cells) == 2 * 2 * 5  # rates x sizes x estimators
    for cell in report.cells:
        assert len(cell.estimates) + cell.failures == 5
        if cell.estimates:
            devs = np.array(cell.estimates) - np.array(cell.oracles)
            assert cell.rmse**2 == pytest.approx(
                cell.bias**2 + np.var(devs), abs=1e-9
            )
        if cell.rate == 0.0:
            # uncorrupted prediction: the target metric is exactly 1
            assert cell.failures == 0
            assert all(o == 1.0 for o in cell.oracles)
            if cell.estimator != "P_record":
                # P_record stays a genuine ratio even for a perfect
                # prediction; the others collapse to 1 exactly
                assert all(v == 1.0 for v in cell.estimates)
                assert cell.bias == 0.0


def test_simulation_threads_do_not_change_results():
    cfg = SimulationConfig(**SMALL)
    seq = run_simulation(cfg, threads=1)
    par = run_simulation(cfg, threads=8)
    assert seq == par


def test_simulation_oracle_matches_brute_force():
    # the per-repetition oracle must equal the exact metrics across the
    # whole corrupted clustering
    from ereval.core import exact_precision_recall
    from ereval.simulate import LabelInstance, _inject_labels

    truth = synthetic_clustered_truth(300, seed=6)
    inst = LabelInstance(truth.labels)
    plabels = _inject_labels(truth.labels, 0.15, make_rng(4, 0))
    corrupted = inject_misattribution(truth, 0.15, make_rng(4, 0))
    assert inst.oracle(plabels) == exact_precision_recall(truth, corrupted)


def test_noise_config_validation():
    with pytest.raises(InvalidInput):
        NoiseConfig(first_name=1.5)
    with pytest.raises(InvalidInput):
        SyntheticPersonConfig(population_size=0)
    with pytest.raises(InvalidInput):
        SyntheticPersonConfig(duplication_rate=1.0)
