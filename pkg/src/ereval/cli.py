"""Command-line front end.

Machine-readable JSON goes to stdout; human-readable summaries go to
stderr so the two can be separated in pipelines. Every command emits a run
manifest (input digests, seed, tool version) so results can be reproduced
byte-for-byte. Exit codes: 0 success, 2 input/parse, 3 design error,
4 degenerate estimator, 5 internal.
"""

import csv
import json
import math
import sys
from dataclasses import asdict
from pathlib import Path
from statistics import NormalDist

import click

from . import __version__
from .core import Clustering, MembershipVector, exact_precision_recall, pair_stats
from .errors import EvalError, InvalidDesign
from .estimators import SAMPLING_TYPES, WEIGHT_SCHEMES, ClusterSample, SamplingDesign
from .estimators import estimate as run_estimator
from .estimators import precision_record
from . import io as eio
from .simulate import run_benchmark_bias_experiment, run_simulation


def _fail(exc: EvalError) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(exc.exit_code)


def _emit(payload: dict, out_dir, manifest: dict, json_name: str) -> None:
    payload = dict(payload)
    payload["manifest"] = eio.finish_manifest(manifest)
    click.echo(json.dumps(payload, indent=2, sort_keys=True))
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        eio.write_json(out_dir / json_name, payload)
        eio.write_json(out_dir / "run_manifest.json", payload["manifest"])


@click.group()
@click.version_option(__version__)
def main():
    """Pairwise precision/recall evaluation for entity resolution."""


@main.command("exact")
@click.argument("truth_csv", type=click.Path(exists=True))
@click.argument("pred_csv", type=click.Path(exists=True))
@click.option("--out-dir", type=click.Path(), default=None, help="Directory for JSON report and manifest.")
def cmd_exact(truth_csv, pred_csv, out_dir):
    """Exact pairwise precision/recall of PRED_CSV against TRUTH_CSV."""
    try:
        truth_mv, _ = eio.read_membership_csv(truth_csv)
        pred_mv, _ = eio.read_membership_csv(pred_csv)
        truth = Clustering.from_membership(truth_mv)
        pred = Clustering.from_membership(pred_mv)
        stats = pair_stats(truth, pred)
        precision, recall = exact_precision_recall(truth, pred)
    except EvalError as exc:
        _fail(exc)
    click.echo(
        f"precision {precision:.6f}  recall {recall:.6f}  "
        f"matching {stats.matching_pairs}  predicted {stats.predicted_pairs}  "
        f"common {stats.common_pairs}",
        err=True,
    )
    manifest = eio.build_manifest("exact", {}, [truth_csv, pred_csv], None)
    _emit(
        {
            "schema_version": eio.REPORT_SCHEMA_VERSION,
            "precision": precision,
            "recall": recall,
            "matching_pairs": stats.matching_pairs,
            "predicted_pairs": stats.predicted_pairs,
            "common_pairs": stats.common_pairs,
        },
        out_dir,
        manifest,
        "exact_report.json",
    )


def _sample_from_csv(path, sampling_type, weights, allow_missing, pred_universe):
    mv, weight_col = eio.read_membership_csv(path)
    entries = mv.entries
    if allow_missing:
        entries = tuple(e for e in entries if e[0] in pred_universe)
        if not entries:
            raise InvalidDesign("sample is empty after filtering missing mentions")
    groups: dict[str, set[str]] = {}
    for mention_id, cluster_id in entries:
        groups.setdefault(cluster_id, set()).add(mention_id)
    cluster_ids = sorted(groups)
    probabilities = None
    if weight_col is not None:
        try:
            probabilities = tuple(weight_col[c] for c in cluster_ids)
        except KeyError as exc:
            raise InvalidDesign(f"missing weight for cluster {exc.args[0]!r}") from None
        weights = None
    design = SamplingDesign(sampling_type, weights, probabilities)
    return ClusterSample(tuple(frozenset(groups[c]) for c in cluster_ids), design)


@main.command("estimate")
@click.argument("pred_csv", type=click.Path(exists=True))
@click.argument("sample_csv", type=click.Path(exists=True))
@click.option("--sampling-type", required=True, help=f"One of: {', '.join(SAMPLING_TYPES)}.")
@click.option("--weights", default="uniform", show_default=True, help=f"One of: {', '.join(WEIGHT_SCHEMES)} (ignored when the sample CSV has a weight column).")
@click.option("--metric", required=True, type=click.Choice(["precision", "recall"]))
@click.option("--fpc-t", "fpc_t", type=int, default=None, help="Population size T for the finite-population correction.")
@click.option("--clamp", is_flag=True, help="Clamp the record-sampling precision estimate to [0, 1] (biased).")
@click.option("--confidence", default=0.95, show_default=True)
@click.option("--allow-missing", is_flag=True, help="Drop sample mentions absent from the prediction.")
@click.option("--out-dir", type=click.Path(), default=None)
def cmd_estimate(pred_csv, sample_csv, sampling_type, weights, metric, fpc_t, clamp, confidence, allow_missing, out_dir):
    """Estimate pairwise precision or recall from sampled truth clusters."""
    try:
        pred_mv, _ = eio.read_membership_csv(pred_csv)
        pred = Clustering.from_membership(pred_mv)
        sample = _sample_from_csv(
            sample_csv, sampling_type, weights, allow_missing, set(pred.mentions)
        )
        if fpc_t is not None:
            design = SamplingDesign(
                sample.design.sampling_type, sample.design.weights,
                sample.design.probabilities, fpc_t,
            )
            sample = ClusterSample(sample.clusters, design)
        if clamp and sampling_type == "record" and metric == "precision":
            result = precision_record(pred, sample, clamp=True)
        else:
            result = run_estimator(pred, sample, metric)
    except EvalError as exc:
        _fail(exc)
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    if result.std is None:
        std_text, ci = "NA", None
    else:
        std_text = f"{result.std:.6f}"
        ci = [result.value - z * result.std, result.value + z * result.std]
    ci_text = f"[{ci[0]:.6f}, {ci[1]:.6f}]" if ci else "NA"
    click.echo(
        f"{metric} {result.value:.6f}  std {std_text}  n {result.n}  "
        f"theta {result.theta:.6f}  {int(confidence * 100)}% CI {ci_text}",
        err=True,
    )
    manifest = eio.build_manifest(
        "estimate",
        {
            "sampling_type": sampling_type,
            "weights": weights,
            "metric": metric,
            "fpc_T": fpc_t,
            "clamp": clamp,
            "confidence": confidence,
            "allow_missing": allow_missing,
        },
        [pred_csv, sample_csv],
        None,
    )
    _emit(
        {
            "schema_version": eio.REPORT_SCHEMA_VERSION,
            "metric": metric,
            "value": result.value,
            "std": result.std,
            "n": result.n,
            "theta": result.theta,
            "confidence": confidence,
            "ci": ci,
        },
        out_dir,
        manifest,
        "estimate_report.json",
    )


@main.command("simulate")
@click.argument("config", type=click.Path(exists=True))
@click.option("--out-dir", type=click.Path(), required=True)
@click.option("--threads", default=1, show_default=True)
def cmd_simulate(config, out_dir, threads):
    """Run the Monte-Carlo estimator comparison described by CONFIG."""
    try:
        cfg = eio.load_simulation_config(config)
        manifest = eio.build_manifest("simulate", asdict(cfg), [config], cfg.master_seed)
        report = run_simulation(cfg, threads=threads)
    except EvalError as exc:
        _fail(exc)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    eio.write_simulation_csv(out / "report.csv", report)
    eio.write_json(out / "report.json", eio.simulation_report_payload(report))
    eio.write_json(out / "run_manifest.json", eio.finish_manifest(manifest))
    for cell in report.cells:
        click.echo(
            f"{cell.estimator:16s} rate {cell.rate:.2f} size {cell.sample_size:4d}  "
            f"bias {cell.bias:+.4f}  rmse {cell.rmse:.4f}  failures {cell.failures}",
            err=True,
        )
    click.echo(f"wrote {out / 'report.csv'}", err=True)


@main.command("synth")
@click.argument("config", type=click.Path(exists=True))
@click.option("--out-prefix", type=click.Path(), required=True)
def cmd_synth(config, out_prefix):
    """Generate a synthetic person dataset plus its ground truth."""
    from .rngutil import make_rng
    from .synthetic import generate_synthetic_population

    try:
        cfg, experiment = eio.load_person_config(config)
        rng = make_rng(experiment["master_seed"], 0xDA7A)
        table, truth = generate_synthetic_population(cfg, rng)
    except EvalError as exc:
        _fail(exc)
    prefix = Path(out_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    records_path = Path(f"{prefix}_records.csv")
    truth_path = Path(f"{prefix}_truth.csv")
    eio.write_records_csv(records_path, table)
    eio.write_membership_csv(truth_path, truth.to_membership())
    manifest = eio.build_manifest("synth", asdict(cfg), [config], experiment["master_seed"])
    eio.write_json(Path(f"{prefix}_manifest.json"), eio.finish_manifest(manifest))
    click.echo(
        f"wrote {records_path} ({len(table)} records, {truth.num_clusters} entities)",
        err=True,
    )


@main.command("figure1")
@click.argument("config", type=click.Path(exists=True))
@click.option("--out-dir", type=click.Path(), required=True)
def cmd_figure1(config, out_dir):
    """Naive vs adjusted precision distributions on the synthetic person
    benchmark, ready for external plotting."""
    try:
        cfg, experiment = eio.load_person_config(config)
        result = run_benchmark_bias_experiment(
            cfg,
            reps=experiment["repetitions"],
            records_per_sample=experiment["records_per_sample"],
            master_seed=experiment["master_seed"],
        )
    except EvalError as exc:
        _fail(exc)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "figure1.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["repetition", "naive_precision", "adjusted_precision"])
        for i, (nv, av) in enumerate(zip(result.naive, result.adjusted)):
            writer.writerow([i, "" if math.isnan(nv) else repr(nv), "" if math.isnan(av) else repr(av)])
    manifest = eio.build_manifest("figure1", asdict(cfg), [config], experiment["master_seed"])
    payload = {
        "schema_version": eio.REPORT_SCHEMA_VERSION,
        "oracle_precision": result.oracle_precision,
        "oracle_recall": result.oracle_recall,
        "naive_bias": result.naive_bias,
        "naive_rmse": result.naive_rmse,
        "adjusted_bias": result.adjusted_bias,
        "adjusted_rmse": result.adjusted_rmse,
        "naive_failures": result.naive_failures,
    }
    eio.write_json(out / "figure1.json", payload)
    eio.write_json(out / "run_manifest.json", eio.finish_manifest(manifest))
    click.echo(
        f"oracle precision {result.oracle_precision:.4f}  "
        f"naive bias {result.naive_bias:+.4f} rmse {result.naive_rmse:.4f}  "
        f"adjusted bias {result.adjusted_bias:+.4f} rmse {result.adjusted_rmse:.4f}",
        err=True,
    )


if __name__ == "__main__":
    main()
