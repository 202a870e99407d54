"""File formats: membership CSV, record-attribute CSV, YAML configs,
simulation reports, and run manifests.

The membership CSV is the interchange format for every clustering: UTF-8,
header ``mention_id,cluster_id``, one row per mention, RFC-4180 quoting.
Sample files may carry an optional third ``weight`` column with one
explicit sampling weight per cluster. See docs/formats.md for byte-level
examples.
"""

import csv
import hashlib
import json
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import yaml

from . import __version__
from .core import MembershipVector
from .errors import CsvParseError, InvalidDesign, SchemaError
from .simulate import ESTIMATOR_REGISTRY, SimulationConfig, SimulationReport
from .synthetic import RECORD_COLUMNS, NoiseConfig, RecordTable, SyntheticPersonConfig

REPORT_SCHEMA_VERSION = 1
CONFIG_SCHEMA_VERSION = 1


def read_membership_csv(path) -> tuple[MembershipVector, Optional[dict[str, float]]]:
    """Parse a membership CSV; returns the membership vector and, when a
    weight column is present, a cluster_id -> weight map."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise CsvParseError(f"{path}: not valid UTF-8 ({exc})") from None
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise CsvParseError(f"{path}: empty file, expected a header line")
    header = rows[0]
    if header[:2] != ["mention_id", "cluster_id"] or len(header) > 3:
        raise CsvParseError(
            f"{path}: line 1: header must be mention_id,cluster_id[,weight], got {header}"
        )
    has_weight = len(header) == 3
    if has_weight and header[2] != "weight":
        raise CsvParseError(f"{path}: line 1: third column must be named 'weight'")
    entries = []
    weights: dict[str, float] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise CsvParseError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
        mention_id, cluster_id = row[0], row[1]
        if not mention_id:
            raise CsvParseError(f"{path}: line {lineno}: empty mention_id")
        if not cluster_id:
            raise CsvParseError(f"{path}: line {lineno}: empty cluster_id")
        entries.append((mention_id, cluster_id))
        if has_weight:
            try:
                w = float(row[2])
            except ValueError:
                raise CsvParseError(f"{path}: line {lineno}: weight {row[2]!r} is not a number") from None
            if cluster_id in weights and weights[cluster_id] != w:
                raise InvalidDesign(
                    f"{path}: line {lineno}: cluster {cluster_id!r} has conflicting weights"
                )
            weights[cluster_id] = w
    try:
        mv = MembershipVector(entries)
    except Exception as exc:
        raise type(exc)(f"{path}: {exc}") from None
    return mv, (weights if has_weight else None)


def write_membership_csv(path, mv: MembershipVector) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mention_id", "cluster_id"])
        writer.writerows(mv.entries)


def write_records_csv(path, table: RecordTable) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_COLUMNS)
        for i in range(len(table)):
            writer.writerow([table.column(c)[i] for c in RECORD_COLUMNS])


def read_records_csv(path) -> RecordTable:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != RECORD_COLUMNS:
        raise SchemaError(f"{path}: header must be {','.join(RECORD_COLUMNS)}")
    table = RecordTable([], [], [], [], [], [])
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(RECORD_COLUMNS):
            raise CsvParseError(f"{path}: line {lineno}: expected {len(RECORD_COLUMNS)} fields")
        table.mention_id.append(row[0])
        table.first_name.append(row[1])
        table.last_name.append(row[2])
        try:
            table.birth_day.append(int(row[3]))
            table.birth_month.append(int(row[4]))
            table.birth_year.append(int(row[5]))
        except ValueError:
            raise CsvParseError(f"{path}: line {lineno}: birth fields must be integers") from None
    return table


def _require(config: dict, errors: list[str], key: str, typ, default=None):
    if key not in config:
        if default is not None:
            return default
        errors.append(f"missing field {key!r}")
        return None
    value = config.pop(key)
    if typ is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, typ):
        errors.append(f"field {key!r} must be {typ.__name__}, got {type(value).__name__}")
        return None
    return value


def load_simulation_config(path) -> SimulationConfig:
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise SchemaError(f"{path}: config must be a key-value mapping")
    errors: list[str] = []
    version = raw.pop("schema_version", None)
    if version != CONFIG_SCHEMA_VERSION:
        errors.append(f"schema_version must be {CONFIG_SCHEMA_VERSION}, got {version}")
    kwargs = {}
    kwargs["rates"] = tuple(raw.pop("rates", (0.05, 0.10, 0.20)))
    kwargs["sample_sizes"] = tuple(raw.pop("sample_sizes", (100, 200, 400)))
    kwargs["repetitions"] = raw.pop("repetitions", 100)
    kwargs["estimators"] = tuple(raw.pop("estimators", ESTIMATOR_REGISTRY))
    kwargs["master_seed"] = raw.pop("master_seed", 0)
    truth = raw.pop("truth", {})
    if not isinstance(truth, dict):
        errors.append("field 'truth' must be a mapping")
        truth = {}
    kind = truth.pop("kind", "synthetic_clusters")
    if kind == "file":
        kwargs["truth_file"] = truth.pop("path", None)
        if kwargs["truth_file"] is None:
            errors.append("truth.kind=file requires truth.path")
    elif kind == "synthetic_clusters":
        kwargs["truth_num_mentions"] = truth.pop("num_mentions", 100_000)
        kwargs["truth_zipf_exponent"] = float(truth.pop("zipf_exponent", 2.4))
        kwargs["truth_max_cluster_size"] = truth.pop("max_cluster_size", 60)
        kwargs["truth_seed"] = truth.pop("seed", 0)
    else:
        errors.append(f"truth.kind must be 'file' or 'synthetic_clusters', got {kind!r}")
    for key in truth:
        errors.append(f"unknown truth field {key!r}")
    for key in raw:
        errors.append(f"unknown field {key!r}")
    if errors:
        raise SchemaError(f"{path}: invalid simulation config: " + "; ".join(errors))
    return SimulationConfig(**kwargs)


def load_person_config(path) -> tuple[SyntheticPersonConfig, dict]:
    """Parse a synthetic-population config; returns the config plus the
    experiment settings (repetitions, records_per_sample, master_seed)."""
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise SchemaError(f"{path}: config must be a key-value mapping")
    errors: list[str] = []
    version = raw.pop("schema_version", None)
    if version != CONFIG_SCHEMA_VERSION:
        errors.append(f"schema_version must be {CONFIG_SCHEMA_VERSION}, got {version}")
    noise_raw = raw.pop("noise", {})
    if not isinstance(noise_raw, dict):
        errors.append("field 'noise' must be a mapping")
        noise_raw = {}
    experiment = {
        "repetitions": raw.pop("repetitions", 5000),
        "records_per_sample": raw.pop("records_per_sample", 200),
        "master_seed": raw.pop("master_seed", 0),
    }
    kwargs = {}
    if "population_size" in raw:
        kwargs["population_size"] = raw.pop("population_size")
    if "duplication_rate" in raw:
        kwargs["duplication_rate"] = float(raw.pop("duplication_rate"))
    if "name_skew" in raw:
        kwargs["name_skew"] = float(raw.pop("name_skew"))
    for key in raw:
        errors.append(f"unknown field {key!r}")
    known_noise = {f: float(noise_raw.pop(f)) for f in list(noise_raw) if hasattr(NoiseConfig, f)}
    for key in noise_raw:
        errors.append(f"unknown noise field {key!r}")
    if errors:
        raise SchemaError(f"{path}: invalid config: " + "; ".join(errors))
    return SyntheticPersonConfig(noise=NoiseConfig(**known_noise), **kwargs), experiment


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def build_manifest(command: str, config: dict, inputs: list, master_seed: Optional[int]) -> dict:
    now = datetime.now(timezone.utc).isoformat()
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "command": command,
        "tool_version": __version__,
        "config": config,
        "input_digests": {str(p): sha256_file(p) for p in inputs},
        "master_seed": master_seed,
        "started_at": now,
        "finished_at": None,
    }


def finish_manifest(manifest: dict) -> dict:
    manifest["finished_at"] = datetime.now(timezone.utc).isoformat()
    return manifest


def write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


SIMULATION_CSV_HEADER = ("estimator", "rate", "sample_size", "bias", "rmse", "failures")


def write_simulation_csv(path, report: SimulationReport) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SIMULATION_CSV_HEADER)
        for cell in report.cells:
            writer.writerow(
                [
                    cell.estimator,
                    repr(cell.rate),
                    cell.sample_size,
                    repr(cell.bias),
                    repr(cell.rmse),
                    cell.failures,
                ]
            )


def simulation_report_payload(report: SimulationReport) -> dict:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "config": asdict(report.config),
        "cells": [asdict(cell) for cell in report.cells],
    }
