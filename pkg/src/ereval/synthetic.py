"""Synthetic person records with duplicates, and the three-rule matcher
used to produce an imperfect disambiguation of them.

The generator emits a fixed number of records with first name, last name,
and date-of-birth attributes. A fraction of records are noisy duplicates of
existing entities; ground truth groups each entity's records. Names are
drawn from bundled pools with a Zipf-like frequency skew so that rule
collisions between distinct entities occur at realistic rates.
"""

from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .core import Clustering, MembershipVector
from .errors import InvalidInput, SchemaError
from .unionfind import UnionFind

RECORD_COLUMNS = (
    "mention_id",
    "first_name",
    "last_name",
    "birth_day",
    "birth_month",
    "birth_year",
)

_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class NoiseConfig:
    """Per-attribute corruption probabilities for duplicate records."""

    first_name: float = 0.10
    last_name: float = 0.10
    birth_day: float = 0.10
    birth_month: float = 0.10
    birth_year: float = 0.15

    def __post_init__(self):
        for name in ("first_name", "last_name", "birth_day", "birth_month", "birth_year"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidInput(f"noise.{name} must be in [0, 1], got {v}")


@dataclass(frozen=True)
class SyntheticPersonConfig:
    population_size: int = 10_000
    duplication_rate: float = 0.10
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    name_skew: float = 0.8  # Zipf exponent for name frequency skew
    year_range: tuple[int, int] = (1940, 2005)

    def __post_init__(self):
        if self.population_size < 1:
            raise InvalidInput("population_size must be >= 1")
        if not 0.0 <= self.duplication_rate < 1.0:
            raise InvalidInput("duplication_rate must be in [0, 1)")


@dataclass
class RecordTable:
    """Column-oriented table of person records."""

    mention_id: list[str]
    first_name: list[str]
    last_name: list[str]
    birth_day: list[int]
    birth_month: list[int]
    birth_year: list[int]

    def __len__(self) -> int:
        return len(self.mention_id)

    def column(self, name: str) -> list:
        if name not in RECORD_COLUMNS:
            raise SchemaError(f"unknown record column {name!r}")
        return getattr(self, name)


def _load_pool(filename: str) -> list[str]:
    text = resources.files("ereval.data").joinpath(filename).read_text(encoding="utf-8")
    return text.split()


def _zipf_probs(n: int, skew: float) -> np.ndarray:
    p = 1.0 / np.arange(1, n + 1, dtype=np.float64) ** skew
    return p / p.sum()


def _typo(name: str, rng: np.random.Generator) -> str:
    pos = int(rng.integers(len(name)))
    old = name[pos].lower()
    choices = _ALPHABET.replace(old, "")
    new = choices[int(rng.integers(len(choices)))]
    if pos == 0:
        new = new.upper()
    return name[:pos] + new + name[pos + 1 :]


def _perturb(value: int, low: int, high: int, rng: np.random.Generator) -> int:
    # Redraw uniformly, always producing a different value.
    new = int(rng.integers(low, high))  # high exclusive, domain size high-low-1
    return new if new < value else new + 1


def generate_synthetic_population(
    cfg: SyntheticPersonConfig, rng: np.random.Generator
) -> tuple[RecordTable, Clustering]:
    """Base entities plus noisy duplicates; truth clusters group the
    records of one entity."""
    n_dup = round(cfg.population_size * cfg.duplication_rate)
    n_ent = cfg.population_size - n_dup
    firsts_pool = _load_pool("first_names.txt")
    surs_pool = _load_pool("surnames.txt")
    y0, y1 = cfg.year_range

    fidx = rng.choice(len(firsts_pool), size=n_ent, p=_zipf_probs(len(firsts_pool), cfg.name_skew))
    lidx = rng.choice(len(surs_pool), size=n_ent, p=_zipf_probs(len(surs_pool), cfg.name_skew))
    days = rng.integers(1, 29, size=n_ent)
    months = rng.integers(1, 13, size=n_ent)
    years = rng.integers(y0, y1 + 1, size=n_ent)

    firsts = [firsts_pool[i] for i in fidx]
    lasts = [surs_pool[i] for i in lidx]
    mention_ids = [f"r{i:07d}" for i in range(cfg.population_size)]
    cluster_ids = [f"e{i:07d}" for i in range(n_ent)]

    table = RecordTable(
        mention_id=mention_ids,
        first_name=list(firsts),
        last_name=list(lasts),
        birth_day=[int(d) for d in days],
        birth_month=[int(m) for m in months],
        birth_year=[int(y) for y in years],
    )
    owner = list(range(n_ent))

    dup_entities = rng.choice(n_ent, size=n_dup, replace=False) if n_dup else np.empty(0, int)
    noise = cfg.noise
    for ent in dup_entities:
        ent = int(ent)
        first, last = firsts[ent], lasts[ent]
        day, month, year = int(days[ent]), int(months[ent]), int(years[ent])
        if rng.random() < noise.first_name:
            first = _typo(first, rng)
        if rng.random() < noise.last_name:
            last = _typo(last, rng)
        if rng.random() < noise.birth_day:
            day = _perturb(day, 1, 28, rng)
        if rng.random() < noise.birth_month:
            month = _perturb(month, 1, 12, rng)
        if rng.random() < noise.birth_year:
            year = _perturb(year, y0, y1, rng)
        table.first_name.append(first)
        table.last_name.append(last)
        table.birth_day.append(day)
        table.birth_month.append(month)
        table.birth_year.append(year)
        owner.append(ent)

    mv = MembershipVector(
        (mention_ids[i], cluster_ids[owner[i]]) for i in range(cfg.population_size)
    )
    return table, Clustering.from_membership(mv)


def rule_based_matcher(records: RecordTable) -> Clustering:
    """Transitive closure of three agreement rules: (first, last, year),
    (first, day, year), (last, day, year)."""
    for col in RECORD_COLUMNS:
        if not hasattr(records, col):
            raise SchemaError(f"record table is missing column {col!r}")
        if len(records.column(col)) != len(records):
            raise SchemaError(f"record column {col!r} has a mismatched length")
    n = len(records)
    uf = UnionFind(n)
    keyed = (
        zip(records.first_name, records.last_name, records.birth_year),
        zip(records.first_name, records.birth_day, records.birth_year),
        zip(records.last_name, records.birth_day, records.birth_year),
    )
    for keys in keyed:
        groups: dict[tuple, int] = {}
        for i, key in enumerate(keys):
            j = groups.setdefault(key, i)
            if j != i:
                uf.union(i, j)
    mids = records.mention_id
    return Clustering.from_sets(
        [mids[i] for i in group] for group in uf.groups().values()
    )
