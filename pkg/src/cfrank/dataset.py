"""Labeled categorical samples: CSV ingestion, sub-sampling, synthetic data."""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from cfrank.algebra import LiteralSet


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Feature:
    name: str
    values: tuple[str, ...]

    def __post_init__(self):
        if not self.values:
            raise DatasetError(f"feature {self.name!r} has an empty vocabulary")
        if len(set(self.values)) != len(self.values):
            raise DatasetError(f"feature {self.name!r} has duplicate values")


@dataclass(frozen=True)
class Schema:
    features: tuple[Feature, ...]
    labels: tuple[str, ...]
    label_name: str = "class"

    def __post_init__(self):
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise DatasetError("feature names must be unique")
        if not self.labels or len(set(self.labels)) != len(self.labels):
            raise DatasetError("label vocabulary must be nonempty and duplicate-free")

    @property
    def n_features(self) -> int:
        return len(self.features)

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.features]

    def feature_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown feature {name!r}") from None

    def value_id(self, feature: int, value: str) -> int:
        try:
            return self.features[feature].values.index(value)
        except ValueError:
            raise KeyError(f"{value!r} is not a value of feature {self.features[feature].name!r}") from None

    def label_id(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown label {label!r}") from None

    def literals(self, pairs: Iterable[tuple[str, str]]) -> LiteralSet:
        """Build a literal set from ``(feature-name, value)`` pairs."""
        return LiteralSet((self.feature_index(f), self.value_id(self.feature_index(f), v)) for f, v in pairs)

    def render(self, literals: LiteralSet) -> list[tuple[str, str]]:
        return [(self.features[f].name, self.features[f].values[v]) for f, v in literals]


@dataclass(frozen=True, eq=False)
class LabeledSample:
    """A sample S: rows of value ids with one label id each.

    ``X`` has shape ``(n_rows, n_features)`` and ``y`` shape ``(n_rows,)``;
    both are made read-only at construction.
    """

    schema: Schema
    X: np.ndarray
    y: np.ndarray
    provenance: str = field(default="", compare=False)

    def __post_init__(self):
        X = np.array(self.X, dtype=np.int32, copy=True)
        y = np.array(self.y, dtype=np.int32, copy=True)
        if X.ndim != 2:
            X = X.reshape(-1, self.schema.n_features)
        if X.shape[1] != self.schema.n_features:
            raise DatasetError(f"rows have {X.shape[1]} columns, schema has {self.schema.n_features} features")
        if y.shape != (X.shape[0],):
            raise DatasetError("one label per row is required")
        sizes = np.array([len(f.values) for f in self.schema.features], dtype=np.int32)
        if X.size and ((X < 0).any() or (X >= sizes).any()):
            raise DatasetError("value id outside its feature vocabulary")
        if y.size and ((y < 0).any() or (y >= len(self.schema.labels)).any()):
            raise DatasetError("label id outside the label vocabulary")
        conflicts = conflicting_duplicates(X, y)
        if conflicts:
            j, i = conflicts[0]
            raise DatasetError(
                f"rows {j} and {i} have identical features but different labels "
                f"({len(conflicts)} conflicting duplicate(s))"
            )
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledSample):
            return NotImplemented
        return (
            self.schema == other.schema
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )

    __hash__ = None  # type: ignore[assignment]

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.schema.n_features

    @property
    def n_classes(self) -> int:
        return len(self.schema.labels)

    def subset(self, rows: Sequence[int] | np.ndarray, provenance: str | None = None) -> LabeledSample:
        rows = np.asarray(rows, dtype=np.intp)
        return LabeledSample(self.schema, self.X[rows], self.y[rows], provenance or self.provenance)

    def with_instance(self, values: Sequence[int], label: int | str) -> tuple[LabeledSample, int]:
        """Append an out-of-sample instance with an explicit label.

        Returns the extended sample and the row index of the new instance.
        """
        if isinstance(label, str):
            label = self.schema.label_id(label)
        X = np.vstack([self.X, np.asarray(values, dtype=np.int32)[None, :]])
        y = np.append(self.y, label)
        return LabeledSample(self.schema, X, y, self.provenance), self.n_rows

    def instance(self, row: int) -> np.ndarray:
        return self.X[row]

    def label_of(self, row: int) -> str:
        return self.schema.labels[self.y[row]]


def conflicting_duplicates(X: np.ndarray, y: np.ndarray) -> list[tuple[int, int]]:
    """Pairs ``(first_row, row)`` of identical instances carrying different labels."""
    first: dict[bytes, int] = {}
    conflicts = []
    for i, row in enumerate(np.ascontiguousarray(X)):
        j = first.setdefault(row.tobytes(), i)
        if j != i and y[j] != y[i]:
            conflicts.append((j, i))
    return conflicts


def _intern(column: Iterable[str]) -> tuple[tuple[str, ...], list[int]]:
    vocab: dict[str, int] = {}
    ids = [vocab.setdefault(v, len(vocab)) for v in column]
    return tuple(vocab), ids


def from_records(
    header: Sequence[str],
    records: Sequence[Sequence[str]],
    label_column: str | None = None,
    *,
    dedupe_keep_first: bool = False,
    provenance: str = "",
) -> LabeledSample:
    """Intern string records into a labeled sample.

    Vocabularies list values in first-occurrence order.
    """
    header = [h.strip() for h in header]
    if not header or any(h == "" for h in header):
        raise DatasetError("header row is missing or has an empty column name")
    if len(set(header)) != len(header):
        dup = next(h for h in header if header.count(h) > 1)
        raise DatasetError(f"duplicate header column {dup!r}")
    label_column = header[-1] if label_column is None else label_column
    if label_column not in header:
        raise DatasetError(f"label column {label_column!r} not in header")
    if len(header) < 2:
        raise DatasetError("need at least one feature column besides the label")
    if not records:
        raise DatasetError("no data rows")

    for r, record in enumerate(records, start=2):
        if len(record) != len(header):
            raise DatasetError(f"row {r}: expected {len(header)} cells, found {len(record)}")
        for name, cell in zip(header, record):
            if cell.strip() == "":
                raise DatasetError(f"row {r}, column {name!r}: empty cell (missing values are not supported)")

    label_pos = header.index(label_column)
    feature_pos = [i for i in range(len(header)) if i != label_pos]
    features = []
    columns = []
    for i in feature_pos:
        vocab, ids = _intern(rec[i].strip() for rec in records)
        features.append(Feature(header[i], vocab))
        columns.append(ids)
    labels, y = _intern(rec[label_pos].strip() for rec in records)
    schema = Schema(tuple(features), labels, label_column)
    X = np.array(columns, dtype=np.int32).T.reshape(len(records), len(feature_pos))
    y = np.array(y, dtype=np.int32)
    conflicts = conflicting_duplicates(X, y)
    if conflicts:
        if not dedupe_keep_first:
            j, i = conflicts[0]
            raise DatasetError(
                f"rows {j + 2} and {i + 2} have identical features but different labels "
                f"({len(conflicts)} conflicting duplicate(s)); use dedupe_keep_first to keep the first"
            )
        drop = {i for _, i in conflicts}
        keep = [i for i in range(len(y)) if i not in drop]
        X, y = X[keep], y[keep]
    return LabeledSample(schema, X, y, provenance)


def load_csv(
    path: str | Path,
    label_column: str | None = None,
    *,
    dedupe_keep_first: bool = False,
) -> LabeledSample:
    """Load a comma-separated file with a header row.

    Every column other than ``label_column`` (default: the last one) is an
    opaque categorical feature.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise DatasetError(f"{path}: empty file, header row missing")
    return from_records(
        rows[0], rows[1:], label_column, dedupe_keep_first=dedupe_keep_first, provenance=str(path)
    )


def write_csv(sample: LabeledSample, path: str | Path) -> None:
    schema = sample.schema
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([*schema.names, schema.label_name])
        for row, label in zip(sample.X.tolist(), sample.y.tolist()):
            writer.writerow([f.values[v] for f, v in zip(schema.features, row)] + [schema.labels[label]])


def load_toy() -> LabeledSample:
    """The eight-row COMPAS-inspired table shipped with the package (label ``score``)."""
    ref = resources.files("cfrank") / "data" / "compas_toy.csv"
    with resources.as_file(ref) as p:
        return load_csv(p, "score")


def sample(data: LabeledSample, size: int, seed: int | np.random.Generator | None) -> LabeledSample:
    """Draw ``size`` rows uniformly without replacement (all rows if size >= n_rows).

    Row order of the draw is kept as drawn; the schema is unchanged.
    """
    if size < 1:
        raise ValueError("sample size must be at least 1")
    if size >= data.n_rows:
        return data
    rng = np.random.default_rng(seed)
    rows = rng.choice(data.n_rows, size=size, replace=False)
    return data.subset(rows, provenance=f"{data.provenance}[sample {size}]")


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of a synthetic dataset whose label depends only on ``relevant``."""

    dim: int = 20
    values_per_feature: int = 3
    relevant: tuple[int, ...] = (0, 1)
    rows: int = 1000
    seed: int = 0

    def __post_init__(self):
        rel = tuple(int(j) for j in self.relevant)
        object.__setattr__(self, "relevant", rel)
        if self.dim < 1 or self.values_per_feature < 1 or self.rows < 1:
            raise ValueError("dim, values_per_feature and rows must be positive")
        if not rel or len(set(rel)) != len(rel):
            raise ValueError("relevant features must be a nonempty set")
        if any(not 0 <= j < self.dim for j in rel):
            raise ValueError("relevant feature index out of range")

    @classmethod
    def with_random_relevant(cls, n_relevant: int, *, dim: int = 20, values_per_feature: int = 3,
                             rows: int = 1000, seed: int = 0) -> SyntheticSpec:
        if not 1 <= n_relevant <= dim:
            raise ValueError("need 1 <= n_relevant <= dim")
        rng = np.random.default_rng(seed)
        rel = tuple(sorted(rng.choice(dim, size=n_relevant, replace=False).tolist()))
        return cls(dim, values_per_feature, rel, rows, seed)


N_SYNTHETIC_CLASSES = 3


def synthetic_schema(dim: int, values_per_feature: int) -> Schema:
    vocab = tuple(str(v) for v in range(values_per_feature))
    return Schema(
        tuple(Feature(f"f{j + 1}", vocab) for j in range(dim)),
        tuple(str(c) for c in range(N_SYNTHETIC_CLASSES)),
        "class",
    )


def synthetic_label(X: np.ndarray, relevant: Sequence[int]) -> np.ndarray:
    """Label = (sum of value ids over the relevant features) mod 3."""
    return np.asarray(X)[:, list(relevant)].sum(axis=1) % N_SYNTHETIC_CLASSES


def generate_synthetic(spec: SyntheticSpec) -> tuple[LabeledSample, frozenset[int]]:
    rng = np.random.default_rng(spec.seed)
    X = rng.integers(0, spec.values_per_feature, size=(spec.rows, spec.dim), dtype=np.int32)
    schema = synthetic_schema(spec.dim, spec.values_per_feature)
    data = LabeledSample(schema, X, synthetic_label(X, spec.relevant), f"synthetic{spec}")
    return data, frozenset(spec.relevant)


def synthetic_grid(dim: int, values_per_feature: int, relevant: Sequence[int]) -> tuple[LabeledSample, frozenset[int]]:
    """The whole instance space, labeled by the synthetic rule. Only for tiny spaces."""
    X = np.array(list(itertools.product(range(values_per_feature), repeat=dim)), dtype=np.int32)
    schema = synthetic_schema(dim, values_per_feature)
    return LabeledSample(schema, X, synthetic_label(X, relevant), "synthetic-grid"), frozenset(relevant)


def write_synthetic(data: LabeledSample, relevant: Iterable[int], path: str | Path) -> Path:
    """Write the CSV and a sidecar ``<stem>.relevant.txt`` listing relevant feature names."""
    path = Path(path)
    write_csv(data, path)
    sidecar = path.with_suffix(".relevant.txt")
    sidecar.write_text("".join(f"{data.schema.names[j]}\n" for j in sorted(relevant)), encoding="utf-8")
    return sidecar
