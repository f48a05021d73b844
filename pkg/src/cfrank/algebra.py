"""Literal-set algebra over categorical instances.

Instances are dense integer arrays (one value id per feature). Explanations
are :class:`LiteralSet` objects, i.e. consistent sets of ``(feature, value)``
pairs. Feature indices are 0-based here; rendering by name happens at the
output layer.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable, Iterator, NamedTuple, Sequence

import numpy as np

if TYPE_CHECKING:
    from cfrank.dataset import LabeledSample


class InconsistentLiteralSet(ValueError):
    """Two literals assign different values to the same feature."""


class SchemaMismatch(ValueError):
    """Instances do not share a feature space."""


class UnlabeledInstance(LookupError):
    """The query instance is not a labeled member of the sample."""


class Literal(NamedTuple):
    feature: int
    value: int


class LiteralSet:
    """An immutable, consistent set of literals (at most one per feature)."""

    __slots__ = ("_by_feature",)

    def __init__(self, literals: Iterable[tuple[int, int]] = ()):
        by_feature: dict[int, int] = {}
        for feature, value in literals:
            feature, value = int(feature), int(value)
            if feature < 0:
                raise ValueError(f"negative feature index {feature}")
            if feature in by_feature and by_feature[feature] != value:
                raise InconsistentLiteralSet(
                    f"feature {feature} assigned both {by_feature[feature]} and {value}"
                )
            by_feature[feature] = value
        self._by_feature = dict(sorted(by_feature.items()))

    @classmethod
    def from_mapping(cls, mapping: dict[int, int]) -> LiteralSet:
        return cls(mapping.items())

    def __iter__(self) -> Iterator[Literal]:
        return (Literal(f, v) for f, v in self._by_feature.items())

    def __len__(self) -> int:
        return len(self._by_feature)

    def __contains__(self, item: object) -> bool:
        try:
            feature, value = item  # type: ignore[misc]
        except (TypeError, ValueError):
            return False
        return self._by_feature.get(feature) == value

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LiteralSet):
            return NotImplemented
        return self._by_feature == other._by_feature

    def __hash__(self) -> int:
        return hash(tuple(self._by_feature.items()))

    def __le__(self, other: LiteralSet) -> bool:
        return all(other._by_feature.get(f) == v for f, v in self._by_feature.items())

    def __lt__(self, other: LiteralSet) -> bool:
        return len(self) < len(other) and self <= other

    def __repr__(self) -> str:
        inner = ", ".join(f"({f}, {v})" for f, v in self._by_feature.items())
        return f"LiteralSet({{{inner}}})"

    @property
    def features(self) -> frozenset[int]:
        return frozenset(self._by_feature)

    def value_of(self, feature: int) -> int | None:
        return self._by_feature.get(feature)

    def as_dict(self) -> dict[int, int]:
        return dict(self._by_feature)

    def without(self, literal: tuple[int, int]) -> LiteralSet:
        feature, value = literal
        return LiteralSet((f, v) for f, v in self._by_feature.items() if (f, v) != (feature, value))

    def union(self, other: Iterable[tuple[int, int]]) -> LiteralSet:
        """Union of two literal sets; raises if the result is inconsistent."""
        return LiteralSet([*self, *other])

    def is_subset_of_instance(self, instance: Sequence[int]) -> bool:
        return all(int(instance[f]) == v for f, v in self._by_feature.items())

    def disjoint_from_instance(self, instance: Sequence[int]) -> bool:
        return all(int(instance[f]) != v for f, v in self._by_feature.items())


def is_consistent(literals: Iterable[tuple[int, int]]) -> bool:
    try:
        LiteralSet(literals)
    except InconsistentLiteralSet:
        return False
    return True


def as_instance(values: Sequence[int] | np.ndarray) -> np.ndarray:
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise ValueError("an instance is a one-dimensional sequence of value ids")
    return arr


def instance_literals(instance: Sequence[int]) -> LiteralSet:
    """View a full instance as the literal set of cardinality n."""
    return LiteralSet(enumerate(np.asarray(instance).tolist()))


def project(literals: LiteralSet) -> frozenset[int]:
    """Features mentioned by a literal set, values discarded."""
    return literals.features


def _pair(a: Sequence[int], b: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    a, b = as_instance(a), as_instance(b)
    if a.shape != b.shape:
        raise SchemaMismatch(f"instances of length {a.shape[0]} and {b.shape[0]}")
    return a, b


def agreement(a: Sequence[int], b: Sequence[int]) -> frozenset[int]:
    a, b = _pair(a, b)
    return frozenset(np.flatnonzero(a == b).tolist())


def disagreement(a: Sequence[int], b: Sequence[int]) -> frozenset[int]:
    a, b = _pair(a, b)
    return frozenset(np.flatnonzero(a != b).tolist())


def hamming(a: Sequence[int], b: Sequence[int]) -> int:
    a, b = _pair(a, b)
    return int(np.count_nonzero(a != b))


def hamming_to_rows(rows: np.ndarray, center: Sequence[int]) -> np.ndarray:
    """Hamming distance from ``center`` to every row of a 2-d value matrix."""
    center = as_instance(center)
    if rows.shape[1] != center.shape[0]:
        raise SchemaMismatch(f"rows have {rows.shape[1]} features, center has {center.shape[0]}")
    return np.count_nonzero(rows != center, axis=1)


def resolve_row(sample: LabeledSample, a: int | Sequence[int]) -> int:
    """Row index of a query given either as a row index or as instance values.

    Instances are matched by value; the first matching row wins.
    """
    if isinstance(a, (int, np.integer)):
        if not 0 <= a < sample.n_rows:
            raise UnlabeledInstance(f"row {a} out of range for a sample of {sample.n_rows} rows")
        return int(a)
    values = as_instance(a)
    if values.shape[0] != sample.n_features:
        raise SchemaMismatch(
            f"instance has {values.shape[0]} values, sample has {sample.n_features} features"
        )
    hits = np.flatnonzero(np.all(sample.X == values, axis=1))
    if hits.size == 0:
        raise UnlabeledInstance(
            "instance is not in the sample; add it with LabeledSample.with_instance(values, label)"
        )
    return int(hits[0])


def counter_set(sample: LabeledSample, a: int | Sequence[int]) -> np.ndarray:
    """Row indices whose label differs from the label of ``a``."""
    row = resolve_row(sample, a)
    return np.flatnonzero(sample.y != sample.y[row])
