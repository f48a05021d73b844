"""Factual and counterfactual explanations of a labeled instance.

All functions take the query ``a`` either as a row index into the sample or
as instance values (matched against the sample rows). Returned lists are
ordered by ``(distance, row)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from cfrank.algebra import (
    LiteralSet,
    counter_set,
    hamming,
    hamming_to_rows,
    instance_literals,
    resolve_row,
)
from cfrank.dataset import LabeledSample

DEFAULT_MAX_FACTUAL_SIZE = 3


class NoCounterfactual(LookupError):
    """Every sample member shares the query's label, so nothing can flip it."""


@dataclass(frozen=True)
class FactualExplanation:
    psi: LiteralSet
    supporting_rows: frozenset[int]


@dataclass(frozen=True)
class CounterfactualExplanation:
    """``psi`` are the literals of ``witness`` where it differs from the query."""

    psi: LiteralSet
    witness: int
    distance: int
    target_label: int

    @property
    def features(self) -> frozenset[int]:
        return self.psi.features


def rows_containing(sample: LabeledSample, psi: LiteralSet) -> np.ndarray:
    """Rows of the sample whose literal set includes ``psi``."""
    mask = np.ones(sample.n_rows, dtype=bool)
    for feature, value in psi:
        mask &= sample.X[:, feature] == value
    return np.flatnonzero(mask)


def is_factual(
    sample: LabeledSample,
    a: int | Sequence[int],
    psi: LiteralSet,
    *,
    require_subset: bool = True,
) -> bool:
    """True iff every row containing ``psi`` carries the label of ``a``.

    With ``require_subset=False`` the test becomes the global variant, where
    ``psi`` need not be part of ``a``. Vacuously true when no row contains psi.
    """
    row = resolve_row(sample, a)
    if require_subset and not psi.is_subset_of_instance(sample.X[row]):
        return False
    hits = rows_containing(sample, psi)
    return bool(np.all(sample.y[hits] == sample.y[row]))


def minimal_factuals(
    sample: LabeledSample,
    a: int | Sequence[int],
    max_size: int = DEFAULT_MAX_FACTUAL_SIZE,
) -> list[FactualExplanation]:
    """Subset-minimal factual explanations (prime implicants w.r.t. the sample).

    Subsets of ``a`` are enumerated breadth-first by size up to ``max_size``;
    any candidate containing an explanation already found is skipped.
    """
    row = resolve_row(sample, a)
    n = sample.n_features
    if not 1 <= max_size <= n:
        raise ValueError(f"max_size must be in [1, {n}]")
    a_vals = sample.X[row]
    label = sample.y[row]
    found: list[FactualExplanation] = []
    found_features: list[frozenset[int]] = []
    for size in range(1, max_size + 1):
        for feats in itertools.combinations(range(n), size):
            fs = frozenset(feats)
            if any(prev <= fs for prev in found_features):
                continue
            psi = LiteralSet((j, a_vals[j]) for j in feats)
            hits = rows_containing(sample, psi)
            if np.all(sample.y[hits] == label):
                found.append(FactualExplanation(psi, frozenset(hits.tolist())))
                found_features.append(fs)
    return found


def counterfactual_of(a: Sequence[int], b: Sequence[int]) -> LiteralSet:
    """The literals of ``b`` on the features where it disagrees with ``a``."""
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        raise ValueError("instances differ in length")
    diff = np.flatnonzero(a != b)
    if diff.size == 0:
        raise ValueError("identical instances have no counterfactual explanation")
    return LiteralSet((j, b[j]) for j in diff.tolist())


def _explanations(sample: LabeledSample, row: int, witnesses: np.ndarray, dist: np.ndarray) -> list[CounterfactualExplanation]:
    a_vals = sample.X[row]
    out = []
    for w in witnesses.tolist():
        out.append(
            CounterfactualExplanation(
                counterfactual_of(a_vals, sample.X[w]), w, int(dist[w]), int(sample.y[w])
            )
        )
    return out


def _ordered_counter_rows(sample: LabeledSample, row: int) -> tuple[np.ndarray, np.ndarray]:
    dist = hamming_to_rows(sample.X, sample.X[row])
    others = counter_set(sample, row)
    # stable sort keeps row order among equal distances
    order = others[np.argsort(dist[others], kind="stable")]
    return order, dist


def all_counterfactuals(sample: LabeledSample, a: int | Sequence[int]) -> list[CounterfactualExplanation]:
    """One explanation per differently-labeled row; empty iff there is none."""
    row = resolve_row(sample, a)
    order, dist = _ordered_counter_rows(sample, row)
    return _explanations(sample, row, order, dist)


def minimal_distance(sample: LabeledSample, a: int | Sequence[int]) -> int:
    row = resolve_row(sample, a)
    others = counter_set(sample, row)
    if others.size == 0:
        raise NoCounterfactual(f"row {row}: all rows share label {sample.label_of(row)!r}")
    return int(hamming_to_rows(sample.X[others], sample.X[row]).min())


def minimal_counterfactuals(sample: LabeledSample, a: int | Sequence[int]) -> list[CounterfactualExplanation]:
    """Counterfactuals from the nearest unlike neighbours of ``a``.

    Raises :class:`NoCounterfactual` when the counter-set is empty.
    """
    row = resolve_row(sample, a)
    others = counter_set(sample, row)
    if others.size == 0:
        raise NoCounterfactual(f"row {row}: all rows share label {sample.label_of(row)!r}")
    dist = hamming_to_rows(sample.X, sample.X[row])
    nearest = others[dist[others] == dist[others].min()]
    return _explanations(sample, row, nearest, dist)


def is_reducible(
    sample: LabeledSample,
    a: int | Sequence[int],
    cf: CounterfactualExplanation,
) -> CounterfactualExplanation | None:
    """A realized counterfactual whose explanation is a proper subset of ``cf.psi``.

    Returns the first such explanation in (distance, row) order, or None when
    ``cf`` is irreducible.
    """
    row = resolve_row(sample, a)
    a_vals = sample.X[row]
    others = counter_set(sample, row)
    target = np.array(a_vals, copy=True)
    for f, v in cf.psi:
        target[f] = v
    rows = sample.X[others]
    # c \ a is a subset of psi iff c agrees with a outside Dag(a, b) and with b inside it
    inside = (rows == a_vals) | (rows == target)
    dist = np.count_nonzero(rows != a_vals, axis=1)
    ok = np.all(inside, axis=1) & (dist < cf.distance)
    if not ok.any():
        return None
    cands = others[ok]
    best = cands[np.lexsort((cands, dist[ok]))[0]]
    return CounterfactualExplanation(
        counterfactual_of(a_vals, sample.X[best]),
        int(best),
        hamming(a_vals, sample.X[best]),
        int(sample.y[best]),
    )


def is_irreducible_def6(sample: LabeledSample, a: int | Sequence[int], psi: LiteralSet) -> bool:
    """Literal irreducibility test: dropping any literal of ``psi`` leaves a set
    still contained in some row sharing the label of ``a``.
    """
    row = resolve_row(sample, a)
    same = sample.y == sample.y[row]
    for literal in psi:
        if not same[rows_containing(sample, psi.without(literal))].any():
            return False
    return True


def inconsistent_with_query(sample: LabeledSample, a: int | Sequence[int], psi: LiteralSet) -> bool:
    """Whether ``a`` extended by ``psi`` assigns two values to some feature."""
    row = resolve_row(sample, a)
    a_lits = instance_literals(sample.X[row])
    return any(a_lits.value_of(f) not in (None, v) for f, v in psi)

