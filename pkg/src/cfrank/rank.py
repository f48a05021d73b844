"""Ranking minimal counterfactuals by counterfactual power.

The power of a witness ``b`` for query ``a`` counts the rows inside the
Hamming ball centred on ``b`` with radius ``H(a, b)`` whose label differs
from ``b``'s: the local instances ``b`` could also counter-explain.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from cfrank.algebra import hamming, hamming_to_rows, resolve_row
from cfrank.dataset import LabeledSample
from cfrank.explain import CounterfactualExplanation, minimal_counterfactuals


@dataclass(frozen=True)
class RankedCounterfactual:
    explanation: CounterfactualExplanation
    power: int
    rank: int

    @property
    def witness(self) -> int:
        return self.explanation.witness


@dataclass(frozen=True)
class RankingResult:
    ranked: tuple[RankedCounterfactual, ...]
    unique_optimal: bool
    gap: Fraction | None

    @property
    def optimal(self) -> RankedCounterfactual:
        return self.ranked[0]

    @property
    def powers(self) -> list[int]:
        return [r.power for r in self.ranked]

    def tied_optimal(self) -> list[RankedCounterfactual]:
        """All entries sharing the top power."""
        top = self.ranked[0].power
        return [r for r in self.ranked if r.power == top]


def ball_mask(sample: LabeledSample, a: int | Sequence[int], b: int | Sequence[int]) -> np.ndarray:
    a_row, b_row = resolve_row(sample, a), resolve_row(sample, b)
    radius = hamming(sample.X[a_row], sample.X[b_row])
    return hamming_to_rows(sample.X, sample.X[b_row]) <= radius


def hyperball(sample: LabeledSample, a: int | Sequence[int], b: int | Sequence[int]) -> np.ndarray:
    """Rows within Hamming distance ``H(a, b)`` of ``b``; always includes ``a`` and ``b``."""
    return np.flatnonzero(ball_mask(sample, a, b))


def cf_power(sample: LabeledSample, b: int | Sequence[int], a: int | Sequence[int]) -> int:
    """Number of rows in the ball B(a, b) whose label differs from ``b``'s."""
    b_row = resolve_row(sample, b)
    inside = ball_mask(sample, a, b_row)
    return int(np.count_nonzero(inside & (sample.y != sample.y[b_row])))


def power_gap(ranked: Sequence[RankedCounterfactual] | Sequence[int]) -> Fraction | None:
    """Relative gap ``(p1 - p2) / p1`` between the two strongest entries.

    Accepts ranked entries or raw powers sorted in decreasing order. None when
    fewer than two entries exist.
    """
    powers = [r.power if isinstance(r, RankedCounterfactual) else int(r) for r in ranked]
    if len(powers) < 2:
        return None
    first, second = powers[0], powers[1]
    if second > first:
        raise ValueError("powers must be sorted in decreasing order")
    return Fraction(first - second, first)


def rank_counterfactuals(sample: LabeledSample, a: int, cfs: Sequence[CounterfactualExplanation]) -> RankingResult:
    if not cfs:
        raise ValueError("nothing to rank")
    powers = [cf_power(sample, cf.witness, a) for cf in cfs]
    order = sorted(range(len(cfs)), key=lambda i: (-powers[i], cfs[i].witness))
    ranked = tuple(RankedCounterfactual(cfs[i], powers[i], k) for k, i in enumerate(order, start=1))
    unique = len(ranked) == 1 or ranked[0].power > ranked[1].power
    return RankingResult(ranked, unique, power_gap(ranked))


def rank_minimal(sample: LabeledSample, a: int | Sequence[int]) -> RankingResult:
    """Minimal counterfactuals of ``a`` sorted by (power desc, row asc).

    Raises :class:`~cfrank.explain.NoCounterfactual` when every row shares
    the label of ``a``.
    """
    row = resolve_row(sample, a)
    return rank_counterfactuals(sample, row, minimal_counterfactuals(sample, row))


def dag_frequency_rank(
    sample: LabeledSample, a: int | Sequence[int]
) -> list[tuple[CounterfactualExplanation, int]]:
    """Minimal counterfactuals scored by how many of them share their disagreement set."""
    cfs = minimal_counterfactuals(sample, a)
    counts = Counter(cf.features for cf in cfs)
    scored = [(cf, counts[cf.features]) for cf in cfs]
    scored.sort(key=lambda t: (-t[1], t[0].witness))
    return scored
