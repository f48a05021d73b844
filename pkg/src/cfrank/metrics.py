"""Typicality, capacity and universality of a counterfactual witness.

All three are exact fractions over the ball B(a, b) of radius ``H(a, b)``
around the witness ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from cfrank.algebra import resolve_row
from cfrank.dataset import LabeledSample
from cfrank.rank import RankingResult, ball_mask, rank_minimal


@dataclass(frozen=True)
class MetricsReport:
    typicality: Fraction
    capacity: Fraction
    universality: Fraction
    ball_size: int
    witness: int = -1

    def as_dict(self, digits: int = 4) -> dict[str, object]:
        return {
            "witness": self.witness,
            "typicality": round(float(self.typicality), digits),
            "capacity": round(float(self.capacity), digits),
            "universality": round(float(self.universality), digits),
            "ball_size": self.ball_size,
        }


def _ball(sample: LabeledSample, a, b) -> tuple[int, int, np.ndarray]:
    a_row, b_row = resolve_row(sample, a), resolve_row(sample, b)
    if sample.y[a_row] == sample.y[b_row]:
        raise ValueError(f"row {b_row} has the same label as the query row {a_row}")
    return a_row, b_row, ball_mask(sample, a_row, b_row)


def typicality(sample: LabeledSample, a: int | Sequence[int], b: int | Sequence[int]) -> Fraction:
    """Share of the witness's whole class that falls inside the ball."""
    _, b_row, inside = _ball(sample, a, b)
    same = sample.y == sample.y[b_row]
    return Fraction(int(np.count_nonzero(same & inside)), int(np.count_nonzero(same)))


def capacity(sample: LabeledSample, a: int | Sequence[int], b: int | Sequence[int]) -> Fraction:
    """Share of the ball the witness can counter-explain (labels other than its own)."""
    _, b_row, inside = _ball(sample, a, b)
    other = sample.y != sample.y[b_row]
    return Fraction(int(np.count_nonzero(other & inside)), int(np.count_nonzero(inside)))


def universality(sample: LabeledSample, a: int | Sequence[int], b: int | Sequence[int]) -> Fraction:
    """Share of the ball carrying the query's label."""
    a_row, _, inside = _ball(sample, a, b)
    same_as_a = sample.y == sample.y[a_row]
    return Fraction(int(np.count_nonzero(same_as_a & inside)), int(np.count_nonzero(inside)))


def metrics_report(sample: LabeledSample, a: int | Sequence[int], b: int | Sequence[int]) -> MetricsReport:
    a_row, b_row, inside = _ball(sample, a, b)
    size = int(np.count_nonzero(inside))
    label_b = sample.y[b_row]
    in_class_b = sample.y == label_b
    return MetricsReport(
        typicality=Fraction(int(np.count_nonzero(in_class_b & inside)), int(np.count_nonzero(in_class_b))),
        capacity=Fraction(int(np.count_nonzero(~in_class_b & inside)), size),
        universality=Fraction(int(np.count_nonzero((sample.y == sample.y[a_row]) & inside)), size),
        ball_size=size,
        witness=b_row,
    )


def random_comparator(ranking: RankingResult, rng: np.random.Generator) -> int | None:
    """Witness drawn uniformly from the minimal counterfactuals below the top power.

    All entries tied at the top power count as optimal and are never drawn.
    """
    top = ranking.ranked[0].power
    pool = [r.witness for r in ranking.ranked if r.power < top]
    if not pool:
        return None
    return pool[int(rng.integers(len(pool)))]


def compare_optimal_vs_random(
    sample: LabeledSample,
    a: int | Sequence[int],
    seed: int | np.random.Generator | None,
    ranking: RankingResult | None = None,
) -> tuple[MetricsReport, MetricsReport] | None:
    """Metrics of the optimal witness and of a random non-optimal minimal one.

    Returns None (comparison skipped) when fewer than two minimal
    counterfactuals exist or all of them tie at the top power.
    """
    row = resolve_row(sample, a)
    ranking = rank_minimal(sample, row) if ranking is None else ranking
    if len(ranking.ranked) < 2:
        return None
    other = random_comparator(ranking, np.random.default_rng(seed))
    if other is None:
        return None
    return metrics_report(sample, row, ranking.optimal.witness), metrics_report(sample, row, other)
