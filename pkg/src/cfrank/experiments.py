"""Experiment harness: counterfactual distributions, ranking uniqueness, power
gaps, optimal-vs-random metrics and relevant-feature ratios.

Every experiment follows the same loop: for repeat ``r`` draw a sample of
``sample_size`` rows with seed ``seed + r``, evaluate every row of that
sample against it, then average. Reports serialise to one CSV table plus a
JSON summary and are a deterministic function of (data, config, seed).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from statistics import fmean
from typing import Iterator, Sequence

import numpy as np

from cfrank.algebra import counter_set, disagreement, hamming_to_rows
from cfrank.dataset import LabeledSample, SyntheticSpec, generate_synthetic, load_csv, sample
from cfrank.explain import (
    NoCounterfactual,
    all_counterfactuals,
    minimal_counterfactuals,
    minimal_factuals,
)
from cfrank.metrics import compare_optimal_vs_random, metrics_report
from cfrank.rank import RankingResult, rank_minimal

RELEVANT_SAMPLE_SIZES = (500, 1000, 2000, 5000, 10000, 20000)
METRIC_NAMES = ("typicality", "capacity", "universality")
EXPLAIN_MODES = ("all", "minimal", "optimal", "factual")


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str | Path | LabeledSample
    sample_size: int = 1000
    repeats: int = 100
    seed: int = 0
    output: str | Path | None = None
    label: str | None = None
    dedupe_keep_first: bool = False

    def __post_init__(self):
        if self.sample_size < 1:
            raise ValueError("sample_size must be >= 1")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")

    def load(self) -> LabeledSample:
        if isinstance(self.dataset, LabeledSample):
            return self.dataset
        return load_csv(self.dataset, self.label, dedupe_keep_first=self.dedupe_keep_first)

    def describe_dataset(self) -> str:
        if isinstance(self.dataset, LabeledSample):
            return self.dataset.provenance or "<in-memory>"
        return str(self.dataset)

    def as_dict(self) -> dict[str, object]:
        return {"sample_size": self.sample_size, "repeats": self.repeats, "seed": self.seed}


@dataclass
class ExperimentReport:
    experiment: str
    dataset: str
    config: dict[str, object]
    per_repeat: list[dict[str, object]]
    aggregates: dict[str, object]
    table: list[dict[str, object]] = field(default_factory=list)

    def summary(self) -> dict[str, object]:
        return {
            "experiment": self.experiment,
            "dataset": self.dataset,
            "config": self.config,
            "aggregates": self.aggregates,
            "per_repeat": self.per_repeat,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        rows = self.table or self.per_repeat
        buf = io.StringIO()
        if rows:
            columns = list(rows[0])
            for r in rows[1:]:
                columns += [c for c in r if c not in columns]
            writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        return buf.getvalue()

    def write(self, out: str | Path) -> tuple[Path, Path]:
        """Write ``<out>.csv`` and ``<out>.json`` (any suffix on ``out`` is replaced)."""
        out = Path(out)
        csv_path, json_path = out.with_suffix(".csv"), out.with_suffix(".json")
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(self.to_csv(), encoding="utf-8")
        json_path.write_text(self.to_json(), encoding="utf-8")
        return csv_path, json_path


def _mean(values: Sequence[float | Fraction]) -> float | None:
    if not values:
        return None
    return float(sum(Fraction(v) for v in values) / len(values))


def _mean_present(values: Sequence[float | None]) -> float | None:
    present = [v for v in values if v is not None]
    return fmean(present) if present else None


def _repeats(data: LabeledSample, cfg: ExperimentConfig) -> Iterator[tuple[int, LabeledSample]]:
    for r in range(cfg.repeats):
        yield r, sample(data, cfg.sample_size, cfg.seed + r)


def _rankings(S: LabeledSample) -> Iterator[tuple[int, RankingResult | None]]:
    for row in range(S.n_rows):
        try:
            yield row, rank_minimal(S, row)
        except NoCounterfactual:
            yield row, None


def _finish(report: ExperimentReport, cfg: ExperimentConfig) -> ExperimentReport:
    if cfg.output is not None:
        report.write(cfg.output)
    return report


def counterfactual_histogram(S: LabeledSample, a: int) -> np.ndarray:
    """Counts of differently-labeled rows at each Hamming distance 1..n (index d-1)."""
    others = counter_set(S, a)
    dist = hamming_to_rows(S.X[others], S.X[a])
    return np.bincount(dist, minlength=S.n_features + 1)[1:]


def run_distribution(cfg: ExperimentConfig) -> ExperimentReport:
    data = cfg.load()
    n = data.n_features
    per_repeat = []
    for r, S in _repeats(data, cfg):
        total = np.zeros(n, dtype=np.int64)
        empty = 0
        for a in range(S.n_rows):
            hist = counterfactual_histogram(S, a)
            empty += int(hist.sum() == 0)
            total += hist
        per_repeat.append({
            "repeat": r,
            "instances": S.n_rows,
            "no_counterfactual": empty,
            "mean_counts": [float(Fraction(int(c), S.n_rows)) for c in total],
        })
    means = [fmean(rec["mean_counts"][d] for rec in per_repeat) for d in range(n)]
    table = [{"distance": d + 1, "mean_count": means[d]} for d in range(n)]
    report = ExperimentReport(
        "distribution", cfg.describe_dataset(), cfg.as_dict(), per_repeat,
        {"mean_counts": means, "no_counterfactual": fmean(rec["no_counterfactual"] for rec in per_repeat)},
        table,
    )
    return _finish(report, cfg)


def run_uniqueness(cfg: ExperimentConfig) -> ExperimentReport:
    data = cfg.load()
    per_repeat = []
    for r, S in _repeats(data, cfg):
        unique = eligible = empty = 0
        for _, ranking in _rankings(S):
            if ranking is None:
                empty += 1
                continue
            eligible += 1
            unique += ranking.unique_optimal
        per_repeat.append({
            "repeat": r,
            "eligible": eligible,
            "unique_optimal": unique,
            "no_counterfactual": empty,
            "proportion": float(Fraction(unique, eligible)) if eligible else None,
        })
    aggregates = {
        "proportion": _mean_present([rec["proportion"] for rec in per_repeat]),
        "no_counterfactual": fmean(rec["no_counterfactual"] for rec in per_repeat),
    }
    return _finish(ExperimentReport("uniqueness", cfg.describe_dataset(), cfg.as_dict(), per_repeat, aggregates), cfg)


def run_gap(cfg: ExperimentConfig) -> ExperimentReport:
    data = cfg.load()
    per_repeat = []
    for r, S in _repeats(data, cfg):
        gaps = []
        singletons = empty = unique = 0
        for _, ranking in _rankings(S):
            if ranking is None:
                empty += 1
                continue
            unique += ranking.unique_optimal
            if ranking.gap is None:
                singletons += 1
            else:
                gaps.append(ranking.gap)
        per_repeat.append({
            "repeat": r,
            "eligible": len(gaps),
            "singletons": singletons,
            "no_counterfactual": empty,
            "unique_optimal": unique,
            "mean_gap": _mean(gaps),
        })
    aggregates = {
        "mean_gap": _mean_present([rec["mean_gap"] for rec in per_repeat]),
        "singletons": fmean(rec["singletons"] for rec in per_repeat),
        "no_counterfactual": fmean(rec["no_counterfactual"] for rec in per_repeat),
    }
    return _finish(ExperimentReport("gap", cfg.describe_dataset(), cfg.as_dict(), per_repeat, aggregates), cfg)


def run_metric_comparison(cfg: ExperimentConfig) -> ExperimentReport:
    """Optimal vs random minimal counterfactual on the three quality metrics.

    Capacity is only reported for datasets with at least three classes; with
    two it coincides with universality.
    """
    data = cfg.load()
    names = [m for m in METRIC_NAMES if m != "capacity" or data.n_classes >= 3]
    per_repeat = []
    for r, S in _repeats(data, cfg):
        rng = np.random.default_rng(cfg.seed + r)
        opt: dict[str, list[Fraction]] = {m: [] for m in names}
        rnd: dict[str, list[Fraction]] = {m: [] for m in names}
        skipped = empty = 0
        for a, ranking in _rankings(S):
            if ranking is None:
                empty += 1
                continue
            pair = compare_optimal_vs_random(S, a, rng, ranking)
            if pair is None:
                skipped += 1
                continue
            for m in names:
                opt[m].append(getattr(pair[0], m))
                rnd[m].append(getattr(pair[1], m))
        rec: dict[str, object] = {
            "repeat": r,
            "eligible": len(opt[names[0]]),
            "skipped": skipped,
            "no_counterfactual": empty,
        }
        for m in names:
            rec[f"optimal_{m}"] = _mean(opt[m])
            rec[f"random_{m}"] = _mean(rnd[m])
        per_repeat.append(rec)
    aggregates = {
        f"{kind}_{m}": _mean_present([rec[f"{kind}_{m}"] for rec in per_repeat])
        for m in names for kind in ("optimal", "random")
    }
    return _finish(ExperimentReport("metrics", cfg.describe_dataset(), cfg.as_dict(), per_repeat, aggregates), cfg)


def relevant_ratios(S: LabeledSample, relevant: frozenset[int], rows: Sequence[int]) -> list[Fraction]:
    """``|Dag(a, b) ∩ R| / |R|`` for the optimal counterfactual ``b`` of each query row."""
    out = []
    for a in rows:
        try:
            b = rank_minimal(S, a).optimal.witness
        except NoCounterfactual:
            continue
        dag = disagreement(S.X[a], S.X[b])
        out.append(Fraction(len(dag & relevant), len(relevant)))
    return out


def run_relevant_ratio(
    spec: SyntheticSpec,
    cfg: ExperimentConfig,
    sizes: Sequence[int] = RELEVANT_SAMPLE_SIZES,
) -> ExperimentReport:
    """Relevant-feature share of optimal counterfactuals on synthetic data.

    For each dataset size a synthetic sample is generated from ``spec``; each
    repeat evaluates ``cfg.sample_size`` query rows drawn with ``cfg.seed + r``.
    ``cfg.dataset`` is ignored.
    """
    per_repeat = []
    table = []
    for size in sizes:
        data, relevant = generate_synthetic(replace(spec, rows=size))
        size_means = []
        for r in range(cfg.repeats):
            rng = np.random.default_rng(cfg.seed + r)
            k = min(cfg.sample_size, data.n_rows)
            rows = np.sort(rng.choice(data.n_rows, size=k, replace=False))
            ratios = relevant_ratios(data, relevant, rows.tolist())
            mean = _mean(ratios)
            size_means.append(mean)
            per_repeat.append({
                "rows": size,
                "repeat": r,
                "queries": len(ratios),
                "mean_ratio": mean,
                "min_ratio": float(min(ratios)) if ratios else None,
            })
        table.append({"rows": size, "mean_ratio": _mean_present(size_means)})
    aggregates = {
        "relevant": sorted(spec.relevant),
        "mean_ratio_by_rows": {str(t["rows"]): t["mean_ratio"] for t in table},
        "mean_ratio": _mean_present([t["mean_ratio"] for t in table]),
    }
    config = cfg.as_dict() | {"synthetic": {k: v for k, v in asdict(spec).items() if k != "rows"}, "sizes": list(sizes)}
    config["synthetic"]["relevant"] = list(spec.relevant)
    report = ExperimentReport("relevant", f"synthetic(dim={spec.dim})", config, per_repeat, aggregates, table)
    return _finish(report, cfg)


def _render_cf(data: LabeledSample, cf) -> dict[str, object]:
    return {
        "explanation": [list(p) for p in data.schema.render(cf.psi)],
        "witness": cf.witness,
        "distance": cf.distance,
        "target_label": data.schema.labels[cf.target_label],
    }


def explain_instance(
    dataset: str | Path | LabeledSample,
    label_column: str | None,
    row_index: int,
    mode: str = "optimal",
    *,
    max_factual_size: int = 3,
    dedupe_keep_first: bool = False,
) -> dict[str, object]:
    """Explanations of one row as plain data (feature names and values as strings)."""
    if mode not in EXPLAIN_MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {', '.join(EXPLAIN_MODES)}")
    data = dataset if isinstance(dataset, LabeledSample) else load_csv(
        dataset, label_column, dedupe_keep_first=dedupe_keep_first
    )
    if not 0 <= row_index < data.n_rows:
        raise IndexError(f"row {row_index} out of range (sample has {data.n_rows} rows)")
    schema = data.schema
    result: dict[str, object] = {
        "row": row_index,
        "instance": [[f.name, f.values[v]] for f, v in zip(schema.features, data.X[row_index].tolist())],
        "label": data.label_of(row_index),
        "mode": mode,
    }
    if mode == "factual":
        size = min(max_factual_size, data.n_features)
        result["status"] = "ok"
        result["factuals"] = [
            {"explanation": [list(p) for p in schema.render(f.psi)], "support": len(f.supporting_rows)}
            for f in minimal_factuals(data, row_index, size)
        ]
        return result
    if mode == "all":
        cfs = all_counterfactuals(data, row_index)
        result["status"] = "ok" if cfs else "no_counterfactual"
        result["counterfactuals"] = [_render_cf(data, cf) for cf in cfs]
        return result
    try:
        cfs = minimal_counterfactuals(data, row_index)
    except NoCounterfactual:
        result["status"] = "no_counterfactual"
        result["counterfactuals"] = []
        return result
    ranking = rank_minimal(data, row_index)
    result["status"] = "ok"
    if mode == "minimal":
        result["counterfactuals"] = [_render_cf(data, cf) for cf in cfs]
        return result
    best = ranking.optimal
    entry = _render_cf(data, best.explanation)
    entry["power"] = best.power
    entry["metrics"] = metrics_report(data, row_index, best.witness).as_dict()
    result["counterfactuals"] = [entry]
    result["unique_optimal"] = ranking.unique_optimal
    result["gap"] = None if ranking.gap is None else round(float(ranking.gap), 4)
    return result


def render_text(result: dict[str, object]) -> str:
    """Human-readable rendering of :func:`explain_instance` output."""
    lines = [
        f"row {result['row']} ({result['label']}): "
        + ", ".join(f"{f}={v}" for f, v in result["instance"]),
    ]
    if result["status"] == "no_counterfactual":
        lines.append("no counterfactual exists: every row shares this label")
        return "\n".join(lines) + "\n"
    if result["mode"] == "factual":
        if not result["factuals"]:
            lines.append("no minimal factual explanation within the size bound")
        for f in result["factuals"]:
            lines.append("because " + " and ".join(f"{k}={v}" for k, v in f["explanation"]))
        return "\n".join(lines) + "\n"
    for cf in result["counterfactuals"]:
        change = ", ".join(f"{k}={v}" for k, v in cf["explanation"])
        line = f"-> {cf['target_label']} if {change} (witness row {cf['witness']}, distance {cf['distance']}"
        if "power" in cf:
            m = cf["metrics"]
            line += (f", power {cf['power']}, typicality {m['typicality']:.4f}, "
                     f"capacity {m['capacity']:.4f}, universality {m['universality']:.4f}")
        lines.append(line + ")")
    if "unique_optimal" in result:
        lines.append(f"unique optimal: {result['unique_optimal']}; gap: {result['gap']}")
    return "\n".join(lines) + "\n"
