"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

The Car Evaluation CSV (1728 rows, header
``buying,maint,doors,persons,lug_boot,safety,class``) is not shipped. Point
``CFRANK_CARS_CSV`` at a copy or place it at ``tests/data/car.csv``.
"""

from __future__ import annotations

import os
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from cfrank.algebra import agreement, counter_set, disagreement, hamming, is_consistent
from cfrank.dataset import SyntheticSpec, generate_synthetic, load_csv, synthetic_grid
from cfrank.explain import counterfactual_of, is_factual, minimal_counterfactuals
from cfrank.experiments import (
    ExperimentConfig,
    run_distribution,
    run_gap,
    run_metric_comparison,
    run_relevant_ratio,
    run_uniqueness,
)
from cfrank.rank import cf_power, rank_minimal
from conftest import ACCEPTANCE_LINES, ROWS
from test_oracle import oracle_mismatches
from test_properties import CHECKS, run_check

CARS_PATH = Path(os.environ.get("CFRANK_CARS_CSV", Path(__file__).parent / "data" / "car.csv"))
RELEVANT_SIZES = (2, 3, 4, 6)


def record(number, ok, detail, elapsed, limit=None):
    within = limit is None or elapsed < limit
    budget = f" / {limit:.0f}s" if limit is not None else ""
    verdict = "PASS" if ok and within else "FAIL"
    ACCEPTANCE_LINES.append(f"criterion {number}: {verdict}  {detail}  [{elapsed:.1f}s{budget}]")
    return ok and within


def load_cars():
    if not CARS_PATH.exists():
        return None
    return load_csv(CARS_PATH, "class")


def synthetic(k, rows):
    return generate_synthetic(SyntheticSpec.with_random_relevant(k, rows=rows, seed=k))


def named(idx):
    inv = {i: n for n, i in ROWS.items()}
    return {inv[int(i)] for i in idx}


def test_criterion_1_running_example(toy, lit):
    t0 = time.perf_counter()
    X = toy.X
    a, b, c, h = (ROWS[k] for k in "abch")
    names = toy.schema.names
    checks = {
        "Ag(a,b)": {names[j] for j in agreement(X[a], X[b])} == {"age", "degree", "recid"},
        "Dag(a,b)": {names[j] for j in disagreement(X[a], X[b])} == {"sex", "race"},
        "H(a,b)": hamming(X[a], X[b]) == 2,
        "H(a,c)": hamming(X[a], X[c]) == 4,
        "S_a": named(counter_set(toy, a)) == set("bcgh"),
        "S_b": named(counter_set(toy, b)) == set("acdefh"),
        "psi_b": counterfactual_of(X[a], X[b]) == lit(sex="female", race="African"),
        "psi_c": counterfactual_of(X[a], X[c]) == lit(age=">45", race="African", degree="F", recid="Yes"),
        "psi_h": counterfactual_of(X[a], X[h]) == lit(age=">45", race="African", recid="Yes"),
        "minimal": named(cf.witness for cf in minimal_counterfactuals(toy, a)) == set("bg"),
        "cf_power(b,a)": cf_power(toy, b, a) == 3,
        "cf_power(g,a)": cf_power(toy, ROWS["g"], a) == 2,
        "optimal": rank_minimal(toy, a).optimal.witness == b,
        "gap": rank_minimal(toy, a).gap == Fraction(1, 3),
    }
    factual = lit(age="<25", race="Caucasian")
    checks["duality"] = is_factual(toy, a, factual) and not is_consistent(
        [*factual, *counterfactual_of(X[a], X[b])]
    )
    elapsed = time.perf_counter() - t0
    failed = [k for k, v in checks.items() if not v]
    detail = f"{len(checks) - len(failed)}/{len(checks)} running-example values exact"
    if failed:
        detail += f"; wrong: {', '.join(failed)}"
    assert record(1, not failed, detail, elapsed, 1.0), detail


def test_criterion_2_oracle_equivalence():
    t0 = time.perf_counter()
    checked, mismatches = oracle_mismatches(1000, seed=2024)
    elapsed = time.perf_counter() - t0
    detail = f"1000 datasets, {checked} queries, {len(mismatches)} mismatches"
    assert record(2, not mismatches, detail, elapsed, 120.0), mismatches[:10]


def test_criterion_3_property_suite():
    t0 = time.perf_counter()
    violations = {name: run_check(name, seed=3, count=200) for name in sorted(CHECKS)}
    elapsed = time.perf_counter() - t0
    bad = {k: v for k, v in violations.items() if v}
    detail = f"{len(violations)} properties x 200 datasets, violations: {bad or 0}"
    assert record(3, not bad, detail, elapsed), detail


def unimodal(values):
    peak = int(np.argmax(values))
    rising = all(x <= y for x, y in zip(values[:peak], values[1 : peak + 1]))
    falling = all(x >= y for x, y in zip(values[peak:], values[peak + 1 :]))
    return rising and falling


def test_criterion_4_cars_histogram_shape():
    t0 = time.perf_counter()
    cars = load_cars()
    if cars is None:
        record(4, False, f"Car Evaluation CSV not found at {CARS_PATH}", time.perf_counter() - t0, 60.0)
        pytest.fail(f"Car Evaluation CSV not available at {CARS_PATH}; set CFRANK_CARS_CSV")
    shape = (cars.n_rows, cars.n_features, cars.n_classes)
    counts = run_distribution(ExperimentConfig(cars, seed=0)).aggregates["mean_counts"]
    elapsed = time.perf_counter() - t0
    ok = shape == (1728, 6, 4) and unimodal(counts)
    detail = f"shape {shape}, mean counts d=1..6 {[round(c, 2) for c in counts]}"
    assert record(4, ok, detail, elapsed, 60.0), detail


@pytest.fixture(scope="module")
def criterion5_runs():
    """Uniqueness and gap on Cars plus the four synthetic sets, repeats=10."""
    t0 = time.perf_counter()
    datasets = {"cars": load_cars()}
    for k in RELEVANT_SIZES:
        datasets[f"synthetic |R|={k}"] = synthetic(k, 5000)[0]
    runs = {}
    for name, data in datasets.items():
        if data is None:
            runs[name] = None
            continue
        cfg = ExperimentConfig(data, sample_size=1000, repeats=10, seed=0)
        runs[name] = (run_uniqueness(cfg).aggregates["proportion"], run_gap(cfg).aggregates["mean_gap"], cfg)
    return runs, time.perf_counter() - t0


def test_criterion_5_unique_optimal(criterion5_runs):
    runs, elapsed = criterion5_runs
    parts, ok = [], True
    for name, run in runs.items():
        if run is None:
            parts.append(f"{name}: data missing")
            ok = False
            continue
        parts.append(f"{name}: {run[0]:.3f}")
        ok &= run[0] is not None and run[0] >= 0.70
    detail = "proportion >= 0.70; " + ", ".join(parts)
    assert record(5, ok, detail, elapsed, 300.0), detail


def test_criterion_6_power_gap(criterion5_runs):
    runs, elapsed = criterion5_runs
    parts, passing = [], 0
    for name, run in runs.items():
        if run is None:
            parts.append(f"{name}: data missing")
            continue
        parts.append(f"{name}: {run[1]:.3f}")
        passing += run[1] is not None and run[1] >= 0.2
    detail = f"gap >= 0.2 on {passing}/5; " + ", ".join(parts)
    assert record(6, passing >= 3, detail, elapsed, 300.0), detail


def test_criterion_7_optimal_vs_random(criterion5_runs):
    runs, _ = criterion5_runs
    t0 = time.perf_counter()
    reports = [run_metric_comparison(run[2]).aggregates for name, run in runs.items() if name != "cars"]
    elapsed = time.perf_counter() - t0
    parts, ok = [], True
    for m in ("typicality", "capacity", "universality"):
        opt = np.mean([r[f"optimal_{m}"] for r in reports])
        rnd = np.mean([r[f"random_{m}"] for r in reports])
        ok &= bool(opt >= rnd - 0.01)
        parts.append(f"{m} {opt:.4f} vs {rnd:.4f}")
    detail = "optimal vs random over synthetic sets: " + ", ".join(parts)
    assert record(7, ok, detail, elapsed), detail


def test_criterion_8_relevant_ratio():
    t0 = time.perf_counter()
    parts, ok = [], True
    for k in RELEVANT_SIZES:
        spec = SyntheticSpec.with_random_relevant(k, rows=20000, seed=k)
        rep = run_relevant_ratio(spec, ExperimentConfig("", sample_size=1000, repeats=1, seed=0), sizes=(20000,))
        mean = rep.aggregates["mean_ratio"]
        low = min(r["min_ratio"] for r in rep.per_repeat)
        ok &= mean < 0.60 and low >= 1 / k
        parts.append(f"|R|={k}: mean {mean:.3f}, min {low:.3f}")
    grid_violations = 0
    for relevant in [(0, 1), (1, 3), (0, 2, 3), (0, 1, 2, 3)]:
        data, R = synthetic_grid(4, 3, relevant)
        for a in range(data.n_rows):
            for cf in minimal_counterfactuals(data, a):
                grid_violations += not disagreement(data.X[a], data.X[cf.witness]) <= R
    ok &= grid_violations == 0
    elapsed = time.perf_counter() - t0
    detail = "; ".join(parts) + f"; full-grid Dag outside R: {grid_violations}"
    assert record(8, ok, detail, elapsed, 300.0), detail


def test_criterion_9_determinism(toy, tmp_path):
    t0 = time.perf_counter()
    data = synthetic(3, 1500)[0]
    spec = SyntheticSpec.with_random_relevant(3, rows=1, seed=3)
    runners = {
        "distribution": run_distribution,
        "uniqueness": run_uniqueness,
        "gap": run_gap,
        "metrics": run_metric_comparison,
    }
    differing = []
    for source_name, source in {"toy": toy, "synthetic": data}.items():
        for name, runner in runners.items():
            outs = []
            for k in range(2):
                stem = tmp_path / f"{source_name}-{name}-{k}"
                runner(ExperimentConfig(source, sample_size=300, repeats=3, seed=11, output=stem))
                outs.append((stem.with_suffix(".csv").read_bytes(), stem.with_suffix(".json").read_bytes()))
            if outs[0] != outs[1]:
                differing.append(f"{source_name}/{name}")
    outs = []
    for k in range(2):
        stem = tmp_path / f"relevant-{k}"
        run_relevant_ratio(spec, ExperimentConfig("", sample_size=100, repeats=2, seed=11, output=stem), (500, 1000))
        outs.append((stem.with_suffix(".csv").read_bytes(), stem.with_suffix(".json").read_bytes()))
    if outs[0] != outs[1]:
        differing.append("relevant")
    elapsed = time.perf_counter() - t0
    detail = f"9 experiment replays, byte-different outputs: {differing or 'none'}"
    assert record(9, not differing, detail, elapsed), detail
