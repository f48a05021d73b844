"""Command line entry point: ``cfrank <subcommand> --data file.csv ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from cfrank import experiments
from cfrank.dataset import DatasetError, SyntheticSpec, generate_synthetic, write_synthetic
from cfrank.experiments import ExperimentConfig


def _common(p: argparse.ArgumentParser, *, data_required: bool = True) -> None:
    p.add_argument("--data", required=data_required, help="CSV file with a header row")
    p.add_argument("--label", default=None, help="label column (default: last column)")
    p.add_argument("--sample-size", type=int, default=1000)
    p.add_argument("--repeats", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output stem; writes <out>.csv and <out>.json")
    p.add_argument("--dedupe-keep-first", action="store_true",
                   help="keep the first of duplicate rows with conflicting labels instead of failing")


def _synthetic_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dim", type=int, default=20)
    p.add_argument("--values", type=int, default=3, help="values per feature")
    p.add_argument("--relevant-size", type=int, default=2, help="number of relevant features")
    p.add_argument("--relevant", default=None, help="comma-separated 1-based relevant feature indices")
    p.add_argument("--synth-seed", type=int, default=0, help="seed of the synthetic generator")


def _spec(args: argparse.Namespace, rows: int) -> SyntheticSpec:
    if args.relevant:
        rel = tuple(int(j) - 1 for j in args.relevant.split(","))
        return SyntheticSpec(args.dim, args.values, rel, rows, args.synth_seed)
    return SyntheticSpec.with_random_relevant(
        args.relevant_size, dim=args.dim, values_per_feature=args.values, rows=rows, seed=args.synth_seed
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cfrank", description="Counterfactual explanations for categorical data")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("explain", help="explain one row")
    _common(p)
    p.add_argument("--row", type=int, required=True, help="0-based data row index")
    p.add_argument("--mode", choices=experiments.EXPLAIN_MODES, default="optimal")
    p.add_argument("--max-factual-size", type=int, default=3)
    p.add_argument("--json", action="store_true", help="print JSON instead of text")

    for name, help_ in [
        ("distribution", "counterfactual counts per Hamming distance"),
        ("uniqueness", "proportion of rows with a unique optimal counterfactual"),
        ("gap", "relative power gap between the two best minimal counterfactuals"),
        ("metrics", "typicality/capacity/universality, optimal vs random"),
    ]:
        _common(sub.add_parser(name, help=help_))

    p = sub.add_parser("relevant", help="relevant-feature ratio on synthetic data")
    _common(p, data_required=False)
    _synthetic_args(p)
    p.add_argument("--sizes", default=",".join(map(str, experiments.RELEVANT_SAMPLE_SIZES)))

    p = sub.add_parser("synth", help="write a synthetic dataset and its relevant-feature sidecar")
    _synthetic_args(p)
    p.add_argument("--rows", type=int, default=1000)
    p.add_argument("--out", required=True, help="CSV path")
    return parser


def _config(args: argparse.Namespace) -> ExperimentConfig:
    return ExperimentConfig(
        dataset=args.data or "",
        sample_size=args.sample_size,
        repeats=args.repeats,
        seed=args.seed,
        output=args.out,
        label=args.label,
        dedupe_keep_first=args.dedupe_keep_first,
    )


RUNNERS = {
    "distribution": experiments.run_distribution,
    "uniqueness": experiments.run_uniqueness,
    "gap": experiments.run_gap,
    "metrics": experiments.run_metric_comparison,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "explain":
            result = experiments.explain_instance(
                args.data, args.label, args.row, args.mode,
                max_factual_size=args.max_factual_size, dedupe_keep_first=args.dedupe_keep_first,
            )
            sys.stdout.write(json.dumps(result, indent=2) + "\n" if args.json else experiments.render_text(result))
        elif args.command == "synth":
            data, relevant = generate_synthetic(_spec(args, args.rows))
            sidecar = write_synthetic(data, relevant, args.out)
            print(f"wrote {args.out} and {sidecar}")
        elif args.command == "relevant":
            sizes = [int(s) for s in args.sizes.split(",")]
            report = experiments.run_relevant_ratio(_spec(args, max(sizes)), _config(args), sizes)
            print(json.dumps(report.aggregates, indent=2, sort_keys=True))
        else:
            report = RUNNERS[args.command](_config(args))
            print(json.dumps(report.aggregates, indent=2, sort_keys=True))
    except (DatasetError, ValueError, IndexError, KeyError, OSError) as exc:
        print(f"cfrank {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
