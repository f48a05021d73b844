import json
import subprocess
import sys

import pytest

from cfrank.cli import main
from cfrank.dataset import load_toy, write_csv


@pytest.fixture
def toy_csv(tmp_path):
    path = tmp_path / "toy.csv"
    write_csv(load_toy(), path)
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_explain_text(capsys, toy_csv):
    code, out, _ = run(capsys, "explain", "--data", toy_csv, "--label", "score", "--row", 0)
    assert code == 0
    assert "sex=female" in out and "race=African" in out


def test_explain_json(capsys, toy_csv):
    code, out, _ = run(capsys, "explain", "--data", toy_csv, "--row", 0, "--mode", "minimal", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["status"] == "ok"
    assert [c["witness"] for c in doc["counterfactuals"]] == [1, 6]


def test_explain_default_label_is_last_column(capsys, toy_csv):
    _, with_label, _ = run(capsys, "explain", "--data", toy_csv, "--label", "score", "--row", 2, "--json")
    _, default, _ = run(capsys, "explain", "--data", toy_csv, "--row", 2, "--json")
    assert with_label == default


@pytest.mark.parametrize("command", ["distribution", "uniqueness", "gap", "metrics"])
def test_experiments_write_outputs(capsys, toy_csv, tmp_path, command):
    out_stem = tmp_path / command
    code, out, _ = run(
        capsys, command, "--data", toy_csv, "--sample-size", 6, "--repeats", 2, "--seed", 3, "--out", out_stem
    )
    assert code == 0
    assert json.loads(out)
    summary = json.loads((tmp_path / f"{command}.json").read_text())
    assert set(summary) == {"experiment", "dataset", "config", "aggregates", "per_repeat"}
    assert len(summary["per_repeat"]) == 2
    assert (tmp_path / f"{command}.csv").read_text().count("\n") >= 2


def test_experiment_replay_is_byte_identical(capsys, toy_csv, tmp_path):
    files = []
    for k in range(2):
        stem = tmp_path / f"r{k}"
        run(capsys, "gap", "--data", toy_csv, "--sample-size", 5, "--repeats", 4, "--seed", 1, "--out", stem)
        files.append((stem.with_suffix(".csv").read_bytes(), stem.with_suffix(".json").read_bytes()))
    assert files[0] == files[1]


def test_synth_and_relevant(capsys, tmp_path):
    csv = tmp_path / "syn.csv"
    code, out, _ = run(capsys, "synth", "--dim", 6, "--relevant", "2,5", "--rows", 50, "--out", csv)
    assert code == 0 and csv.exists()
    assert (tmp_path / "syn.relevant.txt").read_text().split() == ["f2", "f5"]
    code, out, _ = run(
        capsys, "relevant", "--dim", 6, "--relevant", "2,5", "--sizes", "100,200",
        "--sample-size", 30, "--repeats", 2,
    )
    assert code == 0
    agg = json.loads(out)
    assert 0.5 <= agg["mean_ratio"] <= 1


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["explain", "--data", "missing.csv", "--row", "0"], "no such file"),
        (["gap", "--data", "{toy}", "--label", "nope"], "not in header"),
        (["explain", "--data", "{toy}", "--row", "99"], "row"),
        (["uniqueness", "--data", "{toy}", "--sample-size", "0"], "sample_size"),
        (["explain", "--data", "{bad}", "--row", "0"], "empty cell"),
    ],
)
def test_errors_exit_nonzero_with_diagnostic(capsys, toy_csv, tmp_path, argv, fragment):
    bad = tmp_path / "bad.csv"
    bad.write_text("f1,y\n,A\n", encoding="utf-8")
    argv = [a.format(toy=toy_csv, bad=bad) for a in argv]
    code, out, err = run(capsys, *argv)
    assert code != 0 and out == ""
    assert fragment in err


def test_conflicts_need_flag(capsys, tmp_path):
    path = tmp_path / "dup.csv"
    path.write_text("f1,f2,y\nx,u,A\nx,u,B\ny,v,B\n", encoding="utf-8")
    code, _, err = run(capsys, "explain", "--data", path, "--row", 0)
    assert code != 0 and "identical features" in err
    code, out, _ = run(capsys, "explain", "--data", path, "--row", 0, "--dedupe-keep-first", "--json")
    assert code == 0 and json.loads(out)["status"] == "ok"


def test_unknown_subcommand_exits_nonzero():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code != 0


def test_module_entry_point(toy_csv):
    proc = subprocess.run(
        [sys.executable, "-m", "cfrank", "explain", "--data", str(toy_csv), "--row", "0", "--json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["counterfactuals"][0]["witness"] == 1
