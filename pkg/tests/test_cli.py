from __future__ import annotations

import json
from decimal import Decimal

import pytest

from singhomeo.cli import main
from singhomeo.fixtures import load


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_construct_verify_inspect(tmp_path, capsys):
    code, out, _ = _run(capsys, "construct", "--expr", "identity(2)", "--out", str(tmp_path))
    assert code == 0
    path = tmp_path / "expr.json"
    assert json.loads(out)["written"].endswith("expr.json")
    code, out, _ = _run(capsys, "verify", "--in", str(path))
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = _run(capsys, "inspect", "--in", str(path))
    assert code == 0 and json.loads(out)["d"] == 2


def test_construct_is_byte_identical(tmp_path, capsys):
    expr = "slide(phi=zigzag(pow2:3, stages=3, scale=1/8), delta=1/4) o powermap(1.5, 1.25)"
    for sub in ("a", "b"):
        assert _run(capsys, "construct", "--expr", expr, "--out", str(tmp_path / sub))[0] == 0
    assert (tmp_path / "a" / "expr.json").read_bytes() == (tmp_path / "b" / "expr.json").read_bytes()


def test_corrupted_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"format": "singhomeo", "version": 1, "kind": "homeo", "data": {"tag": "?"}}')
    code, _, err = _run(capsys, "verify", "--in", str(bad))
    assert code == 2
    assert json.loads(err.strip().splitlines()[-1])["exit"] == 2


def test_missing_seed(tmp_path, capsys):
    code, _, err = _run(capsys, "experiment", "semicontinuity", "--out", str(tmp_path))
    assert code == 2 and "seed" in err


def test_bad_expression(capsys):
    code, _, err = _run(capsys, "construct", "--expr", "identity(")
    assert code == 2 and json.loads(err)["error"] == "ConfigError"


def test_unknown_experiment_option(tmp_path, capsys):
    code, _, _ = _run(capsys, "experiment", "banach-mycielski", "--bogus", "1", "--out", str(tmp_path))
    assert code == 2


def test_banach_lengths_match_fixture(tmp_path, capsys):
    code, _, _ = _run(capsys, "experiment", "banach-mycielski", "--out", str(tmp_path))
    assert code == 0
    run = json.loads((tmp_path / "run.json").read_text())
    series = next(s for s in run["series"] if s["name"] == "lengths")
    j = series["columns"].index(next(c for c in series["columns"] if c["name"] == "length"))
    fixture = load()["lengths"]["values"]
    assert {str(r[0]) for r in series["rows"]} >= set(fixture)
    for row in series["rows"]:
        m = str(row[0])
        if m not in fixture:
            continue
        assert abs(Decimal(repr(row[j])) - Decimal(fixture[m])) < Decimal("1e-12")


def test_experiment_exit_code_on_failed_check(tmp_path, capsys):
    code, _, _ = _run(capsys, "experiment", "twist-infinite-area", "--n-max", "5", "--out", str(tmp_path))
    run = json.loads((tmp_path / "run.json").read_text())
    assert code == (0 if run["passed"] else 1)


def test_config_file(tmp_path, capsys):
    ini = tmp_path / "run.ini"
    ini.write_text("[global]\nseed = 3\n\n[semicontinuity]\ntrials = 2\n")
    code, _, _ = _run(capsys, "experiment", "semicontinuity", "--config", str(ini), "--out", str(tmp_path / "r"))
    assert code == 0
    run = json.loads((tmp_path / "r" / "run.json").read_text())
    assert run["seed"] == 3 and run["config"]["trials"] == 2


def test_jobs_same_hash(tmp_path, capsys):
    args = ["experiment", "singular-prevalence", "--seed", "2", "--samples", "4", "--stage-max", "2",
            "--f0-stage", "2"]
    assert _run(capsys, *args, "--out", str(tmp_path / "a"))[0] in (0, 1)
    assert _run(capsys, *args, "--jobs", "2", "--out", str(tmp_path / "b"))[0] in (0, 1)
    ha = json.loads((tmp_path / "a" / "run.json").read_text())["content_hash"]
    hb = json.loads((tmp_path / "b" / "run.json").read_text())["content_hash"]
    assert ha == hb


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_measure_formats(capsys, fmt):
    code, out, _ = _run(capsys, "measure", "area", "--expr", "identity(2)", "--format", fmt)
    assert code == 0 and "2" in out


def test_measure_exact_flag(capsys):
    code, _, _ = _run(capsys, "measure", "hist", "--expr", "identity(2)", "-p", "k=2", "--exact")
    assert code == 0
    code, _, err = _run(capsys, "measure", "onto", "--expr", "identity(2)", "-p", "alpha=0", "-p", "beta=0.2")
    assert code == 2 and "seed" in err


def test_unsupported_area(capsys):
    code, _, err = _run(capsys, "measure", "area", "--expr", "powermap(2, 2)")
    assert code == 2 and "UnsupportedExpression" in err
