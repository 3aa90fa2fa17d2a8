from __future__ import annotations

import pytest

from singhomeo import experiments as X
from singhomeo.errors import ConfigError, PreconditionError
from singhomeo.report import content_hash, plot_svg, run_payload, series_csv, write_run
from singhomeo.serialize import canonical


def test_registry_names():
    assert set(X.PIPELINES) == {
        "banach-mycielski", "generic-area", "twist-infinite-area",
        "nowhere-diff", "singular-prevalence", "semicontinuity",
    }


def test_resolve_config_converts_and_rejects():
    cfg = X.resolve_config("banach-mycielski", {"stages": "3"})
    assert cfg["stages"] == 3
    with pytest.raises(ConfigError):
        X.resolve_config("banach-mycielski", {"bogus": 1})
    with pytest.raises(ConfigError):
        X.resolve_config("nope", {})
    with pytest.raises(ConfigError):
        X.resolve_config("banach-mycielski", {"stages": "many"})


def test_stochastic_needs_seed():
    with pytest.raises(PreconditionError):
        X.run("semicontinuity", {"trials": 2})


def test_banach_small():
    r = X.run("banach-mycielski", {"stages": 3})
    assert r.passed
    lengths = r.get("lengths").column("length")
    assert lengths == sorted(lengths) and max(lengths) <= 2


def test_deterministic_content_hash():
    a = run_payload(X.run("semicontinuity", {"trials": 3}, seed=4))
    b = run_payload(X.run("semicontinuity", {"trials": 3}, seed=4))
    c = run_payload(X.run("semicontinuity", {"trials": 3}, seed=5))
    assert a["content_hash"] == b["content_hash"]
    assert a["content_hash"] != c["content_hash"]


def test_jobs_do_not_change_results():
    cfg = {"samples": 4, "stage_max": 2, "f0_stage": 2}
    one = run_payload(X.run("singular-prevalence", cfg, seed=1, jobs=1))
    two = run_payload(X.run("singular-prevalence", cfg, seed=1, jobs=2))
    assert one["content_hash"] == two["content_hash"]


def test_nowhere_diff_small():
    r = X.run("nowhere-diff", {"probes": 3})
    assert r.passed


def test_twist_occupancy_holds():
    r = X.run("twist-infinite-area", {"n_max": 3})
    checks = r.checks
    assert checks["occupancy_bound"] and checks["rung_lower_nondecreasing"]


def test_content_hash_is_git_blob():
    # `git hash-object` of the empty file and of "hello\n"
    assert content_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391"
    assert content_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a"


def test_write_run(tmp_path):
    r = X.run("banach-mycielski", {"stages": 3})
    files = write_run(r, tmp_path, plot=True)
    assert {"run.json", "series.csv", "plot.svg"} <= set(files)
    text = (tmp_path / "run.json").read_text()
    assert text == canonical(run_payload(r))
    head = (tmp_path / "series.csv").read_text().splitlines()[0]
    assert head.split(",") == [c.name for c in r.series[0].columns]
    assert series_csv(r.series[0]).count("\n") == len(r.series[0].rows) + 1
    assert plot_svg(r.series[0]).startswith("<svg")
