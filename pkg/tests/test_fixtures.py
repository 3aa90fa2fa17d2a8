"""The frozen oracle values agree with the library and with a fresh oracle run."""

from __future__ import annotations

import importlib.util
from decimal import Decimal
from pathlib import Path

import numpy as np
import pytest

from singhomeo.fixtures import load
from singhomeo.homeo import Product1D, sample_witness, singular_product
from singhomeo.measure import pushforward_hist, singularity_score
from singhomeo.rational import q
from singhomeo.singular import strongly_singular_1d

FIX = load()
SCRIPT = Path(__file__).resolve().parents[1] / "scripts" / "oracle_fixtures.py"


def test_lengths_match_library():
    p = FIX["lengths"]["p"]
    for m, text in FIX["lengths"]["values"].items():
        L = strongly_singular_1d(int(m), p).polyline_length()
        assert abs(Decimal(repr(L)) - Decimal(text)) < Decimal("1e-13")


def test_scores_match_library():
    sc = FIX["scores"]
    for m, text in sc["values"].items():
        f = strongly_singular_1d(int(m), sc["p"])
        h = pushforward_hist(Product1D((f, f)), sc["k"])
        assert singularity_score(h, q(sc["eps"])) == q(text)


def test_thresholds_follow_rules():
    sc = FIX["scores"]
    assert sc["threshold_m5"] >= float(q(sc["values"]["5"]))
    lens = FIX["lengths"]
    assert max(lens["deficit_ratios"]) <= lens["shrink_factor"]
    w = FIX["witnesses"]
    lo, hi = w["distortion_band"]
    assert lo <= w["ratio_min"] and w["ratio_max"] <= hi


def test_witness_sampler_matches_oracle_stream():
    f0 = singular_product(FIX["witnesses"]["f0_stage"], 2, FIX["scores"]["p"])
    for seed in (0, 7, 99):
        w = sample_witness(f0, seed)
        rng = np.random.default_rng(seed)
        s = rng.uniform(1, 2, 2)
        t = rng.uniform(1, 2, 2)
        assert np.allclose(w.s, s) and np.allclose(w.t, t)


@pytest.mark.slow
def test_oracle_regenerates_same_fixture(tmp_path):
    spec = importlib.util.spec_from_file_location("oracle_fixtures", SCRIPT)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    assert mod.build() == FIX
