from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from singhomeo.interval_fn import PLFunc
from singhomeo.singular import audit_gauge, build_singular, strongly_singular_1d


def test_stage_zero_is_identity():
    assert build_singular(0).f(0) == PLFunc.identity()


@pytest.mark.parametrize("p", [2, 3])
def test_gauge_audit(p):
    con = build_singular(3, p)
    assert audit_gauge(con) == []


def test_stage_one_planted_images_bounded():
    con = build_singular(1, 3)
    f = con.f(1)
    for iv in con.planted:
        assert f.eval(iv.hi) - f.eval(iv.lo) <= iv.length ** 3


def test_lengths_increase_to_two():
    prev = 0.0
    for m in range(7):
        L = strongly_singular_1d(m).polyline_length() if m else PLFunc.identity().polyline_length()
        assert prev <= L <= 2.0
        prev = L


@given(st.integers(1, 4), st.sampled_from([2, 3]))
def test_stages_are_homeomorphisms(m, p):
    f = strongly_singular_1d(m, p)
    assert f.monotone_homeo
    assert f.increment_sum() == 2


def test_stages_refine():
    con = build_singular(4, 2)
    for a, b in zip(con.stages, con.stages[1:]):
        assert set(a.xs) <= set(b.xs)
