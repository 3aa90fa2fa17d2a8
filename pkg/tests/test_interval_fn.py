from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from singhomeo.errors import DomainError, InvariantError
from singhomeo.interval_fn import DyadicInterval, PLFunc
from singhomeo.rational import q
from singhomeo import zigzag as zz

from strategies import monotone_pl, pl_function, rationals01

BENT = PLFunc.from_points([(0, 0), (q(1, 2), q(9, 10)), (1, 1)], monotone_homeo=True)


def test_eval_identity_and_midpoint():
    assert PLFunc.identity().eval(q(3, 10)) == q(3, 10)
    assert BENT.eval(q(1, 4)) == q(9, 20)


def test_eval_breakpoints_of_zigzag_exact():
    phi = zz.build("pow2:3", 1).phi(1)
    for x, y in zip(phi.xs, phi.ys):
        assert phi.eval(x) == y


def test_eval_outside_domain():
    with pytest.raises(DomainError):
        BENT.eval(q(3, 2))


def test_inverse_examples():
    assert PLFunc.identity().inverse() == PLFunc.identity()
    inv = BENT.inverse()
    assert inv.points == [(0, 0), (q(9, 10), q(1, 2)), (1, 1)]


def test_invalid_breakpoints():
    with pytest.raises(InvariantError):
        PLFunc((q(0), q(1, 2), q(1, 2), q(1)), (0, 0, 1, 1))
    with pytest.raises(InvariantError):
        PLFunc((q(0), q(1)), (q(1), q(0)), True)
    with pytest.raises(InvariantError):
        PLFunc.from_points([(0, 0), (1, 1), (q(1, 2), q(1, 2))])


@given(monotone_pl())
def test_inverse_is_involution(f):
    assert f.inverse().inverse() == f


@given(monotone_pl(), rationals01)
def test_inverse_eval_matches_inverse(f, y):
    assert f.inverse_eval(y) == f.inverse().eval(y)
    assert f.eval(f.inverse_eval(y)) == y


@given(monotone_pl())
def test_compose_with_identity(f):
    ident = PLFunc.identity()
    assert f.compose(ident).merged() == f.merged()
    assert ident.compose(f).merged() == f.merged()


@given(pl_function(), pl_function(), st.lists(rationals01, min_size=1, max_size=20))
def test_compose_pointwise(a, b, xs):
    c = a.compose(b)
    for x in xs:
        assert c.eval(x) == a.eval(b.eval(x))


def test_compose_pointwise_thousand_points(rng):
    f = PLFunc.from_points([(0, 0), (q(1, 3), q(2, 3)), (1, 1)], True)
    g = BENT
    c = f.compose(g)
    x = rng.random(1000)
    assert np.max(np.abs(c.eval_array(x) - f.eval_array(g.eval_array(x)))) < 1e-14


def test_oscillation_examples():
    assert PLFunc.identity().oscillation((q(1, 5), q(1, 2))) == q(3, 10)
    assert PLFunc.constant(q(1, 3)).oscillation((q(0), q(1, 7))) == 0


def test_polyline_length_examples():
    assert PLFunc.identity().polyline_length() == pytest.approx(math.sqrt(2), abs=1e-15)
    want = math.sqrt(0.25 + 0.81) + math.sqrt(0.25 + 0.01)
    assert BENT.polyline_length() == pytest.approx(want, abs=1e-14)
    assert BENT.polyline_length() == pytest.approx(1.5395, abs=1e-4)


@given(monotone_pl(max_pieces=12))
def test_length_at_most_two_and_increments(f):
    assert f.polyline_length() <= 2.0
    assert f.increment_sum() == 2


def test_preimage_measure_examples():
    assert PLFunc.identity().preimage_measure((q(1, 5), q(1, 2))) == q(3, 10)
    c = PLFunc.constant(q(1, 3))
    assert c.preimage_measure((q(0), q(1, 2))) == 1
    assert c.preimage_measure((q(1, 2), q(1))) == 0


@given(pl_function(), rationals01, rationals01)
def test_preimage_measure_additive(f, a, b):
    lo, hi = min(a, b), max(a, b)
    mid = (lo + hi) / 2
    whole = f.preimage_measure((q(0), q(1)), (lo, hi)) if lo < hi else 0
    if lo < hi:
        assert whole == hi - lo
        left = f.preimage_measure((q(0), q(1)), (lo, mid))
        right = f.preimage_measure((q(0), q(1)), (mid, hi))
        assert left + right == whole


@given(pl_function(), st.lists(rationals01, min_size=2, max_size=6))
def test_preimage_measure_matches_dense_scan(f, cuts):
    cuts = sorted(set(cuts))
    if len(cuts) < 2:
        return
    lo, hi = cuts[0], cuts[-1]
    exact = float(f.preimage_measure((lo, hi)))
    xs = (np.arange(200_000) + 0.5) / 200_000
    ys = f.eval_array(xs)
    approx = float(np.mean((ys >= float(lo)) & (ys <= float(hi))))
    assert abs(exact - approx) < 2e-3


def test_json_roundtrip():
    assert PLFunc.from_json(BENT.to_json(), True) == BENT


def test_dyadic_interval():
    iv = DyadicInterval.containing(q(3, 8), 2)
    assert iv.bounds == (q(1, 4), q(1, 2))
    assert [c.bounds for c in iv.children()] == [(q(1, 4), q(3, 8)), (q(3, 8), q(1, 2))]
    assert iv.parent().bounds == (q(0), q(1, 2))
