from __future__ import annotations

import math

import pytest

from singhomeo import zigzag as zz
from singhomeo.errors import ConfigError, PreconditionError
from singhomeo.rational import ONE, dyadic, q

SPEC = zz.build("pow2:3", 3)


def test_choose_a_power_sequence():
    a = zz.choose_a(zz.SSequence.parse("pow2:3"), 6)
    assert a == [1, 2, 3, 6, 11, 22]
    naive = [math.ceil(2 ** (m + 1) / 3) for m in range(6)]
    # the naive solution, pushed up to be strictly increasing
    fixed = []
    for v in naive:
        fixed.append(max(v, fixed[-1] + 1) if fixed else v)
    assert a == fixed


def test_choose_a_double_exponential():
    assert zz.choose_a(zz.SSequence.parse("dexp"), 6) == list(range(6))


def test_choose_a_minimal():
    s = zz.SSequence.parse("pow2:3")
    a = zz.choose_a(s, 6)
    for m in range(1, 6):
        if a[m] > a[m - 1] + 1:
            assert s(a[m] - 1) > dyadic(1 << (m + 1))


def test_bad_sequences():
    with pytest.raises(ConfigError):
        zz.SSequence.parse("pow3:2")
    with pytest.raises(Exception):
        zz.choose_a(zz.SSequence.from_values([q(1, 4), q(1, 2), q(1, 1024)]), 3)


def test_stage_one_splits_evenly():
    phi = SPEC.phi(1)
    lo, hi = phi.range()
    assert (lo, hi) == (0, q(1, 2))
    w = dyadic(SPEC.a[1])
    for i in range(1 << SPEC.a[1]):
        I = (w * i, w * (i + 1))
        assert phi.preimage_measure((0, q(1, 4)), I) == w / 2
        assert phi.preimage_measure((q(1, 4), q(1, 2)), I) == w / 2


@pytest.mark.parametrize("m", [1, 2, 3])
def test_clause_iv_exhaustive(m):
    count, ok = zz.clause_check(SPEC.stages[m])
    assert count > 0 and ok


def test_stage_distance():
    assert SPEC.phi(2).sup_distance(SPEC.phi(1)) <= q(1, 4)
    assert SPEC.phi(3).sup_distance(SPEC.phi(2)) <= q(1, 16)


def test_q_sequence():
    assert zz.q_sequence((2, 5), 1) == 1
    assert zz.q_sequence(SPEC, SPEC.a[3]) == q(9, 128) == 18 * dyadic(8)
    assert float(zz.q_sequence(SPEC, SPEC.a[3])) == 0.0703125
    spec = zz.build("pow2:3", 1)
    vals = [zz.q_sequence((1, 2, 3, 6, 11, 22), n) for n in range(30)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < q(1, 10**4)
    assert spec.M == 1


def test_covering_bound_trivial_below_a0():
    spec = zz.build("pow2:1", 1)
    r = zz.verify_covering_bound(spec, 1, 0)
    assert r.q == ONE and r.passed


def test_covering_bound_at_a1():
    r = zz.verify_covering_bound(SPEC, 3, SPEC.a[1])
    assert r.passed and r.max_ratio <= r.q


def test_covering_needs_stage():
    spec = zz.build("pow2:3", 2)
    with pytest.raises(PreconditionError):
        zz.verify_covering_bound(spec, 2, 6)


def test_ratio_monotone_in_target_length():
    phi = SPEC.phi(3)
    I = (q(0), q(1, 8))
    occ = zz.occupation(phi, I)
    prev = None
    for k in range(1, 10):
        v, _ = occ.max_window(dyadic(k))
        if prev is not None:
            assert v <= prev
        prev = v


def test_oscillation_certificate():
    rows = zz.oscillation_certificate(SPEC, 3, range(SPEC.a[1], SPEC.a[3] + 1))
    assert rows and all(r.certified for r in rows)
    flat = zz.build("pow2:3", 0)
    assert zz.min_window_oscillation(flat.phi(0), 3) == 0


def test_oscillation_vs_covering_heuristic():
    # a window with small oscillation would concentrate the occupation
    for n in range(SPEC.a[1], SPEC.a[3] + 1):
        qn = zz.q_sequence(SPEC, n)
        osc = zz.min_window_oscillation(SPEC.phi(3), n)
        if qn < 1:
            assert osc >= SPEC.s(n) * (1 / qn - 1)
