from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from singhomeo.rational import dyadic, fmt, is_exact, parse_num, q, sqrt_ceil, sqrt_floor


def test_q_accepts_common_forms():
    assert q(1, 3) == Fraction(1, 3)
    assert q("3/8") == Fraction(3, 8)
    assert q(0.25) == Fraction(1, 4)
    assert q(Fraction(5, 7)) == Fraction(5, 7)


def test_q_rejects_junk():
    with pytest.raises(ValueError):
        q("one half")
    with pytest.raises(ValueError):
        q(float("inf"))


def test_dyadic():
    assert dyadic(3) == Fraction(1, 8)
    assert dyadic(-2) == 4


@given(st.fractions(min_value=0, max_value=10**6, max_denominator=10**6))
def test_sqrt_brackets(v):
    lo, hi = sqrt_floor(v), sqrt_ceil(v)
    assert lo * lo <= q(v) <= hi * hi
    assert hi - lo <= dyadic(60)


@given(st.fractions(max_denominator=1000) | st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_roundtrip(v):
    back = parse_num(fmt(q(v) if isinstance(v, Fraction) else v))
    assert back == v


def test_is_exact():
    assert is_exact(q(1, 2)) and is_exact(3) and not is_exact(0.5)
