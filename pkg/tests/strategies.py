"""Hypothesis strategies shared by the test modules."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from singhomeo.interval_fn import PLFunc
from singhomeo.rational import q


@st.composite
def monotone_pl(draw, max_pieces: int = 8, bits: int = 10):
    """Random strictly increasing PL homeomorphism with dyadic breakpoints."""
    scale = 1 << bits
    n = draw(st.integers(1, max_pieces))
    xs = draw(st.lists(st.integers(1, scale - 1), min_size=n - 1, max_size=n - 1, unique=True))
    ys = draw(st.lists(st.integers(1, scale - 1), min_size=n - 1, max_size=n - 1, unique=True))
    xs = [0, *sorted(xs), scale]
    ys = [0, *sorted(ys), scale]
    return PLFunc(tuple(q(v, scale) for v in xs), tuple(q(v, scale) for v in ys), True)


@st.composite
def pl_function(draw, max_pieces: int = 6, bits: int = 8):
    """Random continuous PL function on [0, 1] with values in [0, 1]."""
    scale = 1 << bits
    n = draw(st.integers(1, max_pieces))
    xs = draw(st.lists(st.integers(1, scale - 1), min_size=n - 1, max_size=n - 1, unique=True))
    xs = [0, *sorted(xs), scale]
    ys = draw(st.lists(st.integers(0, scale), min_size=len(xs), max_size=len(xs)))
    return PLFunc(tuple(q(v, scale) for v in xs), tuple(q(v, scale) for v in ys))


rationals01 = st.fractions(min_value=0, max_value=1, max_denominator=1 << 12).map(
    lambda f: q(Fraction(f))
)
