"""Exact rational helpers built on gmpy2.mpq."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Number

from gmpy2 import isqrt, mpq, mpz

Q = mpq
ZERO = mpq(0)
ONE = mpq(1)


def is_exact(v) -> bool:
    return isinstance(v, (int, Fraction)) or type(v) is type(ONE) or type(v) is type(mpz(0))


def q(v, den=None) -> mpq:
    """Convert ints, Fractions, "p/q" strings and floats (exactly) to mpq.

    ``q(a, b)`` is the fraction ``a/b`` for integers.
    """
    if den is not None:
        return mpq(v, den)
    if type(v) is type(ONE):
        return v
    if isinstance(v, str):
        try:
            return mpq(v.strip())
        except ValueError as exc:
            raise ValueError(f"not a rational literal: {v!r}") from exc
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError("non-finite float has no rational value")
        return mpq(Fraction(v))
    if isinstance(v, (int, Fraction, Number)):
        return mpq(v)
    raise TypeError(f"cannot convert {type(v).__name__} to a rational")


def dyadic(k: int) -> mpq:
    """2^-k as an exact rational (k may be negative)."""
    return mpq(1, 1 << k) if k >= 0 else mpq(1 << (-k))


def fmt(v) -> str | float:
    """JSON-friendly form: rationals as 'p/q' strings, floats untouched."""
    if is_exact(v):
        return str(q(v))
    return float(v)


def parse_num(v):
    """Inverse of :func:`fmt`."""
    if isinstance(v, str):
        return q(v)
    if isinstance(v, bool):
        raise ValueError("booleans are not numbers here")
    if isinstance(v, int):
        return mpq(v)
    return float(v)


def sqrt_floor(v, bits: int = 64) -> mpq:
    """Rational r with r <= sqrt(v) < r + 2^-bits, for v >= 0 rational."""
    v = q(v)
    if v < 0:
        raise ValueError("negative radicand")
    num, den = v.numerator, v.denominator
    scale = mpz(1) << (2 * bits)
    # sqrt(num/den) = sqrt(num*den)/den
    root = isqrt(num * den * scale)
    return mpq(root, den * (mpz(1) << bits))


def sqrt_ceil(v, bits: int = 64) -> mpq:
    lo = sqrt_floor(v, bits)
    if lo * lo == q(v):
        return lo
    return lo + dyadic(bits) / q(v).denominator
