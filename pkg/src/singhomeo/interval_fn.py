"""Piecewise-linear functions on [0, 1] and dyadic intervals, with exact arithmetic.

Breakpoints are kept as ``gmpy2.mpq`` whenever the inputs are exact, so
identities such as ``sum(dx + dy) == 2`` can be checked with ``==``.  A float
fast path (``eval_array``) is available for bulk evaluation.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ConfigError, DomainError, InvariantError
from .rational import ONE, ZERO, dyadic, fmt, is_exact, parse_num, q


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """The closed interval ``[index / 2^level, (index + 1) / 2^level]``."""

    level: int
    index: int

    def __post_init__(self) -> None:
        if self.level < 0:
            raise DomainError(f"negative dyadic level {self.level}")
        if not 0 <= self.index < (1 << self.level):
            raise DomainError(f"index {self.index} out of range at level {self.level}")

    @property
    def lo(self):
        return q(self.index) * dyadic(self.level)

    @property
    def hi(self):
        return q(self.index + 1) * dyadic(self.level)

    @property
    def length(self):
        return dyadic(self.level)

    @property
    def bounds(self) -> tuple:
        return self.lo, self.hi

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def children(self, depth: int = 1) -> list[DyadicInterval]:
        base = self.index << depth
        return [DyadicInterval(self.level + depth, base + j) for j in range(1 << depth)]

    def parent(self) -> DyadicInterval:
        if self.level == 0:
            raise DomainError("the unit interval has no parent")
        return DyadicInterval(self.level - 1, self.index >> 1)

    @classmethod
    def containing(cls, x, level: int) -> DyadicInterval:
        """The level-``level`` interval holding ``x`` (the lower one at shared endpoints)."""
        x = q(x)
        if not ZERO <= x <= ONE:
            raise DomainError(f"{x} is outside [0, 1]")
        k = math.floor(x * (1 << level))
        if k == (1 << level) or (k > 0 and k == x * (1 << level)):
            k -= 1
        return cls(level, int(k))

    @staticmethod
    def at_level(level: int) -> Iterator[DyadicInterval]:
        for i in range(1 << level):
            yield DyadicInterval(level, i)


def _as_bounds(interval) -> tuple:
    if isinstance(interval, DyadicInterval):
        return interval.bounds
    lo, hi = interval
    return lo, hi


def _num(v):
    return q(v) if is_exact(v) else float(v)


@dataclass(frozen=True)
class PLFunc:
    """A continuous piecewise-linear function on [0, 1].

    ``xs`` must start at 0, end at 1 and be strictly increasing.  Setting
    ``monotone_homeo`` additionally demands strictly increasing ``ys`` from 0
    to 1; the flag travels through ``inverse`` and ``compose``.
    """

    xs: tuple
    ys: tuple
    monotone_homeo: bool = False
    _checked: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        xs = tuple(_num(v) for v in self.xs)
        ys = tuple(_num(v) for v in self.ys)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        if self._checked:
            return
        if len(xs) != len(ys):
            raise InvariantError("xs and ys differ in length")
        if len(xs) < 2:
            raise InvariantError("need at least the two endpoints 0 and 1")
        if xs[0] != 0 or xs[-1] != 1:
            raise InvariantError("breakpoints must start at 0 and end at 1")
        for a, b in zip(xs, xs[1:]):
            if not a < b:
                raise InvariantError(f"x-coordinates not strictly increasing at {a}, {b}")
        if self.monotone_homeo:
            if ys[0] != 0 or ys[-1] != 1:
                raise InvariantError("a monotone homeomorphism must fix 0 and 1")
            for a, b in zip(ys, ys[1:]):
                if not a < b:
                    raise InvariantError(f"y-coordinates not strictly increasing at {a}, {b}")

    # construction helpers

    @classmethod
    def _trusted(cls, xs, ys, monotone_homeo: bool = False) -> PLFunc:
        return cls(tuple(xs), tuple(ys), monotone_homeo, _checked=True)

    @classmethod
    def from_points(cls, points: Iterable[Sequence], monotone_homeo: bool = False) -> PLFunc:
        pts = list(points)
        return cls(tuple(p[0] for p in pts), tuple(p[1] for p in pts), monotone_homeo)

    @classmethod
    def identity(cls) -> PLFunc:
        return cls((ZERO, ONE), (ZERO, ONE), True)

    @classmethod
    def constant(cls, c) -> PLFunc:
        c = _num(c)
        return cls((ZERO, ONE), (c, c))

    @property
    def points(self) -> list[tuple]:
        return list(zip(self.xs, self.ys))

    @property
    def n_pieces(self) -> int:
        return len(self.xs) - 1

    @cached_property
    def is_exact(self) -> bool:
        return all(is_exact(v) for v in self.xs) and all(is_exact(v) for v in self.ys)

    @cached_property
    def is_increasing(self) -> bool:
        return all(a < b for a, b in zip(self.ys, self.ys[1:]))

    def as_monotone_homeo(self) -> PLFunc:
        """Return a copy carrying the ``monotone_homeo`` flag, validating it."""
        return PLFunc(self.xs, self.ys, True)

    # evaluation

    def eval(self, x):
        if is_exact(x):
            x = q(x)
        if not 0 <= x <= 1:
            raise DomainError(f"{x} is outside [0, 1]")
        xs, ys = self.xs, self.ys
        i = bisect_right(xs, x)
        if i >= len(xs):
            return ys[-1]
        if xs[i - 1] == x:
            return ys[i - 1]
        x0, x1, y0, y1 = xs[i - 1], xs[i], ys[i - 1], ys[i]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    __call__ = eval

    @cached_property
    def _float_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.array([float(v) for v in self.xs]), np.array([float(v) for v in self.ys]))

    def eval_array(self, x) -> np.ndarray:
        """Vectorised float evaluation."""
        arr = np.asarray(x, dtype=float)
        if arr.size and (np.nanmin(arr) < 0.0 or np.nanmax(arr) > 1.0):
            raise DomainError("points outside [0, 1]")
        fx, fy = self._float_nodes
        return np.interp(arr, fx, fy)

    def slopes(self) -> list:
        return [(b - a) / (d - c) for a, b, c, d in zip(self.ys, self.ys[1:], self.xs, self.xs[1:])]

    def lipschitz(self):
        return max(abs(s) for s in self.slopes())

    # algebra

    def inverse(self) -> PLFunc:
        if not self.monotone_homeo:
            if not (self.is_increasing and self.ys[0] == 0 and self.ys[-1] == 1):
                raise InvariantError("only monotone homeomorphisms can be inverted")
        return PLFunc._trusted(self.ys, self.xs, True)

    def inverse_eval(self, y):
        """Evaluate the inverse at ``y`` without building it."""
        if not self.is_increasing:
            raise InvariantError("only increasing functions can be inverted")
        if is_exact(y):
            y = q(y)
        ys, xs = self.ys, self.xs
        if not ys[0] <= y <= ys[-1]:
            raise DomainError(f"{y} is outside the range")
        i = bisect_right(ys, y)
        if i >= len(ys):
            return xs[-1]
        if ys[i - 1] == y:
            return xs[i - 1]
        return xs[i - 1] + (xs[i] - xs[i - 1]) * (y - ys[i - 1]) / (ys[i] - ys[i - 1])

    def compose(self, inner: PLFunc) -> PLFunc:
        """``self o inner``; ``inner`` may be any PLFunc with range in [0, 1]."""
        return compose(self, inner)

    def scale(self, c) -> PLFunc:
        c = _num(c)
        return PLFunc._trusted(self.xs, [c * y for y in self.ys])

    def shift(self, c) -> PLFunc:
        c = _num(c)
        return PLFunc._trusted(self.xs, [y + c for y in self.ys])

    def refine(self, extra: Iterable) -> PLFunc:
        """Same function with additional breakpoints at ``extra``."""
        new = sorted(set(self.xs) | {_num(x) for x in extra})
        if new[0] < 0 or new[-1] > 1:
            raise DomainError("refinement points outside [0, 1]")
        return PLFunc._trusted(new, [self.eval(x) for x in new], self.monotone_homeo)

    def merged(self) -> PLFunc:
        """Drop breakpoints between collinear neighbours."""
        xs, ys = [self.xs[0]], [self.ys[0]]
        for i in range(1, len(self.xs) - 1):
            x0, y0 = xs[-1], ys[-1]
            x1, y1, x2, y2 = self.xs[i], self.ys[i], self.xs[i + 1], self.ys[i + 1]
            if (y1 - y0) * (x2 - x1) != (y2 - y1) * (x1 - x0):
                xs.append(x1)
                ys.append(y1)
        xs.append(self.xs[-1])
        ys.append(self.ys[-1])
        return PLFunc._trusted(xs, ys, self.monotone_homeo)

    # measurements

    def range(self) -> tuple:
        return min(self.ys), max(self.ys)

    def oscillation(self, interval=(ZERO, ONE)):
        lo, hi = _as_bounds(interval)
        if is_exact(lo) and is_exact(hi):
            lo, hi = q(lo), q(hi)
        if not lo <= hi:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        if lo < 0 or hi > 1:
            raise DomainError("interval leaves [0, 1]")
        i = bisect_right(self.xs, lo)
        j = bisect_left(self.xs, hi)
        vals = [self.eval(lo), self.eval(hi), *self.ys[i:j]]
        return max(vals) - min(vals)

    def sup_distance(self, other: PLFunc):
        """Exact sup-norm distance; attained at a breakpoint of either function."""
        grid = sorted(set(self.xs) | set(other.xs))
        return max(abs(self.eval(x) - other.eval(x)) for x in grid)

    def polyline_length(self) -> float:
        """Arclength of the graph: sum of Euclidean lengths of the pieces."""
        return math.fsum(
            math.sqrt(r) if not is_exact(r) else _sqrt_rational(r)
            for r in self.piece_radicands()
        )

    def piece_radicands(self) -> list:
        return [
            (x1 - x0) ** 2 + (y1 - y0) ** 2
            for x0, x1, y0, y1 in zip(self.xs, self.xs[1:], self.ys, self.ys[1:])
        ]

    def preimage_measure(self, target, within=(ZERO, ONE)):
        """Lebesgue measure of ``{x in within : self(x) in target}``.

        ``target`` is treated as closed, so a flat piece sitting on its boundary
        counts.  Non-flat pieces contribute the same for open or closed targets.
        """
        c, d = _as_bounds(target)
        a, b = _as_bounds(within)
        if is_exact(c) and is_exact(d):
            c, d = q(c), q(d)
        if is_exact(a) and is_exact(b):
            a, b = q(a), q(b)
        if c > d or a >= b:
            return ZERO if self.is_exact else 0.0
        xs, ys = self.xs, self.ys
        start = max(bisect_right(xs, a) - 1, 0)
        stop = min(bisect_left(xs, b), len(xs) - 1)
        total = ZERO
        for i in range(start, stop):
            x0, x1 = xs[i], xs[i + 1]
            y0, y1 = ys[i], ys[i + 1]
            lo_x, hi_x = max(x0, a), min(x1, b)
            if lo_x >= hi_x:
                continue
            if y0 == y1:
                if c <= y0 <= d:
                    total += hi_x - lo_x
                continue
            ya = y0 + (y1 - y0) * (lo_x - x0) / (x1 - x0) if lo_x != x0 else y0
            yb = y0 + (y1 - y0) * (hi_x - x0) / (x1 - x0) if hi_x != x1 else y1
            ymin, ymax = (ya, yb) if ya < yb else (yb, ya)
            ov_lo, ov_hi = max(ymin, c), min(ymax, d)
            if ov_lo < ov_hi:
                total += (ov_hi - ov_lo) * (hi_x - lo_x) / (ymax - ymin)
        return total

    def increment_sum(self, partition: Sequence | None = None):
        """``sum(dx + |dy|)`` over a partition of [0, 1] (breakpoints by default)."""
        pts = self.xs if partition is None else [_num(p) for p in partition]
        vals = [self.eval(p) for p in pts]
        return sum(
            ((b - a) + abs(fb - fa) for a, b, fa, fb in zip(pts, pts[1:], vals, vals[1:])),
            ZERO,
        )

    # serialization

    def to_json(self) -> list:
        return [[fmt(x), fmt(y)] for x, y in zip(self.xs, self.ys)]

    @classmethod
    def from_json(cls, data, monotone_homeo: bool = False) -> PLFunc:
        try:
            pts = [(parse_num(x), parse_num(y)) for x, y in data]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed PL function: {exc}") from exc
        return cls.from_points(pts, monotone_homeo)


def _sqrt_rational(r) -> float:
    # float(r) loses nothing that sqrt would keep for the magnitudes we handle,
    # but avoid overflow on huge numerators by working with the ratio.
    return math.sqrt(float(r))


def compose(outer: PLFunc, inner: PLFunc) -> PLFunc:
    """Exact composition ``outer o inner``.

    The breakpoints are those of ``inner`` together with every point where
    ``inner`` crosses a breakpoint of ``outer``.
    """
    lo, hi = inner.range()
    if lo < 0 or hi > 1:
        raise DomainError("inner function leaves [0, 1]")
    oxs = outer.xs
    xs = [inner.xs[0]]
    ys = [outer.eval(inner.ys[0])]
    for i in range(inner.n_pieces):
        x0, x1, y0, y1 = inner.xs[i], inner.xs[i + 1], inner.ys[i], inner.ys[i + 1]
        if y0 != y1:
            ylo, yhi = (y0, y1) if y0 < y1 else (y1, y0)
            k0, k1 = bisect_right(oxs, ylo), bisect_left(oxs, yhi)
            crossings = oxs[k0:k1]
            if y0 > y1:
                crossings = crossings[::-1]
            for t in crossings:
                xs.append(x0 + (x1 - x0) * (t - y0) / (y1 - y0))
                ys.append(outer.eval(t))
        xs.append(x1)
        ys.append(outer.eval(y1))
    flag = outer.monotone_homeo and inner.monotone_homeo
    return PLFunc._trusted(xs, ys, flag)


def dyadic_grid(level: int) -> list:
    step = dyadic(level)
    return [step * i for i in range((1 << level) + 1)]
