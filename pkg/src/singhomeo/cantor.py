"""Fat Cantor sets with middle gaps 4^-k and their iterated fillings."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .errors import DomainError, PreconditionError
from .rational import ONE, ZERO, dyadic, fmt, q


def elementary_length(n: int):
    """Length of a level-``n`` elementary interval of the unit copy."""
    if n < 0:
        raise PreconditionError("level must be nonnegative")
    if n == 0:
        return ONE
    return dyadic(n + 1) + dyadic(2 * n + 1)


def elementary_length_recursive(n: int):
    """Same quantity, obtained by actually removing the gaps level by level."""
    length = ONE
    for k in range(1, n + 1):
        length = (length - dyadic(2 * k)) / 2
    return length


def svc_measure(n: int):
    """Measure of the union of the level-``n`` elementary intervals of the unit copy."""
    return (1 << n) * elementary_length(n)


@dataclass(frozen=True)
class CantorScheme:
    """A similar copy of the fat Cantor set on ``[u, v]``."""

    u: object = ZERO
    v: object = ONE

    def __post_init__(self) -> None:
        u, v = q(self.u), q(self.v)
        if not u < v:
            raise DomainError(f"empty base interval [{u}, {v}]")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def width(self):
        return self.v - self.u

    def b(self, n: int):
        return self.width * elementary_length(n)

    def gap_length(self, k: int):
        """Length of the gaps removed at level ``k``."""
        if k < 1:
            raise PreconditionError("gaps start at level 1")
        return self.width * dyadic(2 * k)

    def elementary_intervals(self, n: int) -> list[tuple]:
        if n < 0:
            raise PreconditionError("level must be nonnegative")
        return list(self.iter_elementary(n))

    def iter_elementary(self, n: int) -> Iterator[tuple]:
        """Left-to-right level-``n`` intervals, generated lazily."""
        if n == 0:
            yield (self.u, self.v)
            return
        side = self.b(n)
        for lo, hi in self.iter_elementary(n - 1):
            yield (lo, lo + side)
            yield (hi - side, hi)

    def gaps(self, n: int) -> list[tuple]:
        """Open gaps removed at level ``n`` (as closed endpoint pairs)."""
        side = self.b(n)
        return [(lo + side, hi - side) for lo, hi in self.iter_elementary(n - 1)]

    def all_gaps(self, depth: int) -> list[tuple]:
        """Every gap of levels ``1..depth``, sorted left to right."""
        out = [g for k in range(1, depth + 1) for g in self.gaps(k)]
        out.sort()
        return out

    def measure(self, n: int):
        return self.width * svc_measure(n)

    def membership(self, x, n: int) -> bool:
        """Is ``x`` in a level-``n`` elementary interval?  O(n) descent."""
        x = q(x)
        if not self.u <= x <= self.v:
            raise DomainError(f"{x} is outside [{self.u}, {self.v}]")
        lo, hi = self.u, self.v
        for k in range(1, n + 1):
            side = self.b(k)
            if x <= lo + side:
                hi = lo + side
            elif x >= hi - side:
                lo = hi - side
            else:
                return False
        return True

    def to_json(self, levels: int) -> dict:
        return {
            "base": [fmt(self.u), fmt(self.v)],
            "levels": [
                [[fmt(a), fmt(b)] for a, b in self.elementary_intervals(n)]
                for n in range(levels + 1)
            ],
        }


def fill_fraction(depth: int | None):
    """Fraction of a block covered by its planted copy (``None``: the full copy)."""
    return q(1, 2) if depth is None else svc_measure(depth)


def fill_measure_formula(n: int, depth: int | None = None):
    """Measure of the stage-``n`` filling: each stage covers a fixed fraction of what is left."""
    if n < 0:
        raise PreconditionError("stage must be nonnegative")
    return ONE - (ONE - fill_fraction(depth)) ** n


def identity_block_level(lo, hi, stage: int, _image=None) -> int:
    """Smallest N with 2^-N dividing the gap and 2^-N <= 2^-stage (identity oscillation)."""
    return max(dyadic_exponent(hi - lo), stage)


def dyadic_exponent(length) -> int:
    """``n`` with ``length == 2^-n``; raises for anything else."""
    length = q(length)
    den = int(length.denominator)
    if length.numerator != 1 or den & (den - 1):
        raise PreconditionError(f"length {length} is not an integer power of 2")
    return den.bit_length() - 1


BlockRule = Callable[..., int]


@dataclass(frozen=True)
class FillScheme:
    """Stage-by-stage record of the blocks carrying planted Cantor copies.

    ``blocks[k - 1]`` lists the blocks used at stage ``k``.  With ``depth``
    set, every copy is resolved down to its level-``depth`` elementary
    intervals and only gaps of levels ``1..depth`` are refilled, which keeps
    the block count finite.
    """

    blocks: tuple
    depth: int

    @property
    def stage(self) -> int:
        return len(self.blocks)

    @classmethod
    def build(cls, stages: int, depth: int = 2, block_level: BlockRule = identity_block_level) -> FillScheme:
        if stages < 0 or depth < 1:
            raise PreconditionError("need stages >= 0 and depth >= 1")
        out = []
        gaps = [(ZERO, ONE)]
        for k in range(1, stages + 1):
            stage_blocks = []
            for lo, hi in gaps:
                n = block_level(lo, hi, k)
                step = dyadic(n)
                count = int((hi - lo) / step)
                stage_blocks.extend((lo + step * j, lo + step * (j + 1)) for j in range(count))
            out.append(tuple(stage_blocks))
            gaps = [g for a, b in stage_blocks for g in CantorScheme(a, b).all_gaps(depth)]
        return cls(tuple(out), depth)

    def copies(self, stage: int) -> Iterator[CantorScheme]:
        for a, b in self.blocks[stage - 1]:
            yield CantorScheme(a, b)

    def gaps(self, stage: int) -> list[tuple]:
        """Complementary intervals left open after ``stage``."""
        if stage == 0:
            return [(ZERO, ONE)]
        return [g for c in self.copies(stage) for g in c.all_gaps(self.depth)]

    def measure(self, n: int | None = None):
        """Exact measure of the truncated filling, summed block by block."""
        n = self.stage if n is None else n
        frac = fill_fraction(self.depth)
        return sum((frac * (b - a) for k in range(n) for a, b in self.blocks[k]), ZERO)

    def full_measure(self, n: int | None = None):
        """Measure of the untruncated filling through stage ``n``."""
        return fill_measure_formula(self.stage if n is None else n)


def fill_measure(fs: FillScheme | None, n: int):
    """Measure of K_n for the full filling (every copy carries measure half its block)."""
    if n < 1:
        raise PreconditionError("stage must be at least 1")
    return fill_measure_formula(n)
