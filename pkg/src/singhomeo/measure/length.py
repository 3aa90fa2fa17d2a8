"""Graph length of monotone PL homeomorphisms, split into per-piece deficits."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import InvariantError, PreconditionError
from ..interval_fn import PLFunc, _sqrt_rational
from ..rational import ONE, ZERO, dyadic, q


@dataclass(frozen=True)
class LengthAnalysis:
    """Partition data at mesh ``< 1/n``.

    ``increments`` is ``sum(dx + dy)`` (exactly 2 for a homeomorphism), and
    ``deficits[i] = dx_i + dy_i - |(dx_i, dy_i)|``, so ``2 - length`` is their sum.
    """

    n: int
    partition: tuple
    length: float
    increments: object
    deficits: tuple
    flat_measure: object
    length_condition: bool
    flat_bound: object

    @property
    def mesh(self):
        return max(b - a for a, b in zip(self.partition, self.partition[1:]))

    @property
    def deficit_sum(self) -> float:
        return math.fsum(self.deficits)

    @property
    def flat_bound_holds(self) -> bool:
        return self.flat_measure >= self.flat_bound

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "pieces": len(self.partition) - 1,
            "mesh": str(self.mesh),
            "length": self.length,
            "two_minus_length": 2.0 - self.length,
            "increments": str(self.increments),
            "deficit_sum": self.deficit_sum,
            "flat_measure": str(self.flat_measure),
            "flat_measure_float": float(self.flat_measure),
            "length_condition": self.length_condition,
            "flat_bound": str(self.flat_bound),
            "flat_bound_holds": self.flat_bound_holds,
        }


def length_analysis(f: PLFunc, n: int) -> LengthAnalysis:
    """Length of ``graph(f)`` on the grid ``j/(n+1)`` refined by the breakpoints of ``f``.

    The refined partition makes the partition sum equal to the exact length.
    ``flat_measure`` is the measure of the union of partition intervals with
    slope ``<= 1/n``.  When ``length >= 2 - 2^-n`` that measure is at least
    ``1 - (n+1) 2^-n``.
    """
    if n < 1:
        raise PreconditionError("n must be positive")
    if not f.monotone_homeo:
        raise InvariantError("length analysis needs a monotone homeomorphism")
    grid = {q(j, n + 1) for j in range(n + 2)}
    pts = sorted(grid | set(f.xs))
    vals = [f.eval(x) for x in pts]
    radicands = []
    incs = ZERO
    flat = ZERO
    deficits = []
    cap = q(1, n)
    for x0, x1, y0, y1 in zip(pts, pts[1:], vals, vals[1:]):
        dx, dy = x1 - x0, y1 - y0
        r = dx * dx + dy * dy
        radicands.append(r)
        incs += dx + dy
        root = _sqrt_rational(r)
        deficits.append(float(dx + dy) - root)
        if dy <= cap * dx:
            flat += dx
    length = math.fsum(_sqrt_rational(r) for r in radicands)
    cond = length >= float(2 - dyadic(n))
    bound = ONE - (n + 1) * dyadic(n)
    return LengthAnalysis(n, tuple(pts), length, incs, tuple(deficits), flat, cond, bound)
