"""Stagewise construction of strongly singular monotone PL homeomorphisms.

Each stage plants scaled fat Cantor copies on dyadic blocks inside the
intervals the previous stage left linear, and squeezes the image of every
planted elementary interval to at most ``diam^p``.  A finite stage can only
resolve finitely many levels of each copy: new copies start at ``depth``
levels and every older copy gains one level per stage.  Below its current
resolution a copy is left affine.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cantor import dyadic_exponent, elementary_length
from .errors import InvariantError, PreconditionError
from .interval_fn import PLFunc
from .rational import ONE, ZERO, dyadic


@dataclass(frozen=True)
class PlantedInterval:
    stage: int
    level: int
    lo: object
    hi: object
    image: object

    @property
    def length(self):
        return self.hi - self.lo


@dataclass(frozen=True)
class SingularConstruction:
    p: int
    depth: int
    stages: tuple
    blocks: tuple
    planted: tuple

    def f(self, m: int | None = None) -> PLFunc:
        return self.stages[len(self.stages) - 1 if m is None else m]


def _block_level(gap_lo, gap_hi, image, stage: int) -> int:
    """Smallest dyadic block size dividing the gap with per-block image <= 2^-stage."""
    length = gap_hi - gap_lo
    n = dyadic_exponent(length)
    bound = dyadic(stage)
    while image * dyadic(n) / length > bound:
        n += 1
    return n


def _plant(a, b, A, B, width, level, depth, p, stage, out_pts, out_gaps, out_leaves, out_planted):
    """Resolve the copy on ``[a, b]`` from ``level`` down to ``depth``.

    Appends interior breakpoints to ``out_pts``, new open intervals to
    ``out_gaps`` and the unresolved level-``depth`` intervals to ``out_leaves``.
    """
    if level == depth:
        out_leaves.append(_Leaf(a, b, A, B, width, level))
        return
    side = width * elementary_length(level + 1)
    c = min(side**p, (B - A) / 3)
    lo1, hi1 = a, a + side
    lo2, hi2 = b - side, b
    out_planted.append(PlantedInterval(stage, level + 1, lo1, hi1, c))
    out_planted.append(PlantedInterval(stage, level + 1, lo2, hi2, c))
    args = (width, level + 1, depth, p, stage, out_pts, out_gaps, out_leaves, out_planted)
    _plant(lo1, hi1, A, A + c, *args)
    out_pts.append((hi1, A + c))
    out_gaps.append((hi1, lo2))
    out_pts.append((lo2, B - c))
    _plant(lo2, hi2, B - c, B, *args)


@dataclass(frozen=True)
class _Leaf:
    a: object
    b: object
    A: object
    B: object
    width: object
    level: int


def build_singular(m: int, p: int = 3, depth: int = 1) -> SingularConstruction:
    """Stages ``f_0 = id, f_1, ..., f_m``.

    At stage ``n`` the intervals left affine by stage ``n - 1`` receive new
    copies resolved to ``depth`` levels, and every earlier copy is resolved
    one level further, so each copy planted at stage ``j`` is resolved to
    ``depth + n - j`` levels after stage ``n``.
    """
    if m < 0 or p < 1 or depth < 1:
        raise PreconditionError("need m >= 0, p >= 1, depth >= 1")
    f = PLFunc.identity()
    stages = [f]
    gaps = [(ZERO, ONE)]
    leaves: list[_Leaf] = []
    blocks_per_stage = []
    planted: list[PlantedInterval] = []
    for n in range(1, m + 1):
        inserts: dict = {}
        stage_blocks = []
        new_gaps: list = []
        new_leaves: list[_Leaf] = []
        for lo, hi in gaps:
            F0, F1 = f.eval(lo), f.eval(hi)
            N = _block_level(lo, hi, F1 - F0, n)
            step = dyadic(N)
            count = int((hi - lo) / step)
            slope = (F1 - F0) / (hi - lo)
            pts = []
            for j in range(count):
                a, b = lo + step * j, lo + step * (j + 1)
                A, B = F0 + slope * (a - lo), F0 + slope * (b - lo)
                stage_blocks.append((a, b))
                if j > 0:
                    pts.append((a, A))
                _plant(a, b, A, B, b - a, 0, depth, p, n, pts, new_gaps, new_leaves, planted)
            inserts[lo] = pts
        for lf in leaves:
            pts = []
            _plant(lf.a, lf.b, lf.A, lf.B, lf.width, lf.level, lf.level + 1, p, n,
                   pts, new_gaps, new_leaves, planted)
            inserts[lf.a] = pts
        xs, ys = [], []
        for x, y in zip(f.xs, f.ys):
            xs.append(x)
            ys.append(y)
            for px, py in inserts.get(x, ()):
                xs.append(px)
                ys.append(py)
        f = PLFunc(tuple(xs), tuple(ys), True)
        stages.append(f)
        blocks_per_stage.append(tuple(stage_blocks))
        gaps, leaves = new_gaps, new_leaves
    return SingularConstruction(p, depth, tuple(stages), tuple(blocks_per_stage), tuple(planted))


def strongly_singular_1d(m: int, p: int = 3, depth: int = 1) -> PLFunc:
    """The stage-``m`` strongly singular monotone homeomorphism (gauge ``r^p``)."""
    return build_singular(m, p, depth).f(m)


def audit_gauge(con: SingularConstruction) -> list[PlantedInterval]:
    """Planted intervals whose final image exceeds ``diam^p`` (should be empty)."""
    f = con.f()
    bad = []
    for iv in con.planted:
        img = f.eval(iv.hi) - f.eval(iv.lo)
        if img != iv.image:
            raise InvariantError("planted image changed after its stage")
        if img > iv.length**con.p:
            bad.append(iv)
    return bad
