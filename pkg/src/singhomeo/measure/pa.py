"""Exact affine-cell decompositions of piecewise-affine expressions.

A cell is a convex region of the domain (an interval for ``d = 1``, a convex
polygon for ``d = 2``) on which the expression is ``x -> A x + b``.  All
arithmetic is rational, so areas and masses built from cells are exact.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from itertools import combinations

from ..errors import DomainError, PreconditionError, UnsupportedExpression
from ..homeo import Compose, HomeoExpr, Identity, Inverse, PowerMap, Product1D, Slide
from ..interval_fn import PLFunc
from ..rational import ONE, ZERO, q


def as_box(Q, d: int) -> tuple:
    """Normalise ``Q``: one ``(lo, hi)`` pair for every axis, or a list of pairs."""
    if Q is None:
        return tuple((ZERO, ONE) for _ in range(d))
    Q = list(Q)
    if len(Q) == 2 and not isinstance(Q[0], (tuple, list)):
        Q = [tuple(Q)] * d
    if len(Q) != d:
        raise DomainError(f"box has {len(Q)} sides, expected {d}")
    out = []
    for lo, hi in Q:
        lo, hi = q(lo), q(hi)
        if not 0 <= lo < hi <= 1:
            raise DomainError(f"bad box side [{lo}, {hi}]")
        out.append((lo, hi))
    return tuple(out)


# convex regions


def box_region(box: tuple) -> tuple:
    """Vertices of an axis box (d = 1 or 2), counter-clockwise."""
    if len(box) == 1:
        (lo, hi), = box
        return ((lo,), (hi,))
    if len(box) == 2:
        (a, b), (c, e) = box
        return ((a, c), (b, c), (b, e), (a, e))
    raise UnsupportedExpression("cell decompositions are implemented for d <= 2")


def _dot(c, v):
    return sum((ci * vi for ci, vi in zip(c, v)), ZERO)


def clip(region: tuple, c, t) -> tuple:
    """``region`` intersected with the half-space ``c . x <= t``."""
    if not region:
        return region
    if len(region[0]) == 1:
        lo, hi = region[0][0], region[-1][0]
        a = c[0]
        if a == 0:
            return region if 0 <= t else ()
        bound = t / a
        if a > 0:
            hi = min(hi, bound)
        else:
            lo = max(lo, bound)
        return ((lo,), (hi,)) if lo <= hi else ()
    out = []
    n = len(region)
    vals = [_dot(c, p) - t for p in region]
    for i in range(n):
        p, w = region[i], vals[i]
        p2, w2 = region[(i + 1) % n], vals[(i + 1) % n]
        if w <= 0:
            out.append(p)
        if (w < 0 < w2) or (w2 < 0 < w):
            s = w / (w - w2)
            out.append(tuple(a + s * (b - a) for a, b in zip(p, p2)))
    # drop repeated vertices
    dedup = []
    for p in out:
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return tuple(dedup)


def clip_slab(region: tuple, c, lo, hi) -> tuple:
    r = clip(region, c, hi)
    return clip(r, tuple(-v for v in c), -lo)


def volume(region: tuple):
    if not region:
        return ZERO
    if len(region[0]) == 1:
        return region[-1][0] - region[0][0]
    if len(region) < 3:
        return ZERO
    s = ZERO
    for (x0, y0), (x1, y1) in zip(region, region[1:] + region[:1]):
        s += x0 * y1 - x1 * y0
    return abs(s) / 2


def centroid(region: tuple) -> tuple:
    n = len(region)
    return tuple(sum((p[i] for p in region), ZERO) / n for i in range(len(region[0])))


# affine cells


@dataclass(frozen=True)
class Cell:
    region: tuple
    A: tuple
    b: tuple

    @property
    def d(self) -> int:
        return len(self.b)

    @property
    def volume(self):
        return volume(self.region)

    def image(self, x: tuple) -> tuple:
        return tuple(_dot(row, x) + bi for row, bi in zip(self.A, self.b))

    def coord(self, i: int) -> tuple:
        """Coefficients and offset of output coordinate ``i`` as a function of ``x``."""
        return self.A[i], self.b[i]


def _identity_matrix(d: int) -> tuple:
    return tuple(tuple(ONE if i == j else ZERO for j in range(d)) for i in range(d))


def _split(cell: Cell, i: int, cuts) -> list[Cell]:
    """Split ``cell`` along output coordinate ``i`` at the sorted values ``cuts``."""
    row, off = cell.coord(i)
    vals = [_dot(row, p) + off for p in cell.region]
    lo, hi = min(vals), max(vals)
    inner = [t for t in cuts if lo < t < hi]
    if not inner:
        return [cell]
    out = []
    rest = cell.region
    for t in inner:
        below = clip(rest, row, t - off)
        if volume(below) > 0:
            out.append(Cell(below, cell.A, cell.b))
        rest = clip(rest, tuple(-v for v in row), off - t)
    if volume(rest) > 0:
        out.append(Cell(rest, cell.A, cell.b))
    return out


def _value_at_centroid(cell: Cell, i: int):
    row, off = cell.coord(i)
    return _dot(row, centroid(cell.region)) + off


def _piece(f: PLFunc, y) -> tuple:
    """Slope and intercept of the piece of ``f`` containing ``y`` (interior point)."""
    j = min(max(bisect_right(f.xs, y) - 1, 0), f.n_pieces - 1)
    x0, x1, y0, y1 = f.xs[j], f.xs[j + 1], f.ys[j], f.ys[j + 1]
    s = (y1 - y0) / (x1 - x0)
    return s, y0 - s * x0


def _post(cell: Cell, i: int, slope, icpt) -> Cell:
    """Compose output coordinate ``i`` with ``y -> slope y + icpt``."""
    A = list(cell.A)
    b = list(cell.b)
    A[i] = tuple(slope * v for v in A[i])
    b[i] = slope * b[i] + icpt
    return Cell(cell.region, tuple(A), tuple(b))


def _apply_product(cells: list[Cell], fs) -> list[Cell]:
    for i, f in enumerate(fs):
        nxt = []
        for c in cells:
            for piece in _split(c, i, f.xs[1:-1]):
                s, k = _piece(f, _value_at_centroid(piece, i))
                nxt.append(_post(piece, i, s, k))
        cells = nxt
    return cells


def _apply_slide(cells: list[Cell], sl: Slide, inverse: bool) -> list[Cell]:
    phi, dl = sl.phi, q(sl.delta)
    out = []
    for c in cells:
        for piece in _split(c, 1, phi.xs[1:-1]):
            beta, alpha = _piece(phi, _value_at_centroid(piece, 1))
            # band boundaries: y1 = delta, 1 - delta (forward) or
            # y1 - phi(y2) = delta, 1 - delta (inverse), with phi = alpha + beta y2
            r0, o0 = piece.coord(0)
            r1, o1 = piece.coord(1)
            if inverse:
                row = tuple(a - beta * b for a, b in zip(r0, r1))
                off = o0 - beta * o1 - alpha
            else:
                row, off = r0, o0
            for t_lo, t_hi, band in ((None, dl, 0), (dl, 1 - dl, 1), (1 - dl, None, 2)):
                reg = piece.region
                if t_hi is not None:
                    reg = clip(reg, row, t_hi - off)
                if t_lo is not None:
                    reg = clip(reg, tuple(-v for v in row), off - t_lo)
                if volume(reg) == 0:
                    continue
                sub = Cell(reg, piece.A, piece.b)
                if band == 1:
                    # y1 +/- (alpha + beta y2)
                    sign = -1 if inverse else 1
                    A = list(sub.A)
                    b = list(sub.b)
                    A[0] = tuple(a + sign * beta * v for a, v in zip(A[0], A[1]))
                    b[0] = b[0] + sign * (beta * b[1] + alpha)
                    out.append(Cell(reg, tuple(A), tuple(b)))
                    continue
                if beta != 0:
                    raise UnsupportedExpression(
                        "a slide is not affine in its tapering bands where phi is not constant"
                    )
                if band == 0:
                    k = (1 + alpha / dl)
                    out.append(_post(sub, 0, 1 / k if inverse else k, ZERO))
                else:
                    k = 1 - alpha / dl
                    if inverse:
                        out.append(_post(sub, 0, 1 / k, -(alpha / dl) / k))
                    else:
                        out.append(_post(sub, 0, k, alpha / dl))
    return out


def _apply(cells: list[Cell], e: HomeoExpr, inverse: bool = False) -> list[Cell]:
    if isinstance(e, Identity):
        return cells
    if isinstance(e, PowerMap):
        if all(s == 1.0 for s in e.s):
            return cells
        raise UnsupportedExpression("power maps are not piecewise affine")
    if isinstance(e, Product1D):
        return _apply_product(cells, [f.inverse() for f in e.fs] if inverse else e.fs)
    if isinstance(e, Slide):
        if e.d != 2:
            raise UnsupportedExpression("cell decompositions are implemented for d <= 2")
        return _apply_slide(cells, e, inverse)
    if isinstance(e, Compose):
        if inverse:
            return _apply(_apply(cells, e.outer, True), e.inner, True)
        return _apply(_apply(cells, e.inner), e.outer)
    if isinstance(e, Inverse):
        return _apply(cells, e.inner, not inverse)
    raise UnsupportedExpression(f"{e.tag} is not piecewise affine")


def pa_cells(e: HomeoExpr | PLFunc, Q=None) -> list[Cell]:
    """Affine cells of ``e`` restricted to the axis box ``Q``.

    Raises :class:`UnsupportedExpression` for anything that is not piecewise
    affine on ``Q`` (power maps, radial maps, slides with a non-constant
    profile in a tapering band).
    """
    if isinstance(e, PLFunc):
        box = as_box(Q, 1)
        cells = [Cell(box_region(box), ((ONE,),), (ZERO,))]
        return _apply_product(cells, [e])
    if e.d > 2:
        raise UnsupportedExpression("cell decompositions are implemented for d <= 2")
    box = as_box(Q, e.d)
    cells = [Cell(box_region(box), _identity_matrix(e.d), tuple(ZERO for _ in range(e.d)))]
    return _apply(cells, e)


def is_pa(e, Q=None) -> bool:
    try:
        pa_cells(e, Q)
    except UnsupportedExpression:
        return False
    return True


# Jacobians


def det(M) -> object:
    """Exact determinant by fraction-free elimination over the rationals."""
    M = [list(r) for r in M]
    n = len(M)
    if n == 0:
        return ONE
    sign = 1
    out = ONE
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return ZERO
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            sign = -sign
        p = M[col][col]
        out *= p
        for r in range(col + 1, n):
            f = M[r][col] / p
            if f:
                for k in range(col, n):
                    M[r][k] -= f * M[col][k]
    return sign * out


def gram_cauchy_binet(A) -> object:
    """``det(I + A^T A)`` as the sum of squared maximal minors of ``[I; A]``."""
    d = len(A)
    G = [tuple(ONE if i == j else ZERO for j in range(d)) for i in range(d)] + [tuple(r) for r in A]
    if len(G) < d:
        raise PreconditionError("matrix too small")
    return sum((det([G[i] for i in rows]) ** 2 for rows in combinations(range(2 * d), d)), ZERO)


def gram_direct(A) -> object:
    d = len(A)
    M = [[(ONE if i == j else ZERO) + sum((A[k][i] * A[k][j] for k in range(d)), ZERO)
          for j in range(d)] for i in range(d)]
    return det(M)
