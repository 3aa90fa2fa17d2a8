"""Invariant suites for serialized objects, used by ``singhomeo verify``.

Sample points come from a Kronecker lattice (fractional parts of multiples
of irrational square roots), so the suite needs no seed and is repeatable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cantor import CantorScheme, elementary_length, elementary_length_recursive
from .errors import UnsupportedExpression
from .homeo import CubeBall, HomeoExpr, roundtrip_error
from .interval_fn import PLFunc
from .rational import fmt


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: object = None
    detail: str = ""

    def to_dict(self) -> dict:
        v = self.value
        if not isinstance(v, (bool, int, float, str, type(None))):
            v = fmt(v)
        return {"name": self.name, "passed": self.passed, "value": v, "detail": self.detail}


_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19)


def lattice(count: int, d: int) -> np.ndarray:
    """``count`` points of the lattice ``frac((i + 1/2) sqrt(p_j))`` in ``[0, 1]^d``."""
    if d > len(_PRIMES):
        raise UnsupportedExpression(f"lattice supports d <= {len(_PRIMES)}")
    alpha = np.sqrt(np.asarray(_PRIMES[:d], dtype=float))
    i = np.arange(count, dtype=float)[:, None] + 0.5
    return np.mod(i * alpha, 1.0)


def _face_points(count: int, d: int) -> np.ndarray:
    pts = lattice(count, d)
    for j in range(count):
        axis = j % d
        pts[j, axis] = float((j // d) % 2)
    return pts


def verify_homeo(e: HomeoExpr, points: int = 10_000, tol: float = 1e-10) -> list[Check]:
    x = lattice(points, e.d)
    out = []
    y = e.eval(x)
    to_disc = isinstance(e, CubeBall)
    if not to_disc:
        out.append(Check("image_in_cube", bool(np.all((y >= 0) & (y <= 1))),
                         float(max(-y.min(), y.max() - 1, 0.0))))
    err = roundtrip_error(e, x)
    path = "float"
    if not err < tol:
        try:
            err = roundtrip_error(e, x, prec=128)
            path = "mpfr-128"
        except UnsupportedExpression:
            pass
    out.append(Check("roundtrip", err < tol, err, f"sup-norm error on {points} points ({path})"))
    if to_disc:
        return out
    fp = _face_points(max(64, points // 50), e.d)
    fy = e.eval(fp)
    gap = float(np.max(np.min(np.minimum(fy, 1.0 - fy), axis=1)))
    out.append(Check("boundary_to_boundary", gap < 1e-12, gap))
    return out


def verify_pl(f: PLFunc) -> list[Check]:
    out = [Check("breakpoints_increasing", all(a < b for a, b in zip(f.xs, f.xs[1:])),
                 f.n_pieces)]
    if f.monotone_homeo:
        inc = f.increment_sum()
        out.append(Check("increment_sum_is_2", inc == 2, inc))
        L = f.polyline_length()
        out.append(Check("length_at_most_2", L <= 2.0, L))
        back = f.inverse()
        ok = all(back.eval(f.eval(x)) == x for x in f.xs)
        out.append(Check("exact_inverse_on_breakpoints", ok, None))
    return out


def verify_cantor(c: CantorScheme, levels: int = 20) -> list[Check]:
    ok = all(elementary_length_recursive(n) == elementary_length(n) for n in range(levels + 1))
    out = [Check("elementary_length", ok, levels)]
    half = c.width / 2
    deficits = all((1 << n) * c.b(n) - half == c.width / (1 << (n + 1)) for n in range(levels + 1))
    out.append(Check("limit_deficit", deficits, levels))
    return out


def verify_object(obj) -> list[Check]:
    if isinstance(obj, HomeoExpr):
        return verify_homeo(obj)
    if isinstance(obj, PLFunc):
        return verify_pl(obj)
    if isinstance(obj, CantorScheme):
        return verify_cantor(obj)
    raise UnsupportedExpression(f"nothing to verify for {type(obj).__name__}")


def describe(obj) -> dict:
    """Parameters and structure for ``singhomeo inspect``."""
    if isinstance(obj, HomeoExpr):
        nodes = list(obj.walk())
        return {
            "kind": "homeo",
            "d": obj.d,
            "root": obj.tag,
            "nodes": len(nodes),
            "primitives": sorted({n.tag for n in nodes}),
            "sup_displacement": obj.sup_displacement(),
        }
    if isinstance(obj, PLFunc):
        lo, hi = obj.range()
        return {
            "kind": "pl",
            "pieces": obj.n_pieces,
            "monotone_homeo": bool(obj.monotone_homeo),
            "range": [fmt(lo), fmt(hi)],
            "length": obj.polyline_length(),
        }
    if isinstance(obj, CantorScheme):
        return {
            "kind": "cantor",
            "base": [fmt(obj.u), fmt(obj.v)],
            "measure": fmt(obj.width / 2),
            "b": [fmt(obj.b(n)) for n in range(6)],
        }
    raise UnsupportedExpression(type(obj).__name__)
