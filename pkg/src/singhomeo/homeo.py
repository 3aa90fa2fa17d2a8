"""Homeomorphisms of the unit cube as composable expression trees.

Every primitive has a closed-form inverse, so expressions are never sampled
onto grids.  Points are float arrays of shape ``(d,)`` or ``(N, d)``; a few
primitives also evaluate exactly on rational points (``eval_exact``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, ClassVar, Sequence

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .errors import ConfigError, DomainError, InvariantError, PreconditionError, UnsupportedExpression
from .interval_fn import PLFunc
from .rational import ONE, ZERO, dyadic, fmt, is_exact, parse_num, q, sqrt_ceil
from .singular import strongly_singular_1d
from . import zigzag as zz

_REGISTRY: dict[str, type] = {}


def _register(cls):
    _REGISTRY[cls.tag] = cls
    return cls


def _as_points(x, d: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != d:
        raise DomainError(f"expected points of dimension {d}, got shape {np.shape(x)}")
    return arr, single


def _check_cube(arr: np.ndarray) -> None:
    if arr.size and (not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0):
        raise DomainError("point outside the unit cube")

def _clamp(v):
    return min(max(v, 0), 1)


def _mp_points(x, d: int) -> list[tuple]:
    arr, _ = _as_points(x, d)
    _check_cube(arr)
    return [tuple(mpfr(float(v)) for v in row) for row in arr]


def roundtrip_error(e: HomeoExpr, x, prec: int | None = None) -> float:
    """``max |inverse_eval(eval(x)) - x|``, in floats or at ``prec`` bits."""
    arr, _ = _as_points(x, e.d)
    if prec is None:
        return float(np.max(np.abs(e.inverse_eval(e.eval(arr)) - arr)))
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        worst = mpfr(0)
        for p in _mp_points(arr, e.d):
            back = e._inv_mp(e._fwd_mp(p))
            worst = max(worst, max(abs(a - b) for a, b in zip(back, p)))
    return float(worst)



class HomeoExpr:
    """Base class.  Subclasses implement ``_fwd``/``_inv`` on ``(N, d)`` arrays."""

    tag: ClassVar[str] = ""
    d: int

    # float evaluation

    def eval(self, x) -> np.ndarray:
        arr, single = _as_points(x, self.d)
        _check_cube(arr)
        out = self._fwd(arr.copy())
        return out[0] if single else out

    def inverse_eval(self, y) -> np.ndarray:
        arr, single = _as_points(y, self.d)
        _check_cube(arr)
        out = self._inv(arr.copy())
        return out[0] if single else out

    __call__ = eval

    def _fwd(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _inv(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # exact evaluation, where available

    # high-precision evaluation

    def eval_mp(self, x, prec: int = 128) -> list[tuple]:
        """Evaluate in ``prec``-bit binary floating point (gmpy2 ``mpfr``)."""
        with gmpy2.context(gmpy2.get_context(), precision=prec):
            return [self._fwd_mp(p) for p in _mp_points(x, self.d)]

    def inverse_eval_mp(self, y, prec: int = 128) -> list[tuple]:
        with gmpy2.context(gmpy2.get_context(), precision=prec):
            return [self._inv_mp(p) for p in _mp_points(y, self.d)]

    def _fwd_mp(self, p: tuple) -> tuple:
        raise UnsupportedExpression(f"{self.tag} has no high-precision evaluation")

    def _inv_mp(self, p: tuple) -> tuple:
        raise UnsupportedExpression(f"{self.tag} has no high-precision evaluation")

    def eval_exact(self, x: Sequence) -> tuple:
        raise UnsupportedExpression(f"{self.tag} has no exact evaluation")

    # structure

    def children(self) -> tuple:
        return ()

    def walk(self):
        yield self
        for c in self.children():
            yield from c.walk()

    def params(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> dict:
        return {"tag": self.tag, **self.params()}

    @staticmethod
    def from_json(data: dict) -> HomeoExpr:
        if not isinstance(data, dict) or "tag" not in data:
            raise ConfigError("expression JSON needs a 'tag'")
        cls = _REGISTRY.get(data["tag"])
        if cls is None:
            raise ConfigError(f"unknown expression tag {data['tag']!r}")
        try:
            return cls._from_params(data)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, (ConfigError, DomainError, InvariantError, PreconditionError)):
                raise ConfigError(str(exc)) from exc
            raise ConfigError(f"malformed {data['tag']} expression: {exc}") from exc

    def __matmul__(self, other: HomeoExpr) -> HomeoExpr:
        return Compose(self, other)

    def inverse(self) -> HomeoExpr:
        return Inverse(self)

    def sup_displacement(self, samples: int = 4096, seed: int = 0) -> float:
        """Sampled ``max |e(x) - x|`` (sup norm)."""
        rng = np.random.default_rng(seed)
        x = rng.random((samples, self.d))
        return float(np.max(np.abs(self.eval(x) - x)))


def _pl_json(f: PLFunc) -> list:
    return f.to_json()


def _pl_load(data, monotone: bool = False) -> PLFunc:
    return PLFunc.from_json(data, monotone_homeo=monotone)


@_register
@dataclass(frozen=True)
class Identity(HomeoExpr):
    d: int
    tag: ClassVar[str] = "identity"

    def __post_init__(self):
        if self.d < 1:
            raise PreconditionError("dimension must be positive")

    def _fwd(self, x):
        return x

    def _inv(self, y):
        return y

    def _fwd_mp(self, p):
        return p

    def _inv_mp(self, p):
        return p

    def eval_exact(self, x):
        return tuple(q(v) for v in x)

    def params(self):
        return {"d": self.d}

    @classmethod
    def _from_params(cls, p):
        return cls(int(p["d"]))


@_register
@dataclass(frozen=True)
class Product1D(HomeoExpr):
    """``(x_1, ..., x_d) -> (f_1(x_1), ..., f_d(x_d))`` for monotone PL homeomorphisms."""

    fs: tuple
    tag: ClassVar[str] = "product1d"

    def __post_init__(self):
        fs = tuple(self.fs)
        if not fs:
            raise PreconditionError("need at least one factor")
        for f in fs:
            if not f.monotone_homeo:
                raise InvariantError("factors must be monotone homeomorphisms")
        object.__setattr__(self, "fs", fs)

    @property
    def d(self) -> int:
        return len(self.fs)

    @classmethod
    def power(cls, f: PLFunc, d: int) -> Product1D:
        return cls(tuple([f] * d))

    def _fwd(self, x):
        for i, f in enumerate(self.fs):
            x[:, i] = f.eval_array(x[:, i])
        return x

    def _inv(self, y):
        for i, f in enumerate(self.fs):
            y[:, i] = f.inverse().eval_array(y[:, i])
        return y

    def _fwd_mp(self, p):
        return tuple(mpfr(f.eval(v)) for f, v in zip(self.fs, p))

    def _inv_mp(self, p):
        return tuple(mpfr(f.inverse_eval(v)) for f, v in zip(self.fs, p))

    def eval_exact(self, x):
        return tuple(f.eval(q(v)) for f, v in zip(self.fs, x))

    def params(self):
        return {"fs": [_pl_json(f) for f in self.fs]}

    @classmethod
    def _from_params(cls, p):
        return cls(tuple(_pl_load(f, True) for f in p["fs"]))


@_register
@dataclass(frozen=True)
class PowerMap(HomeoExpr):
    """``x_i -> x_i^{s_i}`` with exponents in ``[1, 2]``."""

    s: tuple
    tag: ClassVar[str] = "powermap"

    def __post_init__(self):
        s = tuple(float(v) for v in self.s)
        if not s:
            raise PreconditionError("need at least one exponent")
        for v in s:
            if not 1.0 <= v <= 2.0:
                raise InvariantError(f"exponent {v} outside [1, 2]")
        object.__setattr__(self, "s", s)

    @property
    def d(self) -> int:
        return len(self.s)

    def _fwd(self, x):
        return np.power(x, np.asarray(self.s))

    def _inv(self, y):
        return np.power(y, 1.0 / np.asarray(self.s))

    def _fwd_mp(self, p):
        return tuple(v ** mpfr(e) for v, e in zip(p, self.s))

    def _inv_mp(self, p):
        return tuple(v ** (1 / mpfr(e)) for v, e in zip(p, self.s))

    def eval_exact(self, x):
        if all(v == 1.0 for v in self.s):
            return tuple(q(v) for v in x)
        if all(float(v).is_integer() for v in self.s):
            return tuple(q(v) ** int(s) for v, s in zip(x, self.s))
        raise UnsupportedExpression("non-integer exponents have no exact evaluation")

    def params(self):
        return {"s": list(self.s)}

    @classmethod
    def _from_params(cls, p):
        return cls(tuple(p["s"]))


@_register
@dataclass(frozen=True)
class Slide(HomeoExpr):
    """Shift coordinate 1 by ``phi(coordinate 2)``, tapered linearly near the faces.

    ``y1 (1 + phi/delta)`` on ``[0, delta]``, ``y1 + phi`` on the middle band
    and ``y1 + phi (1 - y1)/delta`` on ``[1 - delta, 1]``.
    """

    phi: PLFunc
    delta: Any
    d: int = 2
    tag: ClassVar[str] = "slide"

    def __post_init__(self):
        delta = q(self.delta) if is_exact(self.delta) or isinstance(self.delta, str) else float(self.delta)
        object.__setattr__(self, "delta", delta)
        if self.d < 2:
            raise PreconditionError("a slide needs d >= 2")
        if not 0 < delta < q(1, 2):
            raise PreconditionError("delta must lie in (0, 1/2)")
        lo, hi = self.phi.range()
        if max(abs(lo), abs(hi)) >= delta:
            raise InvariantError("slide needs sup|phi| < delta")

    @property
    def amplitude(self):
        lo, hi = self.phi.range()
        return max(abs(lo), abs(hi))

    def _fwd(self, x):
        dl = float(self.delta)
        y1 = x[:, 0]
        p = self.phi.eval_array(x[:, 1])
        z = np.where(
            y1 <= dl,
            y1 * (1.0 + p / dl),
            np.where(y1 >= 1.0 - dl, y1 + p * (1.0 - y1) / dl, y1 + p),
        )
        x[:, 0] = np.clip(z, 0.0, 1.0)
        return x

    def _inv(self, y):
        dl = float(self.delta)
        z = y[:, 0]
        p = self.phi.eval_array(y[:, 1])
        lo = dl + p
        hi = 1.0 - dl + p
        with np.errstate(divide="ignore", invalid="ignore"):
            y1 = np.where(
                z <= lo,
                z / (1.0 + p / dl),
                np.where(z >= hi, (z - p / dl) / (1.0 - p / dl), z - p),
            )
        y[:, 0] = np.clip(y1, 0.0, 1.0)
        return y

    def _fwd_mp(self, p):
        dl = mpfr(q(self.delta))
        y1, f = p[0], mpfr(self.phi.eval(p[1]))
        if y1 <= dl:
            z = y1 * (1 + f / dl)
        elif y1 >= 1 - dl:
            z = y1 + f * (1 - y1) / dl
        else:
            z = y1 + f
        return (_clamp(z), *p[1:])

    def _inv_mp(self, p):
        dl = mpfr(q(self.delta))
        z, f = p[0], mpfr(self.phi.eval(p[1]))
        if z <= dl + f:
            y1 = z / (1 + f / dl)
        elif z >= 1 - dl + f:
            y1 = (z - f / dl) / (1 - f / dl)
        else:
            y1 = z - f
        return (_clamp(y1), *p[1:])

    def eval_exact(self, x):
        x = tuple(q(v) for v in x)
        y1, p = x[0], self.phi.eval(x[1])
        dl = q(self.delta)
        if y1 <= dl:
            z = y1 * (1 + p / dl)
        elif y1 >= 1 - dl:
            z = y1 + p * (1 - y1) / dl
        else:
            z = y1 + p
        return (z, *x[1:])

    def params(self):
        return {"phi": _pl_json(self.phi), "delta": fmt(self.delta), "d": self.d}

    @classmethod
    def _from_params(cls, p):
        return cls(_pl_load(p["phi"]), parse_num(p["delta"]), int(p["d"]))


# cube <-> disc


def cube_to_disc(x: np.ndarray) -> np.ndarray:
    """First two coordinates of the unit cube to the closed unit disc.

    Squares ``|u|_inf = r`` (with ``u = 2x - 1``) go to circles of radius ``r``.
    """
    u = 2.0 * x[:, :2] - 1.0
    sup = np.max(np.abs(u), axis=1)
    euc = np.hypot(u[:, 0], u[:, 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.where(euc > 0, sup / euc, 0.0)
    out = x.copy()
    out[:, :2] = u * k[:, None]
    return out


def disc_to_cube(v: np.ndarray) -> np.ndarray:
    r = np.hypot(v[:, 0], v[:, 1])
    sup = np.max(np.abs(v[:, :2]), axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.where(sup > 0, r / sup, 0.0)
    out = v.copy()
    out[:, :2] = np.clip((v[:, :2] * k[:, None] + 1.0) / 2.0, 0.0, 1.0)
    return out


@_register
@dataclass(frozen=True)
class CubeBall(HomeoExpr):
    """The bi-Lipschitz radial map from the cube onto ``disc x [0,1]^(d-2)``.

    Its codomain is not the cube, so it is evaluated on its own and is not
    accepted inside compositions of cube maps.
    """

    d: int = 2
    tag: ClassVar[str] = "cube_ball"

    def __post_init__(self):
        if self.d < 2:
            raise PreconditionError("needs d >= 2")

    def eval(self, x):
        arr, single = _as_points(x, self.d)
        _check_cube(arr)
        out = cube_to_disc(arr)
        return out[0] if single else out

    def inverse_eval(self, y):
        arr, single = _as_points(y, self.d)
        if np.any(np.hypot(arr[:, 0], arr[:, 1]) > 1.0 + 1e-12):
            raise DomainError("point outside the disc")
        out = disc_to_cube(arr)
        return out[0] if single else out

    def params(self):
        return {"d": self.d}

    @classmethod
    def _from_params(cls, p):
        return cls(int(p["d"]))


@_register
@dataclass(frozen=True)
class RadialTwist(HomeoExpr):
    """``(r, alpha, y) -> (h(r), alpha + phi(r), y)`` transported to the cube.

    ``r`` is the sup-norm distance of ``2x - 1`` from the origin in the first
    two coordinates.  The boundary square ``r = 1`` is preserved as a set and
    fixed pointwise only when ``phi(1) = 0``.
    """

    h: PLFunc
    phi: PLFunc
    d: int = 2
    eps: Any = None
    N: int | None = None
    certified: tuple = ()
    tag: ClassVar[str] = "radial_twist"

    def __post_init__(self):
        if self.d < 2:
            raise PreconditionError("a radial twist needs d >= 2")
        if not self.h.monotone_homeo:
            raise InvariantError("h must be a monotone homeomorphism with h(0) = 0")
        lo, _ = self.phi.range()
        if lo < 0:
            raise InvariantError("phi must be nonnegative")

    def _polar(self, x):
        u = 2.0 * x[:, :2] - 1.0
        r = np.max(np.abs(u), axis=1)
        return r, np.arctan2(u[:, 1], u[:, 0])

    def _from_polar(self, base, r, a):
        c, s = np.cos(a), np.sin(a)
        k = r / np.maximum(np.abs(c), np.abs(s))
        out = base.copy()
        out[:, 0] = np.clip((k * c + 1.0) / 2.0, 0.0, 1.0)
        out[:, 1] = np.clip((k * s + 1.0) / 2.0, 0.0, 1.0)
        return out

    def _fwd(self, x):
        r, a = self._polar(x)
        return self._from_polar(x, self.h.eval_array(r), a + self.phi.eval_array(r))

    def _inv(self, y):
        r, a = self._polar(y)
        r0 = self.h.inverse().eval_array(r)
        return self._from_polar(y, r0, a - self.phi.eval_array(r0))

    @staticmethod
    def _polar_mp(p):
        u0, u1 = 2 * p[0] - 1, 2 * p[1] - 1
        return max(abs(u0), abs(u1)), gmpy2.atan2(u1, u0)

    @staticmethod
    def _from_polar_mp(p, r, a):
        c, s = gmpy2.cos(a), gmpy2.sin(a)
        k = r / max(abs(c), abs(s))
        return (_clamp((k * c + 1) / 2), _clamp((k * s + 1) / 2), *p[2:])

    def _fwd_mp(self, p):
        r, a = self._polar_mp(p)
        if r == 0:
            return p
        return self._from_polar_mp(p, mpfr(self.h.eval(r)), a + mpfr(self.phi.eval(r)))

    def _inv_mp(self, p):
        r, a = self._polar_mp(p)
        if r == 0:
            return p
        r0 = mpfr(self.h.inverse_eval(r))
        return self._from_polar_mp(p, r0, a - mpfr(self.phi.eval(r0)))

    def radius(self, x) -> np.ndarray:
        arr, _ = _as_points(x, self.d)
        return np.max(np.abs(2.0 * arr[:, :2] - 1.0), axis=1)

    def params(self):
        return {
            "h": _pl_json(self.h),
            "phi": _pl_json(self.phi),
            "d": self.d,
            "eps": None if self.eps is None else fmt(self.eps),
            "N": self.N,
            "certified": list(self.certified),
        }

    @classmethod
    def _from_params(cls, p):
        eps = p.get("eps")
        return cls(
            _pl_load(p["h"], True),
            _pl_load(p["phi"]),
            int(p["d"]),
            None if eps is None else parse_num(eps),
            p.get("N"),
            tuple(p.get("certified", ())),
        )


@_register
@dataclass(frozen=True)
class RadialExpand(HomeoExpr):
    """Radial map about ``center`` blowing ``B(center, r)`` up to nearly the whole cube.

    Along the ray from the center in direction ``u`` let ``R`` be the distance
    to the boundary.  Distances ``rho <= r`` scale to ``rho (R - eta')/r`` and
    ``[r, R]`` maps affinely onto ``[R - eta', R]``, ``eta' = min(eta, R - r)``.
    The image of the ball contains ``[eta, 1 - eta]^d`` once
    ``eta <= dist_inf(center, boundary) - r``, so its volume is at least
    ``(1 - 2 eta)^d >= 1 - 2 d eta``.
    """

    center: tuple
    r: float
    eta: float
    tag: ClassVar[str] = "radial_expand"

    def __post_init__(self):
        c = tuple(float(v) for v in self.center)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "eta", float(self.eta))
        if self.r <= 0 or self.eta <= 0:
            raise PreconditionError("r and eta must be positive")
        if min(min(c), 1 - max(c)) <= self.r:
            raise DomainError("the ball must lie inside the open cube")

    @property
    def d(self) -> int:
        return len(self.center)

    @staticmethod
    def squeeze_for(eps: float, d: int) -> float:
        """``eta`` guaranteeing image volume ``>= 1 - eps``."""
        return eps / (2 * d)

    def _ray(self, x):
        c = np.asarray(self.center)
        w = x - c
        rho = np.linalg.norm(w, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = np.where(rho[:, None] > 0, w / rho[:, None], 0.0)
            t_hi = np.where(u > 0, (1.0 - c) / u, np.inf)
            t_lo = np.where(u < 0, -c / u, np.inf)
        R = np.minimum(t_hi, t_lo).min(axis=1)
        R = np.where(rho > 0, R, 1.0)
        return c, u, rho, R

    def _fwd(self, x):
        c, u, rho, R = self._ray(x)
        e = np.minimum(self.eta, R - self.r)
        out = np.where(
            rho <= self.r,
            rho * (R - e) / self.r,
            (R - e) + (rho - self.r) * e / (R - self.r),
        )
        res = c + u * out[:, None]
        fixed = rho >= R
        res[fixed] = x[fixed]
        return np.clip(res, 0.0, 1.0)

    def _inv(self, y):
        c, u, rho, R = self._ray(y)
        e = np.minimum(self.eta, R - self.r)
        out = np.where(
            rho <= R - e,
            rho * self.r / (R - e),
            self.r + (rho - (R - e)) * (R - self.r) / e,
        )
        res = c + u * out[:, None]
        fixed = rho >= R
        res[fixed] = y[fixed]
        return np.clip(res, 0.0, 1.0)

    def _ray_mp(self, p):
        c = [mpfr(v) for v in self.center]
        w = [a - b for a, b in zip(p, c)]
        rho = gmpy2.sqrt(sum(v * v for v in w))
        if rho == 0:
            return c, w, rho, None
        u = [v / rho for v in w]
        R = min(
            ((1 - ci) / ui if ui > 0 else -ci / ui) for ci, ui in zip(c, u) if ui != 0
        )
        return c, u, rho, R

    def _fwd_mp(self, p):
        c, u, rho, R = self._ray_mp(p)
        if R is None or rho >= R:
            return p
        r, e = mpfr(self.r), min(mpfr(self.eta), R - mpfr(self.r))
        out = rho * (R - e) / r if rho <= r else (R - e) + (rho - r) * e / (R - r)
        return tuple(_clamp(ci + ui * out) for ci, ui in zip(c, u))

    def _inv_mp(self, p):
        c, u, rho, R = self._ray_mp(p)
        if R is None or rho >= R:
            return p
        r, e = mpfr(self.r), min(mpfr(self.eta), R - mpfr(self.r))
        out = rho * r / (R - e) if rho <= R - e else r + (rho - (R - e)) * (R - r) / e
        return tuple(_clamp(ci + ui * out) for ci, ui in zip(c, u))

    def params(self):
        return {"center": list(self.center), "r": self.r, "eta": self.eta}

    @classmethod
    def _from_params(cls, p):
        return cls(tuple(p["center"]), p["r"], p["eta"])


@_register
@dataclass(frozen=True)
class Compose(HomeoExpr):
    """``outer o inner``."""

    outer: HomeoExpr
    inner: HomeoExpr
    tag: ClassVar[str] = "compose"

    def __post_init__(self):
        for part in (self.outer, self.inner):
            if isinstance(part, CubeBall):
                raise PreconditionError("the cube-to-disc map cannot be composed with cube maps")
        if self.outer.d != self.inner.d:
            raise PreconditionError(f"dimension mismatch {self.outer.d} vs {self.inner.d}")

    @property
    def d(self) -> int:
        return self.inner.d

    def _fwd(self, x):
        return self.outer._fwd(np.clip(self.inner._fwd(x), 0.0, 1.0))

    def _inv(self, y):
        return self.inner._inv(np.clip(self.outer._inv(y), 0.0, 1.0))

    def _fwd_mp(self, p):
        return self.outer._fwd_mp(self.inner._fwd_mp(p))

    def _inv_mp(self, p):
        return self.inner._inv_mp(self.outer._inv_mp(p))

    def eval_exact(self, x):
        return self.outer.eval_exact(self.inner.eval_exact(x))

    def children(self):
        return (self.outer, self.inner)

    def params(self):
        return {"outer": self.outer.to_json(), "inner": self.inner.to_json()}

    @classmethod
    def _from_params(cls, p):
        return cls(HomeoExpr.from_json(p["outer"]), HomeoExpr.from_json(p["inner"]))


@_register
@dataclass(frozen=True)
class Inverse(HomeoExpr):
    inner: HomeoExpr
    tag: ClassVar[str] = "inverse"

    def __post_init__(self):
        if isinstance(self.inner, CubeBall):
            raise PreconditionError("the cube-to-disc map cannot be inverted as a cube map")

    @property
    def d(self) -> int:
        return self.inner.d

    def _fwd(self, x):
        return self.inner._inv(x)

    def _inv(self, y):
        return self.inner._fwd(y)

    def _fwd_mp(self, p):
        return self.inner._inv_mp(p)

    def _inv_mp(self, p):
        return self.inner._fwd_mp(p)

    def eval_exact(self, x):
        if isinstance(self.inner, Product1D):
            return tuple(f.inverse_eval(q(v)) for f, v in zip(self.inner.fs, x))
        if isinstance(self.inner, Identity):
            return tuple(q(v) for v in x)
        raise UnsupportedExpression("exact inverse only for product maps")

    def children(self):
        return (self.inner,)

    def params(self):
        return {"inner": self.inner.to_json()}

    @classmethod
    def _from_params(cls, p):
        return cls(HomeoExpr.from_json(p["inner"]))


def compose(*exprs: HomeoExpr) -> HomeoExpr:
    """``compose(a, b, c) = a o b o c``."""
    if not exprs:
        raise PreconditionError("nothing to compose")
    out = exprs[-1]
    for e in reversed(exprs[:-1]):
        out = Compose(e, out)
    return out


# constructors


def slide(phi: PLFunc, delta, d: int = 2) -> Slide:
    return Slide(phi, delta, d)


def twist_threshold(s: zz.SSequence, eps) -> int:
    """Minimal ``N`` with ``max(2^-N, 4 sqrt(s_N)) < eps`` (compared exactly via squares)."""
    eps = q(eps)
    if not 0 < eps < 1:
        raise PreconditionError("eps must lie in (0, 1)")
    n = 0
    while not (dyadic(n) < eps and 16 * s(n) < eps * eps):
        n += 1
        if n > 4096:
            raise PreconditionError("no admissible N found")
    return n


def twist_profile(s: zz.SSequence, eps, N: int | None = None, extra: int = 12) -> PLFunc:
    """Radial profile with ``h(2^-n) = s_n`` for ``N <= n <= N + extra``.

    ``h`` is the identity beyond ``eps``, affine between the nodes and linear
    from the last node down to 0.
    """
    eps = q(eps)
    floor = twist_threshold(s, eps)
    N = floor if N is None else N
    if N < floor:
        raise PreconditionError(f"N must be at least {floor}")
    pts = [(ZERO, ZERO)]
    for k in range(N + extra, N - 1, -1):
        pts.append((dyadic(k), s(k)))
    pts.append((eps, eps))
    pts.append((ONE, ONE))
    return PLFunc.from_points(pts, monotone_homeo=True)


def twist_driver(s: zz.SSequence, amplitude) -> zz.SSequence:
    """Sequence whose zig-zag, scaled by ``amplitude``, oscillates by ``>= 4 sqrt(s_n)``."""
    amplitude = q(amplitude)

    def fn(n, s=s, amplitude=amplitude):
        return min(ONE, 4 * sqrt_ceil(s(n)) / amplitude)

    return zz.SSequence(f"twist({s.name},{amplitude})", fn)


def _osc_certified(phi: PLFunc, s: zz.SSequence, ns, cache: dict) -> list[int]:
    """Scales ``n`` at which every window of length ``2^-n`` oscillates by ``>= 4 sqrt(s_n)``.

    A window of length ``2^-n`` contains a dyadic one of length ``2^-(n+1)``,
    so both dyadic levels are checked.
    """
    good = []
    for n in ns:
        for k in (n, n + 1):
            if k not in cache:
                cache[k] = zz.min_window_oscillation(phi, k)
        # osc >= 4 sqrt(s)  <=>  osc^2 >= 16 s
        if min(cache[n], cache[n + 1]) ** 2 >= 16 * s(n):
            good.append(n)
    return good


def radial_twist(h: PLFunc, phi: PLFunc, d: int = 2, eps=None, N=None, certified=()) -> RadialTwist:
    if h.eval(ZERO) != 0:
        raise InvariantError("h(0) must be 0")
    return RadialTwist(h, phi, d, eps, N, tuple(certified))


def nowhere_twist(
    s: zz.SSequence | str,
    d: int = 2,
    eps=None,
    span: int = 5,
    max_stages: int = 2,
    max_shift: int = 16,
) -> RadialTwist:
    """The radial twist of the nowhere-differentiability construction.

    The zig-zag is scaled by ``2 eps`` so its values fill ``[0, eps]``.  ``N``
    starts at the threshold and is raised until the oscillation bound is
    certified on every window at scales ``N..N + span``, using as few stages
    as possible.
    """
    if isinstance(s, str):
        s = zz.SSequence.parse(s)
    eps = q(1, 4) if eps is None else q(eps)
    floor = twist_threshold(s, eps)
    amp = 2 * eps
    driver = twist_driver(s, amp)
    for M in range(1, max_stages + 1):
        spec = zz.build(driver, M)
        phi = spec.phi(M).scale(amp)
        cache: dict = {}
        for N in range(floor, floor + max_shift + 1):
            want = list(range(N, N + span + 1))
            if _osc_certified(phi, s, want, cache) == want:
                h = twist_profile(s, eps, N, extra=span + 8)
                return radial_twist(h, phi, d, eps, N, want)
    raise PreconditionError(f"oscillation not certified within {max_stages} stages")


def singular_product(m: int, d: int, p: int = 3) -> Product1D:
    return Product1D.power(strongly_singular_1d(m, p), d)


def radial_expand(center: Sequence[float], r: float, eta: float) -> RadialExpand:
    return RadialExpand(tuple(center), r, eta)


# witnesses


@dataclass(frozen=True)
class WitnessSample:
    s: tuple
    t: tuple
    expr: HomeoExpr
    seed: Any = field(default=None)


def witness(f0: HomeoExpr, s: Sequence[float], t: Sequence[float], seed=None) -> WitnessSample:
    expr = compose(PowerMap(tuple(s)), f0, PowerMap(tuple(t)))
    return WitnessSample(tuple(float(v) for v in s), tuple(float(v) for v in t), expr, seed)


def sample_witness(f0: HomeoExpr, seed) -> WitnessSample:
    """Exponent vectors ``s, t`` drawn uniformly from ``[1, 2]^d``."""
    if seed is None:
        raise PreconditionError("a seed is required")
    rng = np.random.default_rng(seed)
    s = rng.uniform(1.0, 2.0, f0.d)
    t = rng.uniform(1.0, 2.0, f0.d)
    return witness(f0, s, t, seed)


def sample_witnesses(f0: HomeoExpr, seed: int, count: int) -> list[WitnessSample]:
    """Independent streams spawned from one seed, reproducible batch by batch."""
    children = np.random.SeedSequence(seed).spawn(count)
    out = []
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        s = rng.uniform(1.0, 2.0, f0.d)
        t = rng.uniform(1.0, 2.0, f0.d)
        out.append(witness(f0, s, t, (seed, i)))
    return out


def random_monotone_pl(rng: np.random.Generator, pieces: int, denom_bits: int = 12) -> PLFunc:
    """Random monotone PL homeomorphism with dyadic rational breakpoints."""
    scale = 1 << denom_bits
    while True:
        xs = sorted({0, scale, *rng.integers(1, scale, size=pieces - 1).tolist()})
        ys = sorted({0, scale, *rng.integers(1, scale, size=pieces - 1).tolist()})
        if len(xs) == len(ys):
            break
    return PLFunc(tuple(q(v) / scale for v in xs), tuple(q(v) / scale for v in ys), True)


def random_expr(rng: np.random.Generator, d: int, depth: int) -> HomeoExpr:
    """Random composition of ``depth`` primitives, for roundtrip testing."""
    parts = []
    for _ in range(depth):
        kind = int(rng.integers(0, 5 if d >= 2 else 2))
        if kind == 0:
            parts.append(Product1D(tuple(random_monotone_pl(rng, int(rng.integers(2, 8))) for _ in range(d))))
        elif kind == 1:
            parts.append(PowerMap(tuple(rng.uniform(1.0, 2.0, d))))
        elif kind == 2:
            delta = q(1, 4)
            k = int(rng.integers(2, 7))
            xs = [q(i, k) for i in range(k + 1)]
            ys = [q(int(rng.integers(-60, 61)), 256) for _ in xs]
            parts.append(Slide(PLFunc(tuple(xs), tuple(ys)), delta, d))
        elif kind == 3:
            eps = q(1, 4)
            h = PLFunc.from_points([(0, 0), (q(1, 8), q(1, 64)), (eps, eps), (1, 1)], True)
            k = int(rng.integers(2, 9))
            phi = PLFunc(tuple(q(i, k) for i in range(k + 1)),
                         tuple(q(int(rng.integers(0, 65)), 256) for _ in range(k + 1)))
            parts.append(RadialTwist(h, phi, d))
        else:
            c = rng.uniform(0.35, 0.65, d)
            parts.append(RadialExpand(tuple(c), 0.1, 0.05))
    return compose(*parts)


def random_pa_expr(rng: np.random.Generator, d: int, depth: int, pieces: int = 5) -> HomeoExpr:
    """Random composition of products and slides (piecewise affine, ``d <= 2``).

    Slides use ``delta = 1/8`` and profiles bounded by ``1/16``.  Whether a
    given box stays inside the slides' untapered bands is left to the caller.
    """
    parts = []
    for _ in range(depth):
        if d == 1 or rng.integers(0, 2) == 0:
            parts.append(Product1D(tuple(random_monotone_pl(rng, int(rng.integers(2, pieces + 1)))
                                         for _ in range(d))))
        else:
            k = int(rng.integers(2, pieces + 2))
            xs = [q(i, k) for i in range(k + 1)]
            ys = [q(int(rng.integers(-15, 16)), 256) for _ in xs]
            parts.append(Slide(PLFunc(tuple(xs), tuple(ys)), q(1, 8), d))
    return compose(*parts)
