"""Pushforward measures on the dyadic grid and their singularity diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import DomainError, PreconditionError
from ..homeo import Compose, HomeoExpr, Identity, Inverse, PowerMap, Product1D
from ..rational import ONE, ZERO, dyadic, is_exact, q


# coordinatewise maps


@dataclass(frozen=True)
class _Axis:
    fwd: Callable
    inv: Callable
    exact: bool


def _ident(v):
    return v


def _power(e: float) -> Callable:
    def f(v, e=e):
        return float(v) ** e

    return f


def _chain(first: Callable, second: Callable) -> Callable:
    def f(v, a=first, b=second):
        return b(a(v))

    return f


def separable_axes(e: HomeoExpr) -> list[_Axis] | None:
    """Per-coordinate forward and inverse maps, or ``None`` if ``e`` mixes coordinates."""
    if isinstance(e, Identity):
        return [_Axis(_ident, _ident, True)] * e.d
    if isinstance(e, Product1D):
        return [_Axis(f.eval, f.inverse_eval, True) for f in e.fs]
    if isinstance(e, PowerMap):
        return [
            _Axis(_ident, _ident, True) if s == 1.0 else _Axis(_power(s), _power(1.0 / s), False)
            for s in e.s
        ]
    if isinstance(e, Compose):
        o, i = separable_axes(e.outer), separable_axes(e.inner)
        if o is None or i is None:
            return None
        return [_Axis(_chain(a.fwd, b.fwd), _chain(b.inv, a.inv), a.exact and b.exact)
                for b, a in zip(o, i)]
    if isinstance(e, Inverse):
        inner = separable_axes(e.inner)
        if inner is None:
            return None
        return [_Axis(a.inv, a.fwd, a.exact) for a in inner]
    return None


# histograms


@dataclass(frozen=True)
class OccupationHist:
    """Masses of ``lambda^d o e^-1`` on the ``2^-k`` grid, indexed ``[i_1, ..., i_d]``.

    Exact histograms hold rationals (object arrays).  Monte Carlo ones hold
    floats with a per-cell standard error.
    """

    k: int
    d: int
    masses: np.ndarray
    exact: bool
    stderr: np.ndarray | None = None
    samples: int | None = None
    marginals: tuple | None = None

    @property
    def cell_volume(self):
        return dyadic(self.k * self.d) if self.exact else 2.0 ** (-self.k * self.d)

    def total(self):
        if self.exact:
            return sum(self.masses.flat, ZERO)
        return float(self.masses.sum())

    def coarsen(self) -> OccupationHist:
        """The level-``k - 1`` histogram: each parent collects its ``2^d`` children."""
        if self.k < 1:
            raise PreconditionError("already at level 0")
        m = self.masses
        for axis in range(self.d):
            shape = list(m.shape)
            shape[axis : axis + 1] = [shape[axis] // 2, 2]
            m = m.reshape(shape).sum(axis=axis + 1)
        se = None
        if self.stderr is not None:
            v = self.stderr ** 2
            for axis in range(self.d):
                shape = list(v.shape)
                shape[axis : axis + 1] = [shape[axis] // 2, 2]
                v = v.reshape(shape).sum(axis=axis + 1)
            se = np.sqrt(v)
        marg = None
        if self.marginals is not None:
            marg = tuple(mm.reshape(-1, 2).sum(axis=1) for mm in self.marginals)
        return OccupationHist(self.k - 1, self.d, m, self.exact, se, self.samples, marg)

    def to_dict(self, cells: bool = False) -> dict:
        out = {
            "k": self.k,
            "d": self.d,
            "exact": self.exact,
            "total": str(self.total()) if self.exact else self.total(),
            "samples": self.samples,
            "max_mass": str(max(self.masses.flat)) if self.exact else float(self.masses.max()),
        }
        if cells:
            out["masses"] = [str(v) if self.exact else float(v) for v in self.masses.flat]
        return out


def _axis_masses(ax: _Axis, k: int) -> np.ndarray:
    n = 1 << k
    if ax.exact:
        pre = [q(ax.inv(q(j, n))) for j in range(n + 1)]
        return np.array([b - a for a, b in zip(pre, pre[1:])], dtype=object)
    pre = np.array([float(ax.inv(j / n)) for j in range(n + 1)])
    pre[0], pre[-1] = 0.0, 1.0
    return np.diff(pre)


def _outer(parts: list[np.ndarray]) -> np.ndarray:
    out = parts[0]
    for p in parts[1:]:
        out = np.multiply.outer(out, p)
    return out


def pushforward_hist(e: HomeoExpr, k: int, seed=None, samples: int = 10**6) -> OccupationHist:
    """Histogram of ``lambda^d o e^-1`` at resolution ``2^-k``.

    Coordinatewise maps (products, power maps and their compositions) give
    each cell mass as a product of one-dimensional preimage lengths, exact
    when every factor is rational.  Other maps are sampled (``seed`` required).
    """
    if k < 1:
        raise PreconditionError("k must be at least 1")
    axes = separable_axes(e)
    if axes is not None:
        exact = all(a.exact for a in axes)
        marg = [_axis_masses(a, k) for a in axes]
        if not exact:
            marg = [m.astype(float) for m in marg]
        return OccupationHist(k, e.d, _outer(marg), exact, None, None, tuple(marg))
    if seed is None:
        raise PreconditionError("sampling a non-product map needs a seed")
    rng = np.random.default_rng(seed)
    n = 1 << k
    counts = np.zeros((n,) * e.d, dtype=np.int64)
    left = samples
    while left > 0:
        batch = min(left, 1 << 18)
        y = e.eval(rng.random((batch, e.d)))
        idx = np.minimum((y * n).astype(np.int64), n - 1)
        np.add.at(counts, tuple(idx.T), 1)
        left -= batch
    p = counts / samples
    se = np.sqrt(p * (1 - p) / samples)
    return OccupationHist(k, e.d, p, False, se, samples, None)


def singularity_score(h: OccupationHist, eps) -> object:
    """Lebesgue measure of the fewest cells carrying mass ``>= 1 - eps``.

    Taking cells by decreasing mass is optimal for this objective.
    """
    if not 0 < float(eps) < 1:
        raise PreconditionError("eps must lie in (0, 1)")
    flat = list(h.masses.flat)
    if h.exact:
        target = ONE - q(eps)
        flat.sort(reverse=True)
        acc = ZERO
        count = 0
        for v in flat:
            if acc >= target:
                break
            acc += v
            count += 1
        return count * h.cell_volume
    arr = np.sort(np.asarray(flat, dtype=float))[::-1]
    cum = np.cumsum(arr)
    count = int(np.searchsorted(cum, (1.0 - float(eps)) * cum[-1] - 1e-12) + 1)
    return min(count, arr.size) * h.cell_volume


# local volume ratios


@dataclass(frozen=True)
class LocalRatio:
    """``lambda^d(e(B)) / lambda^d(B)`` for the sup-norm box ``B = B_inf(x, r)`` clipped to the cube.

    Against a Euclidean ball of the same radius multiply by ``2^d / omega_d``
    (``omega_d`` the unit-ball volume), e.g. ``4/pi`` for ``d = 2``.
    """

    value: object
    stderr: float | None
    method: str
    box: tuple


def local_ratio(e: HomeoExpr, x, r, seed=None, samples: int = 200_000) -> LocalRatio:
    x = [float(v) if not is_exact(v) else q(v) for v in x]
    if len(x) != e.d:
        raise DomainError("point has the wrong dimension")
    if not float(r) > 0:
        raise PreconditionError("r must be positive")
    exact = all(is_exact(v) for v in x) and is_exact(r)
    zero, one = (ZERO, ONE) if exact else (0.0, 1.0)
    box = tuple((max(v - r, zero), min(v + r, one)) for v in x)
    vol = math.prod(float(b - a) for a, b in box) if not exact else _prod(b - a for a, b in box)
    axes = separable_axes(e)
    if axes is not None:
        use_exact = exact and all(a.exact for a in axes)
        img = ONE if use_exact else 1.0
        for ax, (a, b) in zip(axes, box):
            if use_exact:
                img *= q(ax.fwd(b)) - q(ax.fwd(a))
            else:
                img *= float(ax.fwd(float(b))) - float(ax.fwd(float(a)))
        return LocalRatio(img / (vol if use_exact else float(vol)), None, "exact" if use_exact else "product", box)
    if seed is None:
        raise PreconditionError("sampling a non-product map needs a seed")
    rng = np.random.default_rng(seed)
    lo = np.array([float(a) for a, _ in box])
    hi = np.array([float(b) for _, b in box])
    grid = np.linspace(0.0, 1.0, 9)
    pts = lo + np.array(np.meshgrid(*[grid] * e.d, indexing="ij")).reshape(e.d, -1).T * (hi - lo)
    img = e.eval(pts)
    span = img.max(axis=0) - img.min(axis=0)
    blo = np.clip(img.min(axis=0) - 0.5 * span - 1e-12, 0.0, 1.0)
    bhi = np.clip(img.max(axis=0) + 0.5 * span + 1e-12, 0.0, 1.0)
    y = blo + rng.random((samples, e.d)) * (bhi - blo)
    back = e.inverse_eval(y)
    inside = np.all((back >= lo) & (back <= hi), axis=1)
    p = inside.mean()
    bvol = float(np.prod(bhi - blo))
    est = p * bvol / float(vol)
    se = math.sqrt(p * (1 - p) / samples) * bvol / float(vol)
    return LocalRatio(est, se, "monte carlo", box)


def _prod(vals):
    out = ONE
    for v in vals:
        out *= v
    return out
