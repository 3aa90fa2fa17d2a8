"""Pointwise probes: difference quotients and surjectivity near a point."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, PreconditionError
from ..homeo import HomeoExpr, RadialTwist


@dataclass(frozen=True)
class DiffQuotientRow:
    n: int
    quotient: float
    best_probe: tuple
    distance: float
    probes: int

    def to_dict(self) -> dict:
        return {"n": self.n, "quotient": self.quotient, "best_probe": list(self.best_probe),
                "distance": self.distance, "probes": self.probes}


def _sup_polar(x: np.ndarray) -> tuple[float, float]:
    u = 2.0 * x[:2] - 1.0
    return float(np.max(np.abs(u))), math.atan2(u[1], u[0])


def _from_sup_polar(x: np.ndarray, r: float, a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    k = r / max(abs(c), abs(s))
    out = x.copy()
    out[0] = (k * c + 1.0) / 2.0
    out[1] = (k * s + 1.0) / 2.0
    return out


def _twist_breaks(e: HomeoExpr) -> np.ndarray:
    pts = [float(v) for node in e.walk() if isinstance(node, RadialTwist) for v in node.phi.xs]
    return np.unique(np.asarray(pts, dtype=float))


def _probes(e: HomeoExpr, x: np.ndarray, n: int, breaks: np.ndarray) -> list[np.ndarray]:
    h = 2.0 ** (-n)
    out = []
    for i in range(e.d):
        for sgn in (1.0, -1.0):
            y = x.copy()
            y[i] += sgn * h
            out.append(y)
    if e.d >= 2:
        r, a = _sup_polar(x)
        # radial neighbours in the sup-norm polar frame of 2x - 1 (radius step h)
        radii = {r + h, r - h}
        if breaks.size:
            lo, hi = r - h, r + h
            radii.update(breaks[(breaks > lo) & (breaks < hi)].tolist())
        if r == 0.0:
            radii = {h}
        for rr in radii:
            if 0.0 <= rr <= 1.0 and rr != r:
                out.append(_from_sup_polar(x, rr, a))
    return [y for y in out if np.all(y >= 0.0) and np.all(y <= 1.0)]


def diff_quotient_profile(e: HomeoExpr, x, n_range) -> list[DiffQuotientRow]:
    """``max |e(x) - e(y)| / |x - y|`` over structured probes ``y`` at scale ``2^-n``.

    Probes: ``x +/- 2^-n`` along each axis and, for ``d >= 2``, points on the
    same ray of the sup-norm polar frame centred at the middle of the cube with
    radius changed by up to ``2^-n`` (including the radial breakpoints of any
    radial twist in ``e``, where the angular shift changes fastest).  At the
    centre the probe is the point of radius ``2^-n``.  Distances are Euclidean.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (e.d,):
        raise DomainError("point has the wrong dimension")
    if np.any(x < 0) or np.any(x > 1):
        raise DomainError("point outside the unit cube")
    fx = e.eval(x)
    breaks = _twist_breaks(e)
    rows = []
    for n in n_range:
        probes = _probes(e, x, n, breaks)
        if not probes:
            raise PreconditionError(f"no probes inside the cube at scale {n}")
        ys = np.array(probes)
        dist = np.linalg.norm(ys - x, axis=1)
        keep = dist > 0
        ys, dist = ys[keep], dist[keep]
        q = np.linalg.norm(e.eval(ys) - fx, axis=1) / dist
        j = int(np.argmax(q))
        rows.append(DiffQuotientRow(n, float(q[j]), tuple(ys[j].tolist()), float(dist[j]), len(ys)))
    return rows


@dataclass(frozen=True)
class OntoReport:
    max_residual: float
    samples: int
    method: str
    alpha: float
    beta: float
    sampled_displacement: float
    converged: bool
    vacuous: bool
    counterexample: tuple | None = None

    @property
    def passed(self) -> bool:
        return self.vacuous or self.converged

    def to_dict(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "samples": self.samples,
            "method": self.method,
            "alpha": self.alpha,
            "beta": self.beta,
            "sampled_displacement": self.sampled_displacement,
            "converged": self.converged,
            "vacuous": self.vacuous,
            "counterexample": None if self.counterexample is None else list(self.counterexample),
            "passed": self.passed,
        }


def _ball_samples(rng, center, radius, count, d):
    v = rng.normal(size=(count, d))
    v /= np.maximum(np.linalg.norm(v, axis=1, keepdims=True), 1e-300)
    rad = radius * rng.random(count) ** (1.0 / d)
    return center + v * rad[:, None]


def onto_check(
    e: HomeoExpr,
    alpha: float,
    beta: float,
    samples: int = 1000,
    center=None,
    seed=None,
    method: str = "inverse",
    tol: float = 1e-8,
    max_iter: int = 200,
    damping: float = 1.0,
) -> OntoReport:
    """Check that ``e(B(c, beta))`` contains ``B(c, beta - alpha)`` at sampled points.

    Precondition (spot-checked): ``|e - id| <= alpha`` on ``B(c, beta)``.
    For each sampled ``y`` a preimage ``x`` is found with ``inverse_eval`` or
    by the iteration ``x <- x + damping (y - e(x))`` and the residual
    ``|e(x) - y|`` is recorded.  Balls are Euclidean.
    """
    if seed is None:
        raise PreconditionError("onto_check samples points and needs a seed")
    alpha, beta = float(alpha), float(beta)
    d = e.d
    c = np.full(d, 0.5) if center is None else np.asarray(center, dtype=float)
    rng = np.random.default_rng(seed)
    if alpha >= beta:
        return OntoReport(0.0, 0, method, alpha, beta, 0.0, True, True)
    if np.any(c - beta < -1e-15) or np.any(c + beta > 1 + 1e-15):
        raise DomainError("the ball B(c, beta) must lie in the cube")
    xs = _ball_samples(rng, c, beta, samples, d)
    disp = float(np.max(np.linalg.norm(e.eval(xs) - xs, axis=1)))
    ys = _ball_samples(rng, c, beta - alpha, samples, d)
    if method == "inverse":
        x = e.inverse_eval(ys)
        res = np.linalg.norm(e.eval(x) - ys, axis=1)
        conv = bool(np.all(res < tol))
    elif method == "fixed_point":
        x = ys.copy()
        for _ in range(max_iter):
            step = ys - e.eval(np.clip(x, 0.0, 1.0))
            x = np.clip(x + damping * step, 0.0, 1.0)
            res = np.linalg.norm(e.eval(x) - ys, axis=1)
            if np.all(res < tol):
                break
        conv = bool(np.all(res < tol))
    else:
        raise PreconditionError(f"unknown method {method!r}")
    worst = int(np.argmax(res))
    outside = np.linalg.norm(x - c, axis=1) > beta + tol
    counter = None
    if not conv or np.any(outside):
        conv = conv and not np.any(outside)
        counter = tuple(ys[worst].tolist())
    return OntoReport(float(res[worst]), samples, method, alpha, beta, disp, conv, False, counter)
