"""Dyadic zig-zag functions whose level sets are uniformly thin.

Given a sequence ``s_n`` decreasing to 0, stage ``m`` refines the previous
stage so that on every piece it sweeps a ``2^(m-1)``-dyadic target interval
with uniform occupation density.  Every ``2^m``-dyadic child of the target
then receives exactly the same share of the piece.
"""

from __future__ import annotations

import math
import re
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConfigError, InvariantError, PreconditionError
from .interval_fn import PLFunc
from .rational import ONE, ZERO, dyadic, q


@dataclass(frozen=True)
class SSequence:
    """A named sequence ``n -> s_n`` with exact rational values.

    Families: ``pow2:k`` gives ``2^(-k n)``; ``dexp`` gives ``2^(-2^(n+1))``;
    ``table:v0,v1,...`` lists values explicitly (extended by its last entry).
    """

    name: str
    fn: Callable[[int], object] = field(compare=False, repr=False)

    def __call__(self, n: int):
        if n < 0:
            raise PreconditionError("sequence index must be nonnegative")
        return self.fn(n)

    @classmethod
    def parse(cls, text: str) -> SSequence:
        text = text.strip()
        if m := re.fullmatch(r"pow2:(\d+)", text):
            k = int(m.group(1))
            if k < 1:
                raise ConfigError("pow2 exponent must be positive")
            return cls(text, lambda n, k=k: dyadic(k * n))
        if text == "dexp":
            return cls(text, lambda n: dyadic(1 << (n + 1)))
        if text.startswith("table:"):
            try:
                vals = tuple(q(v) for v in text[6:].split(","))
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"bad table sequence {text!r}") from exc
            return cls(text, lambda n, vals=vals: vals[min(n, len(vals) - 1)])
        raise ConfigError(f"unknown sequence family {text!r}")

    @classmethod
    def from_values(cls, values: Sequence) -> SSequence:
        return cls.parse("table:" + ",".join(str(q(v)) for v in values))


def choose_a(s: SSequence | Callable[[int], object], count: int, search_limit: int = 4096) -> list[int]:
    """Minimal strictly increasing ``a_m`` with ``s(a_m) <= 2^(-2^(m+1))``.

    Raises if ``s`` increases anywhere on the scanned range.
    """
    out: list[int] = []
    n = 0
    prev = None
    for m in range(count):
        target = dyadic(1 << (m + 1))
        start = out[-1] + 1 if out else 0
        n = start
        while True:
            if n > search_limit:
                raise PreconditionError(f"s does not reach 2^-{1 << (m + 1)} by n={search_limit}")
            v = s(n)
            if prev is not None and v > prev[1] and n > prev[0]:
                raise InvariantError(f"s increases at n={n}")
            prev = (n, v)
            if v <= target:
                break
            n += 1
        out.append(n)
    return out


@dataclass(frozen=True)
class Piece:
    """A piece of stage ``m``: ``[x0, x1]`` swept over the target ``[c, c + w]``."""

    x0: object
    x1: object
    c: object
    dyadic_index: int


@dataclass(frozen=True)
class ZigzagStage:
    m: int
    phi: PLFunc
    pieces: tuple = ()

    @property
    def width(self):
        """Width of the targets swept at this stage."""
        return dyadic(1 << (self.m - 1)) if self.m >= 1 else ONE


@dataclass(frozen=True)
class ZigzagSpec:
    s: SSequence
    a: tuple
    stages: tuple

    @property
    def M(self) -> int:
        return len(self.stages) - 1

    def phi(self, m: int | None = None) -> PLFunc:
        return self.stages[self.M if m is None else m].phi

    def tail_bound(self, m: int):
        """Bound on ``|phi_limit - phi_m|`` from the per-stage steps."""
        return _tail(m)


def _tail(m: int):
    # sum_{k > m} 2^(-2^(k-1)), bounded by twice the first term
    return 2 * dyadic(1 << m)


def _legs(x0, x1, y0, y1, c, w) -> list[tuple]:
    """Interior breakpoints of the uniform-density sweep of ``[c, c + w]`` on ``[x0, x1]``."""
    rho = (x1 - x0) / w
    top = c + w
    if y0 <= y1:
        stops = [
            ((y0 - c) * rho / 2, c),
            ((y0 - c) * rho / 2, y0),
            ((y1 - y0) * rho, y1),
            ((top - y1) * rho / 2, top),
        ]
    else:
        stops = [
            ((top - y0) * rho / 2, top),
            ((top - y0) * rho / 2, y0),
            ((y0 - y1) * rho, y1),
            ((y1 - c) * rho / 2, c),
        ]
    pts = []
    x = x0
    for dt, y in stops:
        if dt == 0:
            continue
        x = x + dt
        if x < x1:
            pts.append((x, y))
    return pts


def _split_points(prev: PLFunc, w, grid_level: int) -> list[tuple]:
    """Points where a new piece starts: dyadic grid plus hits of multiples of ``w``."""
    step = dyadic(grid_level)
    xs, ys = prev.xs, prev.ys
    out = [(xs[0], ys[0])]
    for i in range(len(xs) - 1):
        xa, xb, ya, yb = xs[i], xs[i + 1], ys[i], ys[i + 1]
        local = []
        g0 = math.floor(xa / step) + 1
        g1 = math.ceil(xb / step)
        slope = (yb - ya) / (xb - xa)
        for g in range(int(g0), int(g1)):
            gx = step * g
            local.append((gx, ya + slope * (gx - xa)))
        if ya != yb:
            lo, hi = (ya, yb) if ya < yb else (yb, ya)
            k0 = math.floor(lo / w) + 1
            k1 = math.ceil(hi / w)
            for k in range(int(k0), int(k1)):
                t = w * k
                local.append((xa + (t - ya) / slope, t))
        local.sort()
        prev_x = out[-1][0]
        for x, y in local:
            if x != prev_x:
                out.append((x, y))
                prev_x = x
        if xb != out[-1][0]:
            out.append((xb, yb))
    return out


def build_stage(prev: PLFunc, m: int, a_m: int) -> ZigzagStage:
    """Stage ``m`` from stage ``m - 1`` on the ``a_m``-dyadic grid."""
    if m < 1:
        raise PreconditionError("stages are built for m >= 1")
    w = dyadic(1 << (m - 1))
    cuts = _split_points(prev, w, a_m)
    step = dyadic(a_m)
    xs = [cuts[0][0]]
    ys = [cuts[0][1]]
    pieces = []
    for (x0, y0), (x1, y1) in zip(cuts, cuts[1:]):
        mid = (y0 + y1) / 2
        c = w * math.floor(mid / w)
        if c + w > ONE:
            c = ONE - w
        if not (c <= y0 <= c + w and c <= y1 <= c + w):
            raise InvariantError(f"piece [{x0}, {x1}] leaves its target at stage {m}")
        for x, y in _legs(x0, x1, y0, y1, c, w):
            xs.append(x)
            ys.append(y)
        xs.append(x1)
        ys.append(y1)
        pieces.append(Piece(x0, x1, c, int(math.floor(x0 / step))))
    phi = PLFunc._trusted(xs, ys)
    return ZigzagStage(m, phi, tuple(pieces))


def build(s: SSequence | str, stages: int) -> ZigzagSpec:
    """Stages ``0..stages`` of the zig-zag for ``s``."""
    if isinstance(s, str):
        s = SSequence.parse(s)
    if stages < 0:
        raise PreconditionError("stage count must be nonnegative")
    a = choose_a(s, stages + 2)
    out = [ZigzagStage(0, PLFunc.constant(ZERO))]
    for m in range(1, stages + 1):
        out.append(build_stage(out[-1].phi, m, a[m]))
    return ZigzagSpec(s, tuple(a), tuple(out))


def q_sequence(spec: ZigzagSpec | Sequence[int], n: int):
    """Occupancy ratio bound at scale ``2^-n``.

    ``18 * 2^(-2^m)`` for the largest ``m`` with ``a_m <= n``, capped at 1
    (the trivial bound); 1 below ``a_0``.
    """
    a = spec.a if isinstance(spec, ZigzagSpec) else tuple(spec)
    ms = [m for m, am in enumerate(a) if am <= n]
    if not ms:
        return ONE
    return min(ONE, 18 * dyadic(1 << ms[-1]))


def scale_index(a: Sequence[int], n: int) -> int | None:
    """Largest ``m`` with ``a_m <= n`` (``None`` below ``a_0``)."""
    ms = [m for m, am in enumerate(a) if am <= n]
    return ms[-1] if ms else None


# occupation profiles


@dataclass(frozen=True)
class Occupation:
    """Occupation measure of a PL function restricted to an interval.

    ``ys``: sorted breakpoints of the absolutely continuous part with
    cumulative mass ``cum`` and density ``dens`` to the right of each.
    ``atoms``: sorted values carried by flat pieces with prefix masses.
    """

    ys: tuple
    cum: tuple
    dens: tuple
    atom_ys: tuple
    atom_cum: tuple

    def continuous_cdf(self, t):
        j = bisect_right(self.ys, t) - 1
        if j < 0:
            return ZERO
        return self.cum[j] + self.dens[j] * (t - self.ys[j])

    def atoms_in(self, lo, hi):
        i = bisect_left(self.atom_ys, lo)
        j = bisect_right(self.atom_ys, hi)
        return self.atom_cum[j] - self.atom_cum[i]

    def mass(self, lo, hi):
        """Mass of the closed window ``[lo, hi]``."""
        return self.continuous_cdf(hi) - self.continuous_cdf(lo) + self.atoms_in(lo, hi)

    def max_window(self, length):
        """``max_t mass([t, t + length])`` with its maximiser."""
        cands = set(self.ys) | {y - length for y in self.ys} | set(self.atom_ys)
        cands |= {y - length for y in self.atom_ys}
        best, arg = None, None
        for t in cands:
            v = self.mass(t, t + length)
            if best is None or v > best:
                best, arg = v, t
        return (best if best is not None else ZERO), arg


def occupation(f: PLFunc, within: tuple) -> Occupation:
    a, b = within
    xs, ys = f.xs, f.ys
    start = max(bisect_right(xs, a) - 1, 0)
    stop = min(bisect_left(xs, b), len(xs) - 1)
    delta: dict = {}
    atoms: dict = {}
    for i in range(start, stop):
        x0, x1, y0, y1 = xs[i], xs[i + 1], ys[i], ys[i + 1]
        lo_x, hi_x = max(x0, a), min(x1, b)
        if lo_x >= hi_x:
            continue
        if y0 == y1:
            atoms[y0] = atoms.get(y0, ZERO) + (hi_x - lo_x)
            continue
        slope = (y1 - y0) / (x1 - x0)
        ya = y0 + slope * (lo_x - x0)
        yb = y0 + slope * (hi_x - x0)
        lo, hi = (ya, yb) if ya < yb else (yb, ya)
        d = 1 / abs(slope)
        delta[lo] = delta.get(lo, ZERO) + d
        delta[hi] = delta.get(hi, ZERO) - d
    bys = sorted(delta)
    cum, dens = [], []
    acc, rate = ZERO, ZERO
    prev = None
    for y in bys:
        if prev is not None:
            acc += rate * (y - prev)
        rate += delta[y]
        cum.append(acc)
        dens.append(rate)
        prev = y
    ays = sorted(atoms)
    acum = [ZERO]
    for y in ays:
        acum.append(acum[-1] + atoms[y])
    return Occupation(tuple(bys), tuple(cum), tuple(dens), tuple(ays), tuple(acum))


# checks


@dataclass(frozen=True)
class CoveringReport:
    n: int
    m: int | None
    q: object
    s: object
    max_ratio: object
    worst_interval: tuple | None
    intervals_checked: int
    required_stage: int
    passed: bool
    slack: str

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "q_n": float(self.q),
            "s_n": float(self.s),
            "max_ratio": float(self.max_ratio),
            "worst_interval": None if self.worst_interval is None else [str(v) for v in self.worst_interval],
            "intervals_checked": self.intervals_checked,
            "required_stage": self.required_stage,
            "passed": self.passed,
            "slack": self.slack,
        }


def required_stage(spec: ZigzagSpec, n: int) -> int:
    m = scale_index(spec.a, n)
    return 0 if m is None else m + 1


def verify_covering_bound(
    spec: ZigzagSpec,
    M: int,
    n: int,
    samples: int = 0,
    seed: int | None = None,
) -> CoveringReport:
    """Check ``|{x in I : phi_M(x) in J}| <= q_n |I|`` for ``|I| = 2^-n``, ``|J| = s_n``.

    Every dyadic ``I`` and every half-shifted ``I`` is checked, plus
    ``samples`` seeded random offsets; the worst ``J`` for each ``I`` is found
    exactly from the occupation profile.  Once ``M`` exceeds the scale index
    the covering argument applies to ``phi_M`` verbatim, so no slack is added.
    """
    m = scale_index(spec.a, n)
    qn = q_sequence(spec, n)
    sn = spec.s(n)
    need = 0 if m is None else m + 1
    if m is not None and M < need:
        raise PreconditionError(f"scale n={n} needs stage M >= {need}, got {M}")
    if M > spec.M:
        raise PreconditionError(f"stage {M} not built (have {spec.M})")
    phi = spec.phi(M)
    width = dyadic(n)
    starts = [width * i for i in range(1 << n)]
    starts += [width * i + width / 2 for i in range((1 << n) - 1)]
    if samples:
        if seed is None:
            raise PreconditionError("random interval samples need a seed")
        rng = np.random.default_rng(seed)
        res = n + 16
        hi_idx = (1 << res) - (1 << 16)
        starts += [dyadic(res) * int(k) for k in rng.integers(0, hi_idx + 1, size=samples)]
    worst, worst_i = ZERO, None
    for lo in starts:
        occ = occupation(phi, (lo, lo + width))
        v, _ = occ.max_window(sn)
        if v > worst:
            worst, worst_i = v, (lo, lo + width)
    ratio = worst / width
    slack = "none: phi_M satisfies the scale-m covering inequality exactly once M >= m + 1"
    return CoveringReport(n, m, qn, sn, ratio, worst_i, len(starts), need, ratio <= qn, slack)


@dataclass(frozen=True)
class OscillationRow:
    n: int
    s: object
    min_oscillation: object
    certified: bool


def min_window_oscillation(phi: PLFunc, n: int):
    """Minimum oscillation of ``phi`` over the level-``n`` dyadic windows."""
    width = dyadic(n)
    xs, ys = phi.xs, phi.ys
    best = None
    for i in range(1 << n):
        lo, hi = width * i, width * (i + 1)
        a = bisect_right(xs, lo)
        b = bisect_left(xs, hi)
        vals = [phi.eval(lo), phi.eval(hi), *ys[a:b]]
        osc = max(vals) - min(vals)
        if best is None or osc < best:
            best = osc
    return best


def oscillation_certificate(
    spec: ZigzagSpec,
    M: int,
    n_range: Iterable[int],
    scale=ONE,
    target: Callable[[object], object] | None = None,
) -> list[OscillationRow]:
    """Minimum oscillation of ``scale * phi_M`` per dyadic scale, compared to ``target(s_n)``.

    Any window of length ``2^-n`` contains a dyadic window of length
    ``2^-(n+1)``, so a row certifies all windows of length ``2^-n`` only if the
    next row's minimum clears the target as well; ``certified`` uses that
    stronger test when the finer row is available.
    """
    phi = spec.phi(M)
    scale = q(scale)
    target = target or (lambda v: v)
    ns = list(n_range)
    mins = {n: scale * min_window_oscillation(phi, n) for n in set(ns) | {n + 1 for n in ns}}
    rows = []
    for n in ns:
        need = target(spec.s(n))
        rows.append(OscillationRow(n, need, mins[n], mins[n + 1] >= need and mins[n] >= need))
    return rows


def clause_check(stage: ZigzagStage) -> tuple[int, bool]:
    """Exact occupancy equality on every piece and every child target.

    Returns the number of (piece, child) pairs checked and whether all hold.
    """
    if stage.m < 1:
        return 0, True
    w = stage.width
    child = dyadic(1 << stage.m)
    k = 1 << (1 << (stage.m - 1))
    share = dyadic(1 << (stage.m - 1))
    phi = stage.phi
    count, ok = 0, True
    for p in stage.pieces:
        occ = occupation(phi, (p.x0, p.x1))
        want = share * (p.x1 - p.x0)
        for j in range(k):
            lo = p.c + child * j
            count += 1
            if occ.mass(lo, lo + child) != want:
                ok = False
        if occ.mass(p.c, p.c + w) != p.x1 - p.x0:
            ok = False
    return count, ok
