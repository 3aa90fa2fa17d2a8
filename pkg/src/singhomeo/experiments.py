"""Named, reproducible experiment pipelines.

Every ``run_*`` function is a pure function of its keyword configuration and
seed: it returns an :class:`ExperimentResult` whose tables are bit-identical
on re-runs.  Columns carry a kind flag (``exact``, ``float`` or ``mc``) and
each series a one-line statement of the quantitative claim it probes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import zigzag as zz
from .errors import ConfigError, PreconditionError, UnsupportedExpression
from .homeo import (
    Compose,
    HomeoExpr,
    Identity,
    Product1D,
    Slide,
    nowhere_twist,
    sample_witnesses,
    singular_product,
)
from .interval_fn import PLFunc
from .measure.area import graph_area_pa, graph_area_radicands, mass_distribution_lower
from .measure.length import length_analysis
from .measure.occupation import pushforward_hist, singularity_score
from .measure.pa import as_box, pa_cells
from .measure.probes import diff_quotient_profile
from .rational import ONE, ZERO, dyadic, fmt, q, sqrt_ceil, sqrt_floor
from .singular import strongly_singular_1d

KINDS = ("exact", "float", "mc", "meta")


@dataclass(frozen=True)
class Column:
    name: str
    kind: str = "float"


@dataclass(frozen=True)
class Series:
    name: str
    claim: str
    columns: tuple
    rows: tuple

    def column(self, name: str) -> list:
        j = [c.name for c in self.columns].index(name)
        return [r[j] for r in self.rows]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "claim": self.claim,
            "columns": [{"name": c.name, "kind": c.kind} for c in self.columns],
            "rows": [[_cell(v) for v in r] for r in self.rows],
        }


def _cell(v):
    if isinstance(v, (list, tuple)):
        return [_cell(x) for x in v]
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, int):
        return v
    return fmt(v)


def _series(name: str, claim: str, cols: list[tuple[str, str]], rows: list) -> Series:
    for _, kind in cols:
        if kind not in KINDS:
            raise ValueError(f"unknown column kind {kind}")
    return Series(name, claim, tuple(Column(n, k) for n, k in cols), tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class ExperimentResult:
    name: str
    config: dict
    seed: int | None
    series: tuple
    checks: dict = field(default_factory=dict)
    notes: tuple = ()

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def get(self, name: str) -> Series:
        for s in self.series:
            if s.name == name:
                return s
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "experiment": self.name,
            "config": {k: _config_value(v) for k, v in sorted(self.config.items())},
            "seed": self.seed,
            "series": [s.to_dict() for s in self.series],
            "checks": dict(sorted(self.checks.items())),
            "passed": self.passed,
            "notes": list(self.notes),
        }


def _config_value(v):
    if isinstance(v, dict):
        return {k: _config_value(x) for k, x in v.items()}
    return _cell(v)


def _pmap(fn: Callable, items: list, jobs: int) -> list:
    """Ordered map; with ``jobs > 1`` the work is spread over processes."""
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# one-dimensional lengths


def _witness_length_1d(f0: PLFunc, s: float, t: float, refine: int = 8, grid: int = 4096) -> float:
    """Chord length of ``x -> f0(x^t)^s`` (a lower estimate of the graph length).

    The partition holds the preimages of the breakpoints of ``f0`` under
    ``x^t`` plus a uniform grid, each interval split ``refine`` times.
    """
    knots = np.unique(np.concatenate([
        np.asarray([float(v) for v in f0.xs]) ** (1.0 / t),
        np.linspace(0.0, 1.0, grid + 1),
    ]))
    fine = (knots[:-1, None] + (knots[1:] - knots[:-1])[:, None] * np.arange(refine) / refine).ravel()
    x = np.append(fine, 1.0)
    y = f0.eval_array(x ** t) ** s
    return math.fsum(np.hypot(np.diff(x), np.diff(y)).tolist())


def run_banach_mycielski(
    stages: int = 6,
    n_grid: tuple = (2, 4, 8),
    p: int = 3,
    witnesses: int = 0,
    seed: int | None = None,
) -> ExperimentResult:
    """Graph lengths of the stage-``m`` strongly singular homeomorphisms."""
    if stages < 1:
        raise PreconditionError("stages must be at least 1")
    rows, flat_rows = [], []
    lengths = [math.sqrt(2.0)]
    rows.append([0, 1, lengths[0], 2.0 - lengths[0], None])
    for m in range(1, stages + 1):
        f = strongly_singular_1d(m, p)
        L = f.polyline_length()
        prev = 2.0 - lengths[-1]
        lengths.append(L)
        rows.append([m, f.n_pieces, L, 2.0 - L, (2.0 - L) / prev])
        for n in n_grid:
            la = length_analysis(f, n)
            flat_rows.append([m, n, la.flat_measure, la.flat_bound, la.length_condition,
                              la.flat_bound_holds, la.increments])
    series = [
        _series(
            "lengths",
            "graph length of the stage-m map increases towards 2",
            [("m", "meta"), ("pieces", "meta"), ("length", "float"),
             ("two_minus_length", "float"), ("shrink", "float")],
            rows,
        ),
        _series(
            "flat_sets",
            "measure of the partition pieces with slope <= 1/n",
            [("m", "meta"), ("n", "meta"), ("flat_measure", "exact"), ("flat_bound", "exact"),
             ("length_condition", "meta"), ("flat_bound_holds", "meta"), ("increments", "exact")],
            flat_rows,
        ),
    ]
    Ls = lengths[1:]
    checks = {
        "length_at_most_2": all(L <= 2.0 for L in Ls),
        "length_nondecreasing": all(a <= b for a, b in zip(Ls, Ls[1:])),
        "increments_equal_2": all(r[6] == 2 for r in flat_rows),
        "flat_bound_when_long": all(r[5] for r in flat_rows if r[4]),
    }
    notes = []
    if witnesses:
        if seed is None:
            raise PreconditionError("witness sampling needs a seed")
        f0 = strongly_singular_1d(stages, p)
        expr0 = Product1D((f0,))
        wrows = []
        for w in sample_witnesses(expr0, seed, witnesses):
            s, t = w.s[0], w.t[0]
            wrows.append([w.seed[1], s, t, _witness_length_1d(f0, s, t)])
        series.append(_series(
            "witnesses",
            "lengths of x -> f0(x^t)^s for random exponents s, t in [1, 2]",
            [("index", "meta"), ("s", "mc"), ("t", "mc"), ("chord_length", "float")],
            wrows,
        ))
        wl = [r[3] for r in wrows]
        checks["witness_length_at_most_2"] = all(v <= 2.0 + 1e-12 for v in wl)
        notes.append("witness lengths are chord sums on a refined partition (lower estimates)")
    config = {"stages": stages, "n_grid": list(n_grid), "p": p, "witnesses": witnesses}
    return ExperimentResult("banach-mycielski", config, seed, tuple(series), checks, tuple(notes))


# slide area targets


@dataclass(frozen=True)
class SlopePlan:
    """Constants of the slope rule for a piecewise affine base on ``Q``.

    ``rho`` bounds ``|d f_2 / d x_axis|`` from below on ``P`` (a union of
    cells of volume ``vol_p``); ``lip`` is the Lipschitz constant of ``f_1``
    on ``Q`` (rounded up).  ``margin`` is the distance of ``f(Q)`` to the
    boundary of the cube.
    """

    axis: int
    rho: object
    vol_p: object
    lip: object
    margin: object

    def slope_bound(self, C):
        return (q(C) / self.vol_p + self.lip) / self.rho


def slope_plan(base: HomeoExpr, Q) -> SlopePlan:
    if base.d != 2:
        raise UnsupportedExpression("slope plans are implemented for d = 2")
    cells = pa_cells(base, Q)
    lip = max(sqrt_ceil(sum((a * a for a in c.A[0]), ZERO)) for c in cells)
    margin = min(min(v, 1 - v) for c in cells for p in c.region for v in c.image(p))
    best = None
    for axis in (0, 1):
        for rho in sorted({abs(c.A[1][axis]) for c in cells} - {ZERO}):
            vol = sum((c.volume for c in cells if abs(c.A[1][axis]) >= rho), ZERO)
            # smaller required slope is better; compare at C = 1
            plan = SlopePlan(axis, rho, vol, lip, margin)
            if best is None or plan.slope_bound(1) < best.slope_bound(1):
                best = plan
    if best is None:
        raise PreconditionError("the second coordinate of the base is constant on Q")
    return best


def sawtooth(amplitude, teeth: int) -> PLFunc:
    """``0`` at ``k/teeth``, ``amplitude`` at ``(k + 1/2)/teeth``; slope ``2 amplitude teeth``."""
    if teeth < 1:
        raise PreconditionError("teeth must be positive")
    a = q(amplitude)
    pts = []
    for j in range(2 * teeth + 1):
        pts.append((q(j, 2 * teeth), a if j % 2 else ZERO))
    return PLFunc.from_points(pts)


def _flat_values(base: HomeoExpr, Q) -> set:
    """Values taken by ``f_2`` on cells where it is constant."""
    return {c.b[1] for c in pa_cells(base, Q) if all(v == 0 for v in c.A[1])}


def _certified_area(e: HomeoExpr, Q) -> tuple[float, object]:
    rads = graph_area_radicands(e, Q)
    lower = sum((sqrt_floor(r) for r in rads), ZERO)
    return graph_area_pa(e, Q), lower


def run_generic_area(
    d: int = 2,
    ladder: tuple = (1, 10, 100),
    Q: tuple = ((q(1, 4), q(1, 2)), (q(1, 4), q(1, 2))),
    base: HomeoExpr | None = None,
    eps=None,
) -> ExperimentResult:
    """Slides whose graph area over ``Q`` exceeds each rung of ``ladder``.

    ``delta`` is half the distance of ``f(Q)`` to the boundary, so ``f(Q)``
    stays in the untapered band; the sawtooth amplitude is ``min(delta, eps)/2``
    and its tooth count is the least one whose slope beats the bound.
    """
    if d != 2:
        raise UnsupportedExpression("the area ladder is implemented for d = 2")
    base = Identity(2) if base is None else base
    box = as_box(Q, 2)
    plan = slope_plan(base, box)
    if plan.margin <= 0:
        raise PreconditionError("f(Q) touches the boundary: no admissible delta (need delta > 0)")
    delta = plan.margin / 2
    amp = (delta if eps is None else min(delta, q(eps))) / 2
    base_area, _ = _certified_area(base, box)
    flats = _flat_values(base, box)
    rows = []
    for C in ladder:
        C = q(C)
        bound = plan.slope_bound(C)
        if C < base_area and _certified_area(base, box)[1] > C:
            phi, teeth, slope = PLFunc.constant(ZERO), 0, ZERO
        else:
            teeth = int(bound / (2 * amp)) + 1
            phi = sawtooth(amp, teeth)
            while flats & set(phi.xs):
                teeth += 1
                phi = sawtooth(amp, teeth)
            slope = 2 * amp * teeth
        g = Compose(Slide(phi, delta, 2), base)
        area, lower = _certified_area(g, box)
        rows.append([C, bound, slope, teeth, amp, delta, area, lower, lower > C])
    series = [_series(
        "ladder",
        "a slide with steep enough profile pushes the graph area over Q above C",
        [("C", "exact"), ("slope_bound", "exact"), ("slope", "exact"), ("teeth", "meta"),
         ("amplitude", "exact"), ("delta", "exact"), ("area", "float"),
         ("certified_lower", "exact"), ("exceeds_C", "meta")],
        rows,
    )]
    checks = {"area_exceeds_C": all(r[8] for r in rows)}
    config = {"d": d, "ladder": [q(c) for c in ladder], "Q": [list(s) for s in box],
              "base": base.to_json(), "eps": None if eps is None else q(eps),
              "rho": plan.rho, "vol_p": plan.vol_p, "lip": plan.lip}
    return ExperimentResult("generic-area", config, None, tuple(series), checks)


# twist with infinite area


def run_twist_infinite_area(
    d: int = 2,
    n_max: int = 6,
    s_spec: str = "pow2:3",
    stages: int = 4,
    scale=q(63, 128),
    delta=q(1, 4),
) -> ExperimentResult:
    """Box-mass bounds for the slide of a scaled zig-zag over ``f = id``.

    The zig-zag (values in ``[0, 1/2]``) is scaled by ``scale`` so that its
    range sits inside ``[0, 1/4)``, strictly below ``delta``.  The domain
    strip is ``[1/4, 1/2] x [0, 1]^(d-1)``.
    """
    spec = zz.build(s_spec, stages)
    phi = spec.phi(stages).scale(q(scale))
    sl = Slide(phi, q(delta), d)
    T = [(q(1, 4), q(1, 2))] + [(ZERO, ONE)] * (d - 1)
    rep = mass_distribution_lower(sl, T, k_max=n_max, k_min=1, bound=lambda n: zz.q_sequence(spec, n))
    rungs = set(spec.a)
    rows = []
    for r in rep.rows:
        qn = zz.q_sequence(spec, r.n)
        rows.append([r.n, r.n in rungs, qn, r.max_mass, r.ratio, r.lower, r.lower * float(qn),
                     r.boxes, r.violations, r.max_bound_ratio])
    occ_rows = []
    for n in range(1, n_max + 1):
        need = zz.required_stage(spec, n)
        if need > stages:
            continue
        cr = zz.verify_covering_bound(spec, stages, n)
        occ_rows.append([n, cr.q, cr.s, cr.max_ratio, cr.intervals_checked, cr.passed])
    rung_lower = [r[5] for r in rows if r[1]]
    series = [
        _series(
            "box_masses",
            "graph measure of every dyadic box pair is at most q_n 2^(-nd)",
            [("n", "meta"), ("rung", "meta"), ("q_n", "exact"), ("max_mass", "exact"),
             ("ratio", "float"), ("lower", "float"), ("lower_times_q", "float"),
             ("boxes", "meta"), ("violations", "meta"), ("max_bound_ratio", "float")],
            rows,
        ),
        _series(
            "occupancy",
            "zig-zag occupancy of a target interval of length s_n is at most q_n |I|",
            [("n", "meta"), ("q_n", "exact"), ("s_n", "exact"), ("max_ratio", "exact"),
             ("intervals", "meta"), ("passed", "meta")],
            occ_rows,
        ),
    ]
    checks = {
        "box_bound": all(r[8] == 0 for r in rows),
        "rung_lower_nondecreasing": all(a <= b for a, b in zip(rung_lower, rung_lower[1:])),
        "occupancy_bound": all(r[5] for r in occ_rows),
    }
    notes = (f"scale index a = {list(spec.a)}", f"mass method: {rep.method}")
    config = {"d": d, "n_max": n_max, "s_spec": s_spec, "stages": stages,
              "scale": q(scale), "delta": q(delta)}
    return ExperimentResult("twist-infinite-area", config, None, tuple(series), checks, notes)


# nowhere differentiability


def default_probe_points(d: int, count: int = 10) -> list[tuple]:
    """The centre of the cube plus a fixed low-discrepancy set (golden-ratio lattice)."""
    g = (math.sqrt(5.0) - 1.0) / 2.0
    pts = [tuple([0.5] * d)]
    for i in range(1, count):
        u = ((i + 0.5) / count, (0.5 + i * g) % 1.0)
        pts.append(tuple([0.1 + 0.8 * u[0], 0.1 + 0.8 * u[1]] + [0.5] * (d - 2)))
    return pts


def run_nowhere_diff(
    d: int = 2,
    s_spec: str = "pow2:3",
    probes: int = 10,
    span: int = 5,
    rtol: float = 1e-12,
) -> ExperimentResult:
    """Difference-quotient profiles of the radial twist against ``s_n 2^n``."""
    if d < 2:
        raise PreconditionError("d must be at least 2")
    s = zz.SSequence.parse(s_spec)
    tw = nowhere_twist(s, d, span=span)
    ident = Identity(d)
    ns = list(tw.certified)
    rows, ctrl = [], []
    ok = True
    for j, x in enumerate(default_probe_points(d, probes)):
        prof = diff_quotient_profile(tw, x, ns)
        for r in prof:
            target = float(s(r.n)) * 2.0 ** r.n
            good = r.quotient >= target * (1.0 - rtol)
            ok &= good
            rows.append([j, list(x), r.n, r.quotient, target, good, r.probes])
        for r in diff_quotient_profile(ident, x, ns):
            ctrl.append([j, r.n, r.quotient])
    series = [
        _series(
            "profiles",
            "some neighbour at distance <= 2^-n moves by at least s_n",
            [("probe", "meta"), ("point", "meta"), ("n", "meta"), ("quotient", "float"),
             ("target", "float"), ("passed", "meta"), ("neighbours", "meta")],
            rows,
        ),
        _series("control", "the identity has a flat profile",
                [("probe", "meta"), ("n", "meta"), ("quotient", "float")], ctrl),
    ]
    checks = {"profile_bound": ok, "control_flat": all(abs(r[2] - 1.0) < 1e-9 for r in ctrl)}
    notes = (f"twist threshold N = {tw.N}, certified scales {ns}",
             f"relative tolerance {rtol} (the bound is attained exactly at the centre)")
    config = {"d": d, "s_spec": s_spec, "probes": probes, "span": span, "rtol": rtol}
    return ExperimentResult("nowhere-diff", config, None, tuple(series), checks, notes)


# singularity of product maps


def _witness_score(args) -> tuple:
    w, k, eps = args
    h = pushforward_hist(w.expr, k)
    return float(singularity_score(h, eps)), h.exact


def run_singular_prevalence(
    d: int = 2,
    f0_stage: int = 4,
    samples: int = 100,
    k: int = 8,
    eps=q(1, 10),
    stage_max: int = 5,
    p: int = 2,
    seed: int | None = None,
    jobs: int = 1,
) -> ExperimentResult:
    """Singularity scores of singular product maps and of random power-map witnesses."""
    if seed is None and samples:
        raise PreconditionError("witness sampling needs a seed")
    eps = q(eps)
    ident = singularity_score(pushforward_hist(Identity(d), k), eps)
    stage_rows = [[0, ident, float(ident)]]
    scores = {}
    for m in range(1, stage_max + 1):
        sc = singularity_score(pushforward_hist(singular_product(m, d, p), k), eps)
        scores[m] = sc
        stage_rows.append([m, sc, float(sc)])
    f0 = singular_product(f0_stage, d, p)
    base = scores.get(f0_stage)
    if base is None:
        base = singularity_score(pushforward_hist(f0, k), eps)
    wrows = []
    ws = sample_witnesses(f0, seed, samples) if samples else []
    results = _pmap(_witness_score, [(w, k, eps) for w in ws], jobs)
    for w, (sc, _) in zip(ws, results):
        wrows.append([w.seed[1], list(w.s), list(w.t), sc, sc / float(base)])
    ratios = np.array([r[4] for r in wrows]) if wrows else np.zeros(0)
    summary = []
    if wrows:
        sv = np.array([r[3] for r in wrows])
        for name, fn in (("min", np.min), ("median", np.median), ("mean", np.mean), ("max", np.max)):
            summary.append([name, float(fn(sv)), float(fn(ratios))])
    seq = [scores[m] for m in range(1, stage_max + 1)]
    series = [
        _series("stages", "score of the stage-m product map shrinks with m",
                [("m", "meta"), ("score", "exact"), ("score_float", "float")], stage_rows),
        _series("witnesses", "scores of x -> f0(x^t)^s stay small",
                [("index", "meta"), ("s", "mc"), ("t", "mc"), ("score", "float"),
                 ("distortion", "float")], wrows),
        _series("summary", "distribution of witness scores and their ratio to the base score",
                [("statistic", "meta"), ("score", "mc"), ("distortion", "mc")], summary),
    ]
    checks = {
        "stage_scores_decreasing": all(a > b for a, b in zip(seq, seq[1:])),
        "control_not_singular": ident >= ONE - eps,
    }
    config = {"d": d, "f0_stage": f0_stage, "samples": samples, "k": k, "eps": eps,
              "stage_max": stage_max, "p": p}
    notes = (f"base score of f0: {base}",)
    return ExperimentResult("singular-prevalence", config, seed, tuple(series), checks, notes)


# perturbation probe


def _random_profile(rng: np.random.Generator, eps, grid: int) -> PLFunc:
    eps = q(eps)
    ys = [ZERO] + [eps * q(int(v), 64) for v in rng.integers(-63, 64, size=grid - 1)] + [ZERO]
    return PLFunc(tuple(q(i, grid) for i in range(grid + 1)), tuple(ys))


def default_semicontinuity_base() -> HomeoExpr:
    return Slide(sawtooth(q(1, 16), 24), q(1, 8), 2)


def run_semicontinuity_probe(
    base: HomeoExpr | None = None,
    Q: tuple = ((q(1, 4), q(1, 2)), (q(1, 4), q(1, 2))),
    eps=q(1, 256),
    trials: int = 20,
    grid: int = 16,
    seed: int | None = None,
) -> ExperimentResult:
    """Graph areas of ``Slide(psi) o base`` for random profiles ``|psi| < eps``.

    Empirical only.  One canned perturbation cancels as much of the base
    slide's profile as the budget allows (the flattening attempt).
    """
    if seed is None and trials:
        raise PreconditionError("random perturbations need a seed")
    base = default_semicontinuity_base() if base is None else base
    box = as_box(Q, base.d)
    eps = q(eps)
    base_area = graph_area_pa(base, box)
    delta = q(1, 8)
    rng = np.random.default_rng(seed)
    perts = []
    for _ in range(trials):
        psi = _random_profile(rng, eps, grid) if eps > 0 else PLFunc.constant(ZERO)
        perts.append(("random", psi))
    core = base if isinstance(base, Slide) else None
    if core is not None and eps > 0:
        top = max(abs(v) for v in core.phi.ys)
        if top > 0:
            perts.append(("flatten", core.phi.scale(-(eps * q(63, 64)) / top)))
    rows = []
    for j, (kind, psi) in enumerate(perts):
        h = Compose(Slide(psi, delta, base.d), base)
        disp = max((abs(v) for v in psi.ys), default=ZERO)
        rows.append([j, kind, disp, graph_area_pa(h, box)])
    areas = [r[3] for r in rows] or [base_area]
    summary = [[base_area, min(areas), base_area - min(areas)]]
    series = [
        _series("perturbations", "graph area over Q after a perturbation of size < eps",
                [("trial", "meta"), ("kind", "meta"), ("sup_shift", "exact"), ("area", "float")], rows),
        _series("summary", "smallest observed area against the base area",
                [("base_area", "float"), ("min_area", "float"), ("drop", "float")], summary),
    ]
    checks = {"within_budget": all(r[2] < eps or eps == 0 for r in rows)}
    config = {"base": base.to_json(), "Q": [list(s) for s in box], "eps": eps,
              "trials": trials, "grid": grid}
    notes = ("evidence of lower semicontinuity only, not a proof",)
    return ExperimentResult("semicontinuity", config, seed, tuple(series), checks, notes)


# registry


@dataclass(frozen=True)
class Pipeline:
    fn: Callable
    defaults: dict
    stochastic: bool
    seeded: bool


def _tuple_of(kind):
    def conv(v):
        if isinstance(v, str):
            v = [x for x in v.replace(";", ",").split(",") if x.strip()]
        return tuple(kind(x) for x in v)

    return conv


def _rational(v):
    return q(v)


PIPELINES: dict[str, Pipeline] = {
    "banach-mycielski": Pipeline(run_banach_mycielski,
                                 {"stages": 6, "n_grid": (2, 4, 8), "p": 3, "witnesses": 0}, False, True),
    "generic-area": Pipeline(run_generic_area, {"d": 2, "ladder": (1, 10, 100), "eps": None}, False, False),
    "twist-infinite-area": Pipeline(run_twist_infinite_area,
                                    {"d": 2, "n_max": 6, "s_spec": "pow2:3", "stages": 4,
                                     "scale": q(63, 128), "delta": q(1, 4)}, False, False),
    "nowhere-diff": Pipeline(run_nowhere_diff,
                             {"d": 2, "s_spec": "pow2:3", "probes": 10, "span": 5, "rtol": 1e-12},
                             False, False),
    "singular-prevalence": Pipeline(run_singular_prevalence,
                                    {"d": 2, "f0_stage": 4, "samples": 100, "k": 8, "eps": q(1, 10),
                                     "stage_max": 5, "p": 2}, True, True),
    "semicontinuity": Pipeline(run_semicontinuity_probe,
                               {"eps": q(1, 256), "trials": 20, "grid": 16}, True, True),
}

_CONVERTERS: dict[str, Callable] = {
    "n_grid": _tuple_of(int),
    "ladder": _tuple_of(_rational),
    "eps": lambda v: None if v in (None, "", "none") else q(v),
    "scale": _rational,
    "delta": _rational,
    "s_spec": str,
    "rtol": float,
}


def resolve_config(name: str, overrides: dict) -> dict:
    """Defaults of pipeline ``name`` updated with ``overrides`` (strings are converted)."""
    if name not in PIPELINES:
        raise ConfigError(f"unknown experiment {name!r}; known: {', '.join(sorted(PIPELINES))}")
    pipe = PIPELINES[name]
    out = dict(pipe.defaults)
    for key, val in overrides.items():
        key = key.replace("-", "_")
        if key not in pipe.defaults:
            raise ConfigError(f"experiment {name!r} has no option {key!r}")
        try:
            if key in _CONVERTERS:
                out[key] = _CONVERTERS[key](val)
            elif isinstance(pipe.defaults[key], bool):
                out[key] = str(val).lower() in ("1", "true", "yes")
            elif isinstance(pipe.defaults[key], int):
                out[key] = int(val)
            else:
                out[key] = val
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r}: {val!r}") from exc
    return out


def run(name: str, config: dict | None = None, seed: int | None = None, jobs: int = 1) -> ExperimentResult:
    cfg = resolve_config(name, config or {})
    pipe = PIPELINES[name]
    if pipe.stochastic and seed is None:
        raise PreconditionError(f"experiment {name!r} is stochastic and needs --seed")
    kw: dict[str, Any] = dict(cfg)
    if pipe.seeded:
        kw["seed"] = seed
    if name == "singular-prevalence":
        kw["jobs"] = jobs
    return pipe.fn(**kw)
