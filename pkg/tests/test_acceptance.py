"""Acceptance suite: one printed PASS/FAIL line per criterion.

Each check runs at full size with its stated tolerance and time budget.  A
criterion that does not hold is reported as FAIL and left failing.
"""

from __future__ import annotations

import time
from decimal import Decimal

import numpy as np
import pytest

from singhomeo import experiments as X
from singhomeo import zigzag as zz
from singhomeo.cantor import CantorScheme, FillScheme, elementary_length_recursive, fill_measure
from singhomeo.grammar import parse_expr
from singhomeo.homeo import (
    Identity,
    Product1D,
    Slide,
    random_expr,
    random_monotone_pl,
    random_pa_expr,
    roundtrip_error,
    sample_witness,
    singular_product,
)
from singhomeo.interval_fn import PLFunc
from singhomeo.measure import (
    box_cover_upper,
    graph_area_pa,
    length_analysis,
    mass_distribution_lower,
    onto_check,
    pushforward_hist,
    singularity_score,
)
from singhomeo.measure.pa import is_pa
from singhomeo.fixtures import load
from singhomeo.rational import ONE, ZERO, dyadic, q

FIX = load()
RESULTS: dict[int, tuple[bool, str, float, float]] = {}


def _report(num: int, title: str, budget: float, fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    passed = bool(ok) and dt < budget
    if ok and not passed:
        detail += f"; over the {budget:g} s budget"
    RESULTS[num] = (passed, f"{title}: {detail}", dt, budget)
    print(f"criterion {num:2d} {'PASS' if passed else 'FAIL'} [{dt:6.2f}s / {budget:g}s] {title}: {detail}")
    assert ok, detail
    assert dt < budget, f"took {dt:.2f} s, budget {budget} s"


def _c1():
    bad = []
    base = CantorScheme(ZERO, ONE)
    for n in range(21):
        b = elementary_length_recursive(n)
        if b != dyadic(n + 1) + dyadic(2 * n + 1):
            bad.append(("b", n))
        union = sum((hi - lo for lo, hi in base.iter_elementary(n)), ZERO) if n <= 14 else (1 << n) * b
        if union != (1 << n) * b or base.measure(n) != union:
            bad.append(("union", n))
        if union - q(1, 2) != dyadic(n + 1):
            bad.append(("deficit", n))
    return not bad, "exact for n = 0..20 (unions enumerated up to n = 14)" if not bad else f"mismatches {bad}"


def _c2():
    bad = [n for n in range(1, 11) if fill_measure(None, n) != ONE - dyadic(n)]
    # the block-by-block sum over a truncated scheme follows the same recursion
    fs = FillScheme.build(4, depth=2)
    left, frac = ONE, 1 - q(3, 8)
    for n in range(1, 5):
        left *= q(3, 8)
        if fs.measure(n) != ONE - left:
            bad.append(("blocks", n))
    return not bad, "1 - 2^-n exactly for n = 1..10" if not bad else f"mismatches {bad}"


def _c3():
    spec = zz.build("pow2:3", 3)
    total, ok = 0, True
    for m in (1, 2, 3):
        count, good = zz.clause_check(spec.stages[m])
        total += count
        ok = ok and good and count > 0
    return ok, f"{total} (piece, target) pairs equal exactly for stages 1..3"


def _c4():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(100):
        f = random_monotone_pl(rng, int(rng.integers(2, 24)))
        if f.increment_sum() != 2:
            return False, "increment sum differs from 2"
        for n in (1, 2, 5, 17):
            la = length_analysis(f, n)
            if la.increments != 2 or la.length > 2.0:
                return False, f"partition n={n} breaks the identity"
        worst = max(worst, f.polyline_length())
    return worst <= 2.0, f"100 maps, increments exactly 2, max length {worst:.6f}"


def _c5():
    r = X.run_banach_mycielski(stages=6)
    Ls = r.get("lengths").column("length")[1:]
    fixture = FIX["lengths"]
    factor = fixture["shrink_factor"]
    gaps = [2.0 - L for L in Ls]
    mono = all(a <= b for a, b in zip(Ls, Ls[1:]))
    ceiling = all(L <= 2.0 for L in Ls)
    shrink = all(b <= factor * a for a, b in zip(gaps, gaps[1:]))
    match = all(abs(Decimal(repr(L)) - Decimal(fixture["values"][str(m)])) < Decimal("1e-12")
                for m, L in enumerate(Ls, 1))
    ok = mono and ceiling and shrink and match and len(Ls) == 6
    return ok, (f"L_6 = {Ls[-1]:.12f}, max gap ratio {max(b / a for a, b in zip(gaps, gaps[1:])):.4f} "
                f"<= {factor}, fixture match {match}")


def _c6():
    r = X.run_generic_area(ladder=(1, 10, 100))
    s = r.get("ladder")
    rows = list(zip(s.column("C"), s.column("certified_lower"), s.column("area")))
    ok = all(low > C for C, low, _ in rows) and r.checks["area_exceeds_C"]
    return ok, "; ".join(f"C={C}: area {a:.4f}" for C, _, a in rows)


def _c7():
    r = X.run_twist_infinite_area(n_max=6)
    s = r.get("box_masses")
    viol = s.column("violations")
    worst = max(v for v in s.column("max_bound_ratio") if v is not None)
    lows = s.column("lower")
    ok = r.checks["box_bound"] and r.checks["rung_lower_nondecreasing"]
    return ok, (f"box-pair violations per scale {viol} (worst mass / bound {worst:.2f}); "
                f"lower bounds {[round(v, 4) for v in lows]}")


def _c8():
    r = X.run_nowhere_diff(probes=10)
    ok = r.checks["profile_bound"]
    s = r.series[0]
    return ok, f"{len(s.rows)} (point, n) rows, all profile(n) >= s_n 2^n: {ok}"


def _c9():
    sc = FIX["scores"]
    eps, k, p = q(sc["eps"]), sc["k"], sc["p"]
    scores = [singularity_score(pushforward_hist(singular_product(m, 2, p), k), eps) for m in range(1, 6)]
    mono = all(a > b for a, b in zip(scores, scores[1:]))
    below = float(scores[-1]) < sc["threshold_m5"]
    w = FIX["witnesses"]
    f0 = singular_product(w["f0_stage"], 2, p)
    base = scores[w["f0_stage"] - 1]
    lo, hi = w["distortion_band"]
    ratios = []
    for seed in range(*w["seeds"]):
        wit = sample_witness(f0, seed)
        ratios.append(float(singularity_score(pushforward_hist(wit.expr, k), eps)) / float(base))
    band = all(lo <= r <= hi for r in ratios)
    ok = mono and below and band
    return ok, (f"scores {[str(v) for v in scores]}, m=5 {float(scores[-1]):.5f} < {sc['threshold_m5']}; "
                f"witness ratios in [{min(ratios):.3f}, {max(ratios):.3f}] within [{lo}, {hi}]")


def _c10():
    rng = np.random.default_rng(10)
    Q = [(q(3, 8), q(5, 8))] * 2
    done, tried, worst = 0, 0, 0.0
    while done < 20:
        tried += 1
        e = random_pa_expr(rng, 2, 3)
        if not is_pa(e, Q):
            continue
        lower = mass_distribution_lower(e, Q, k_max=4).lower
        area = graph_area_pa(e, Q)
        upper = box_cover_upper(e, Q, level=5).value
        tol = 1e-9 * max(1.0, area)
        if not (lower <= area + tol and area <= upper + tol):
            return False, f"sandwich broken: {lower} / {area} / {upper}"
        worst = max(worst, area / upper)
        done += 1
    for _ in range(50):
        f = random_monotone_pl(rng, int(rng.integers(2, 16)))
        if f.polyline_length() != graph_area_pa(f):
            return False, "polyline length and 1-D area disagree"
    return True, f"20 PA maps ({tried} drawn), lower <= area <= cover; 50 PL lengths equal"


CORPUS = [
    "identity(2)",
    "identity(3)",
    "powermap(1.5, 1.25)",
    "product(singular(4, p=2), d=2)",
    "slide(phi=zigzag(pow2:3, stages=4, scale=0.2), delta=0.25) o powermap(1.3, 1.7)",
    "twist(pow2:3, d=2)",
    "twist(pow2:3, d=3)",
    "expand(center=[0.5,0.5], r=0.1, eta=0.01)",
    "inverse(slide(phi=constant(1/16), delta=1/4, d=3))",
    "radial_twist(h=pl([0,0],[1/4,1/8],[1,1]), phi=constant(1/16)) o product(singular(3), d=2)",
]


def _c11():
    rng = np.random.default_rng(11)
    exprs = [parse_expr(t) for t in CORPUS] + [random_expr(rng, d, 5) for d in (1, 2, 2, 3, 3) for _ in range(2)]
    worst = 0.0
    for e in exprs:
        x = rng.random((10_000, e.d))
        err = roundtrip_error(e, x)
        if not err < 1e-10:
            err = roundtrip_error(e, x, prec=128)
        worst = max(worst, err)
    res = 0.0
    for amp in (q(1, 16), q(1, 10)):
        phi = PLFunc.from_points([(0, 0), (q(1, 3), amp), (q(2, 3), amp / 2), (1, 0)])
        sl = Slide(phi, q(1, 4), 2)
        rep = onto_check(sl, float(amp), 0.3, seed=11, samples=2000)
        if not rep.passed:
            return False, f"onto_check failed: {rep.to_dict()}"
        res = max(res, rep.max_residual)
    ok = worst < 1e-10 and res < 1e-8
    return ok, f"{len(exprs)} expressions, worst roundtrip {worst:.2e}; onto residual {res:.2e}"


CRITERIA = [
    (1, "fat Cantor lengths", 1.0, _c1),
    (2, "fill measure", 1.0, _c2),
    (3, "zig-zag occupancy equality", 10.0, _c3),
    (4, "length identity and ceiling", 1.0, _c4),
    (5, "graph lengths approach 2", 10.0, _c5),
    (6, "slide area ladder", 5.0, _c6),
    (7, "twist box-mass bound", 60.0, _c7),
    (8, "difference-quotient profile", 10.0, _c8),
    (9, "singularity scores", 120.0, _c9),
    (10, "estimator sandwich", 30.0, _c10),
    (11, "roundtrip and onto", 30.0, _c11),
]


@pytest.mark.parametrize("num,title,budget,fn", CRITERIA, ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(num, title, budget, fn):
    _report(num, title, budget, fn)
