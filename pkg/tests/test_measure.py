from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from singhomeo.errors import PreconditionError, UnsupportedExpression
from singhomeo.homeo import Identity, PowerMap, Product1D, Slide, compose, random_pa_expr
from singhomeo.interval_fn import PLFunc
from singhomeo.measure import (
    area_report,
    box_cover_series,
    box_cover_upper,
    diff_quotient_profile,
    graph_area_pa,
    gram_cauchy_binet,
    gram_direct,
    length_analysis,
    local_ratio,
    mass_distribution_lower,
    onto_check,
    pa_cells,
    pushforward_hist,
    singularity_score,
)
from singhomeo.measure.occupation import OccupationHist
from singhomeo.measure.pa import det, is_pa
from singhomeo.rational import q

from strategies import monotone_pl

small_q = st.fractions(min_value=-4, max_value=4, max_denominator=16).map(q)


# Jacobians


def test_gram_examples():
    Z = ((q(0), q(0)), (q(0), q(0)))
    assert gram_cauchy_binet(Z) == 1
    I = ((q(1), q(0)), (q(0), q(1)))
    assert gram_cauchy_binet(I) == 4
    assert gram_cauchy_binet(((q(3), q(0)), (q(0), q(0)))) == 10


@given(st.integers(1, 3).flatmap(lambda d: st.lists(st.lists(small_q, min_size=d, max_size=d),
                                                    min_size=d, max_size=d)))
def test_cauchy_binet_matches_direct(rows):
    A = tuple(tuple(r) for r in rows)
    assert gram_cauchy_binet(A) == gram_direct(A)
    assert gram_direct(A) >= 1


def test_det_exact():
    assert det([[q(2), q(1)], [q(1), q(1, 2)]]) == 0
    assert det([[q(0), q(1)], [q(1), q(0)]]) == -1


# exact area


def test_identity_area():
    assert graph_area_pa(Identity(2)) == pytest.approx(2.0, abs=1e-15)
    assert graph_area_pa(Identity(1)) == pytest.approx(math.sqrt(2))
    Q = [(q(1, 4), q(1, 2)), (q(0), q(1, 2))]
    assert graph_area_pa(Identity(2), Q) == pytest.approx(2 * (1 / 8))


def test_stretch_area():
    # slope 3 on one axis over half the interval: a cell with A = diag(3, 1) has J = sqrt(20)
    f = PLFunc.from_points([(0, 0), (q(1, 4), q(3, 4)), (1, 1)], True)
    e = Product1D((f, PLFunc.identity()))
    cells = pa_cells(e)
    assert sum(c.volume for c in cells) == 1
    expected = (math.hypot(q(1, 4), q(3, 4)) + math.hypot(q(3, 4), q(1, 4))) * math.sqrt(2)
    assert graph_area_pa(e) == pytest.approx(expected, rel=1e-14)


@given(monotone_pl(), monotone_pl())
def test_product_area_factorizes(f, g):
    e = Product1D((f, g))
    assert graph_area_pa(e) == pytest.approx(graph_area_pa(f) * graph_area_pa(g), rel=1e-12)


def test_area_unsupported():
    with pytest.raises(UnsupportedExpression):
        graph_area_pa(PowerMap((2.0, 1.5)))


@given(st.integers(0, 2**32 - 1))
def test_area_sandwich(seed):
    rng = np.random.default_rng(seed)
    e = random_pa_expr(rng, 2, 2)
    Q = [(q(3, 8), q(5, 8))] * 2
    if not is_pa(e, Q):
        return
    rep = area_report(e, Q, cover_level=4)
    assert rep.exact and rep.sandwich_ok()


# covers


def test_identity_cover():
    rep = box_cover_upper(Identity(1), level=3)
    assert rep.certified and rep.count == 8
    assert rep.value == pytest.approx(8 * (1 / 8) * math.sqrt(2))
    rows = box_cover_series(Identity(2), levels=range(1, 4))
    assert [r["reported"] for r in rows] == sorted(r["reported"] for r in rows)
    assert all(r["reported"] >= 2 - 1e-12 for r in rows)


def test_cover_needs_scale():
    with pytest.raises(PreconditionError):
        box_cover_upper(Identity(1))


# mass distribution


def test_mass_identity():
    rep = mass_distribution_lower(PLFunc.identity(), k_max=4)
    assert rep.exact and rep.lower == pytest.approx(1.0)
    rep2 = mass_distribution_lower(Identity(2), k_max=3)
    assert rep2.lower == pytest.approx(1.0)
    assert rep2.lower <= graph_area_pa(Identity(2))


def test_mass_bound_check():
    rep = mass_distribution_lower(Identity(2), k_max=3, bound=lambda n: q(1, 2))
    assert rep.violations > 0
    rep = mass_distribution_lower(Identity(2), k_max=3, bound=lambda n: 1)
    assert rep.violations == 0


def test_mass_monte_carlo_needs_seed():
    with pytest.raises(PreconditionError):
        mass_distribution_lower(PowerMap((1.5, 1.5)), k_max=2)
    rep = mass_distribution_lower(PowerMap((1.5, 1.5)), k_max=2, seed=1, samples=20_000)
    assert not rep.exact and rep.stderr is not None


def test_slide_reduction_matches_cells():
    phi = PLFunc.from_points([(0, 0), (q(1, 2), q(1, 32)), (1, 0)])
    sl = Slide(phi, q(1, 8), 2)
    Q = [(q(1, 4), q(1, 2)), (q(0), q(1))]
    a = mass_distribution_lower(sl, Q, k_max=4)
    b = mass_distribution_lower(compose(sl, Product1D((PLFunc.identity(), PLFunc.identity()))), Q, k_max=4)
    assert a.method == "slide reduction"
    assert [r.max_mass for r in a.rows] == [r.max_mass for r in b.rows]


# length


def test_length_identity():
    la = length_analysis(PLFunc.identity(), 3)
    assert la.increments == 2
    assert la.length == pytest.approx(math.sqrt(2))
    assert la.flat_measure == 0 and not la.length_condition
    la1 = length_analysis(PLFunc.identity(), 1)
    assert la1.flat_measure == 1 and la1.flat_bound_holds


@given(monotone_pl(), st.integers(1, 8))
def test_length_partition_identities(f, n):
    la = length_analysis(f, n)
    assert la.increments == 2
    assert la.length <= 2.0
    assert la.mesh < q(1, n)
    assert la.deficit_sum == pytest.approx(2.0 - la.length, abs=1e-12)
    if la.length_condition:
        assert la.flat_bound_holds


# occupation


def test_identity_hist_uniform():
    h = pushforward_hist(Identity(2), 3)
    assert h.exact and set(h.masses.flat) == {q(1, 64)}
    assert h.total() == 1
    assert singularity_score(h, q(1, 2)) == q(1, 2)
    assert h.coarsen().masses.shape == (4, 4)
    assert set(h.coarsen().masses.flat) == {q(1, 16)}


def test_point_mass_score():
    m = np.zeros((8, 8), dtype=object)
    m[...] = q(0)
    m[3, 5] = q(1)
    h = OccupationHist(3, 2, m, True)
    assert singularity_score(h, q(1, 10)) == q(1, 64)


def test_score_eps_range():
    h = pushforward_hist(Identity(1), 2)
    for eps in (0, 1, 2):
        with pytest.raises(PreconditionError):
            singularity_score(h, eps)


@given(monotone_pl(), st.integers(1, 5))
def test_hist_is_probability(f, k):
    h = pushforward_hist(Product1D((f, f)), k)
    assert h.total() == 1
    assert all(v >= 0 for v in h.masses.flat)
    assert h.coarsen().total() == 1


def test_hist_sampling_needs_seed():
    sl = Slide(PLFunc.constant(q(1, 16)), q(1, 4), 2)
    with pytest.raises(PreconditionError):
        pushforward_hist(sl, 2)
    h = pushforward_hist(sl, 2, seed=5, samples=50_000)
    assert not h.exact and h.total() == pytest.approx(1.0)


def test_local_ratio_power():
    for r in (q(1, 4), q(1, 16)):
        lr = local_ratio(PowerMap((2.0,)), [q(0)], r)
        assert float(lr.value) == pytest.approx(float(r))
    lr = local_ratio(Identity(2), [q(1, 2), q(1, 2)], q(1, 8))
    assert lr.value == 1 and lr.method == "exact"


# probes


def test_profile_power_map():
    rows = diff_quotient_profile(PowerMap((2.0,)), [0.5], range(10, 20))
    for r in rows:
        assert r.quotient == pytest.approx(1.0, abs=2.0 ** -r.n + 1e-12)


def test_profile_identity():
    rows = diff_quotient_profile(Identity(2), [0.3, 0.7], range(1, 6))
    assert all(r.quotient == pytest.approx(1.0) for r in rows)


def test_onto_identity_and_slide():
    rep = onto_check(Identity(2), 0.0, 0.2, seed=0)
    assert rep.passed and rep.max_residual == 0
    sl = Slide(PLFunc.from_points([(0, 0), (q(1, 2), q(1, 20)), (1, 0)]), q(1, 4), 2)
    rep = onto_check(sl, 0.05, 0.3, seed=0, samples=500)
    assert rep.passed and rep.max_residual < 1e-8
    assert rep.sampled_displacement <= 0.05 + 1e-12
    fp = onto_check(sl, 0.05, 0.3, seed=0, samples=200, method="fixed_point")
    assert fp.passed


def test_onto_vacuous_and_seed():
    assert onto_check(Identity(2), 0.3, 0.2, seed=0).vacuous
    with pytest.raises(PreconditionError):
        onto_check(Identity(2), 0.1, 0.2)
