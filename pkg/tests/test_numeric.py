"""Numerical layer: singularities, indeterminacy loci, local tests, fibers and continuation."""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from pbfol.errors import PreconditionError
from pbfol.exterior import VectorField, radial_field
from pbfol.foliation import (
    diagonal_difference_map,
    diagonal_field,
    linear_projection_map,
    omega_from_field,
    power_map,
    pullback_form,
    standard_pair,
)
from pbfol.graded import jouanolou_field
from pbfol.numeric import (
    SolverConfig,
    chart_field,
    classify_hyperbolic,
    fiber_points,
    generic_pair_check,
    genericity_check,
    indeterminacy_locus,
    isolated_zero_at_origin,
    kupka_test,
    ngk_test,
    solve_singularities,
    track_deformation,
)
from pbfol.numeric.evaluate import CompiledSystem, newton_batch, projective_distance, projective_normalize
from pbfol.numeric.local import nilpotency_residual
from pbfol.numeric.maps import random_map_perturbation
from pbfol.numeric.singular import expected_singularity_count
from pbfol.numeric.solvers import durand_kerner, resultant, univariate_roots
from pbfol.ring import Poly


@pytest.fixture(scope="module")
def standard():
    f, g = standard_pair()
    return pullback_form(f, g)


@pytest.fixture(scope="module")
def standard_locus(standard):
    return indeterminacy_locus(standard.map)


# -- solvers ------------------------------------------------------------


def test_durand_kerner_roots_of_unity():
    roots = durand_kerner([-1, 0, 0, 0, 0, 0, 0, 1])
    assert np.allclose(roots**7, 1, atol=1e-12)
    assert len({(round(r.real, 8), round(r.imag, 8)) for r in roots}) == 7


def test_resultant_of_j2_chart():
    cf = chart_field(omega_from_field(jouanolou_field(3, 2)), 2)
    p, q = cf.field.components
    r = resultant(p, q, eliminate=1)
    roots = univariate_roots(r)
    assert np.allclose(roots**7, 1, atol=1e-10)


def test_compiled_system_matches_exact():
    p = Poly.var(3, 0) ** 2 * Poly.var(3, 1) - Fraction(1, 2) * Poly.var(3, 2) ** 3
    system = CompiledSystem([p])
    pt = np.array([0.3 + 1j, -1.2, 0.5j])
    from pbfol.ring import poly_eval

    assert system(pt[None, :])[0, 0] == pytest.approx(complex(poly_eval(p, list(pt))))


# -- singularities ----------------------------------------------------


def test_chart_field_examples():
    g = omega_from_field(jouanolou_field(3, 2))
    x0, x1 = Poly.var(2, 0), Poly.var(2, 1)
    assert list(chart_field(g, 2).field) == [x1**2 - x0**3, 1 - x1 * x0**2]
    assert all(c.is_zero() for c in chart_field(radial_field(3), 0).field)
    cf = chart_field(diagonal_field([1, 2, 5]), 1)
    assert list(cf.field) == [Poly.var(2, 0).scale(1 - 2), Poly.var(2, 1).scale(5 - 2)]


def test_expected_count():
    assert [expected_singularity_count(n, d) for n, d in [(3, 2), (3, 3), (4, 2), (3, 1)]] == [7, 13, 15, 3]


def test_j2_plane_singularities_resultant_and_newton_agree():
    g = omega_from_field(jouanolou_field(3, 2))
    res = solve_singularities(g, method="resultant")
    new = solve_singularities(g, method="newton")
    assert res.found == new.found == 7
    for r in res.points:
        assert min(projective_distance(np.asarray(r.point), np.asarray(s.point)) for s in new.points) < 1e-8
        assert r.residual < 1e-10
        assert classify_hyperbolic(r, g).classification == "hyperbolic"
    chart2 = [r for r in res.points if r.chart == 2 or abs(r.point[2]) > 0]
    for r in chart2:
        z = np.asarray(r.point) / r.point[2]
        assert abs(z[0] ** 7 - 1) < 1e-8 and abs(z[1] - z[0] ** -2) < 1e-8


def test_j3_plane_count():
    g = omega_from_field(jouanolou_field(3, 3))
    rep = solve_singularities(g)
    assert rep.found == 13
    assert all(classify_hyperbolic(r, g).classification == "hyperbolic" for r in rep.points)


def test_j2_space_count():
    g = omega_from_field(jouanolou_field(4, 2))
    rep = solve_singularities(g)
    assert rep.found == rep.expected == 15
    assert max(r.residual for r in rep.points) < 1e-10


def test_diagonal_field_singularities():
    g = omega_from_field(diagonal_field([1, 2, 3]))
    rep = solve_singularities(g)
    assert rep.found == 3
    pts = sorted(tuple(np.round(np.abs(r.point), 8)) for r in rep.points)
    assert pts == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    for r in rep.points:
        classify_hyperbolic(r, g)
        assert r.classification == "non-hyperbolic"
        assert all(abs(z.imag) < 1e-12 for z in r.ratios)


def test_classification_rejects_bad_residual():
    g = omega_from_field(jouanolou_field(3, 2))
    rec = solve_singularities(g).points[0]
    rec.residual = 1.0
    with pytest.raises(PreconditionError):
        classify_hyperbolic(rec, g)


def test_classification_chart_invariant():
    g = omega_from_field(jouanolou_field(3, 2))
    for rec in solve_singularities(g).points:
        ratio_sets = []
        for j in range(3):
            if abs(rec.point[j]) < 1e-3:
                continue
            r = classify_hyperbolic(type(rec)(rec.chart, rec.coordinates, rec.point, rec.residual), chart_field(g, j))
            ratio_sets.append(sorted(r.ratios, key=lambda z: (round(z.real, 6), round(z.imag, 6))))
        for other in ratio_sets[1:]:
            assert np.allclose(ratio_sets[0], other, atol=1e-8)


def test_isolated_zero():
    assert isolated_zero_at_origin(jouanolou_field(3, 2))
    v = [Poly.var(2, i) for i in range(2)]
    assert isolated_zero_at_origin(VectorField([v[0] ** 2, v[1] ** 2]))
    assert not isolated_zero_at_origin(VectorField([v[0] ** 2, v[0] * v[1]]))


# -- indeterminacy -----------------------------------------------------


def test_indeterminacy_closed_form():
    f = diagonal_difference_map(4, 2)
    for method in ("exact", "newton"):
        loc = indeterminacy_locus(f, method=method)
        assert loc.found == 16 and all(loc.transversal) and all(loc.reduced)
        closed = [np.array(s + (1,), dtype=complex) for s in product((1, -1), repeat=4)]
        for p in loc.points:
            assert min(np.abs(projective_normalize(p) - projective_normalize(c)).max() for c in closed) < 1e-10
    assert genericity_check(f).generic


def test_indeterminacy_degenerate_maps():
    lin = indeterminacy_locus(linear_projection_map(4))
    assert lin.found == 1 and genericity_check(linear_projection_map(4), lin).generic
    pw = indeterminacy_locus(power_map(4, 2))
    assert pw.found == 1 and not pw.reduced[0]
    verdict = genericity_check(power_map(4, 2), pw)
    assert not verdict.generic and verdict.flags == [False]


# -- local tests --------------------------------------------------------


def test_ngk_at_indeterminacy_points(standard, standard_locus):
    for p in standard_locus.points[:4]:
        v = ngk_test(standard, p, genericity_ok=True)
        assert v.ngk and v.exact and v.nilpotency_residual == 0.0 and v.isolated
        assert v.type_tag == ((1, 1, 1, 1), 1)
        assert not kupka_test(standard, p).kupka


def test_ngk_float_path(standard, standard_locus):
    p = standard_locus.points[0] * (1 + 1e-14)
    v = ngk_test(standard, p, exact_point=None, isolation=False)
    assert v.ngk


def test_kupka_on_fiber(standard):
    g = standard.base
    sing = solve_singularities(g)
    pts, counts = fiber_points(standard.map, np.asarray(sing.points[0].point), slices=2, seed=0)
    assert counts == [8, 8]
    for p in pts:
        assert kupka_test(standard, p).kupka
        assert not ngk_test(standard, p, isolation=False).ngk


def test_local_tests_need_singular_point(standard):
    p = np.array([0.3, 0.7 + 0.2j, -0.4, 1.1, 0.9])
    with pytest.raises(PreconditionError):
        kupka_test(standard, p)
    with pytest.raises(PreconditionError):
        ngk_test(standard, p)


def test_nilpotency_residual():
    assert nilpotency_residual(np.eye(3), 1.0) > 1e-8
    n = np.array([[0, 1.0, 0], [0, 0, 1.0], [0, 0, 0]])
    assert nilpotency_residual(n, 1.0) < 1e-12


# -- fibers and generic pairs ------------------------------------------


def test_linear_map_generic_pair():
    f = linear_projection_map(3)
    g = omega_from_field(jouanolou_field(3, 2))
    v = generic_pair_check(f, g)
    assert v.verdict == "generic pair" and not v.critical_points


@pytest.mark.slow
def test_unit_weight_map_is_not_generic_pair():
    f = diagonal_difference_map(4, 2)
    g = omega_from_field(jouanolou_field(4, 2))
    v = generic_pair_check(f, g)
    assert v.verdict == "not generic"
    assert v.critical_points


@pytest.mark.slow
def test_standard_pair_is_generic(standard):
    v = generic_pair_check(standard.map, standard.base)
    assert v.passed
    assert all(c == [8, 8] for c in v.fiber_counts)


# -- deformation --------------------------------------------------------


def test_deformation_at_zero_is_constant(standard, standard_locus):
    rep = track_deformation(standard, [0], map_perturbation=random_map_perturbation(standard.map, np.random.default_rng(1)),
                            check_uniqueness=False)
    for path, p in zip(rep.paths, standard_locus.points):
        q = path.points["0"]
        assert np.abs(q - p / p[path.chart]).max() < 1e-13


def test_deformation_short_map_path(standard):
    g = random_map_perturbation(standard.map, np.random.default_rng(2))
    rep = track_deformation(standard, [0, Fraction(1, 100)], map_perturbation=g, endpoint_check=True)
    assert rep.lost == 0 and rep.type_changes == 0
    assert rep.endpoint_error < 1e-8
    for path in rep.paths:
        a, b = path.points["0"], path.points["1/100"]
        assert np.linalg.norm(b - a) <= path.lipschitz * 0.01 * (1 + 1e-9)


def test_deformation_field_perturbation(standard):
    rng = np.random.default_rng(3)
    y = VectorField([Poly.var(4, (i + 2) % 4) ** 2 - Poly.var(4, (i + 3) % 4) ** 2 for i in range(4)])
    rep = track_deformation(standard, [0, Fraction(1, 50)], field_perturbation=y, check_uniqueness=False)
    assert rep.lost == 0 and rep.type_changes == 0
    assert all(max(p.nilpotency.values()) < 1e-8 for p in rep.paths)


def test_deformation_needs_provenance(standard):
    from pbfol.foliation import TwoDimFoliation

    with pytest.raises(PreconditionError):
        track_deformation(TwoDimFoliation(standard.form, standard.degree), [0], map_perturbation=[])
