"""Graded eigen-spaces of a diagonal field, kernels of the bracket map and resonances."""

from __future__ import annotations

from itertools import product

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from pbfol.errors import NotEigenFieldError, PreconditionError
from pbfol.exterior import VectorField, divergence, lie_bracket
from pbfol.graded import (
    WeightVector,
    divfree_basis,
    eigen_level,
    jouanolou_field,
    k_membership_report,
    kernel_test,
    monomial_field,
    resonance_scan,
    sigma_basis,
    sigma_dim_radial,
)
from pbfol.ring import Poly


def brute_sigma(weights, level, max_deg=8):
    n = len(weights)
    out = set()
    for sigma in product(range(max_deg + 1), repeat=n):
        for j in range(n):
            if sum(s * k for s, k in zip(sigma, weights)) - weights[j] == level:
                out.add((sigma, j))
    return out


def test_sigma_radial_dims():
    r = WeightVector.radial(3)
    assert sigma_basis(r, 0).dim == 9
    assert sigma_basis(r, 1).dim == 18 == sigma_dim_radial(3, 1)
    for n in (2, 3, 4):
        for lv in (-1, 0, 1, 2):
            assert sigma_basis(WeightVector.radial(n), lv).dim == sigma_dim_radial(n, lv)


def test_sigma_weighted_example():
    space = sigma_basis(WeightVector((1, 1, 2)), 0)
    assert space.dim == 8
    expected = {((1, 0, 0), 0), ((0, 1, 0), 0), ((1, 0, 0), 1), ((0, 1, 0), 1), ((0, 0, 1), 2),
                ((1, 1, 0), 2), ((2, 0, 0), 2), ((0, 2, 0), 2)}
    assert set(space.monomial_keys) == expected


@pytest.mark.parametrize("weights,level", [((1, 2, 5), 0), ((1, 2, 5), 3), ((2, 3), 1), ((1, 1, 2), 2)])
def test_sigma_matches_enumeration(weights, level):
    space = sigma_basis(WeightVector(weights), level)
    assert set(space.monomial_keys) == brute_sigma(weights, level)


def test_degree_cap():
    with pytest.raises(PreconditionError):
        sigma_basis(WeightVector((1, 2, 5)), 4, degree_cap=2)


def test_divfree_dims():
    assert divfree_basis(sigma_basis(WeightVector.radial(3), 1)).dim == 15
    assert divfree_basis(sigma_basis(WeightVector.radial(2), 0)).dim == 3
    for b in divfree_basis(sigma_basis(WeightVector((1, 2, 3)), 1)).basis:
        assert divergence(b).is_zero()


@pytest.mark.parametrize("n,d", [(3, 2), (3, 3), (4, 2)])
def test_jouanolou_kernel_trivial(n, d):
    rep = kernel_test(jouanolou_field(n, d), WeightVector.radial(n))
    assert rep.kernel_dim == 0 and rep.matrix_rank == n * n
    assert rep.level == d - 1


def test_kernel_counterexample():
    x = VectorField.coordinate(2, 0, Poly.var(2, 0) ** 2)
    rep = kernel_test(x, WeightVector.radial(2), 1)
    assert rep.kernel_dim >= 1
    x1d1 = monomial_field((0, 1), 1)
    assert lie_bracket(x, x1d1).is_zero()
    # x1 d1 lies in the span of the kernel basis
    span = sympy.Matrix([[c for comp in w for c in (comp.coeff((1, 0)), comp.coeff((0, 1)))]
                         for w in rep.kernel_basis])
    target = sympy.Matrix([[0, 0, 0, 1]])
    assert span.rank() == span.col_join(target).rank()
    assert all(rep.verified)


def test_kernel_of_zero_field():
    rep = kernel_test(VectorField.zero(3), WeightVector.radial(3), 1)
    assert rep.kernel_dim == 9


def test_kernel_rank_matches_sympy():
    x = jouanolou_field(3, 2)
    s = WeightVector.radial(3)
    domain, target = sigma_basis(s, 0), sigma_basis(s, 1)
    cols = [target.coordinates(lie_bracket(x, w)) for w in domain.basis]
    assert sympy.Matrix(cols).rank() == kernel_test(x, s).matrix_rank


def test_not_eigen_field():
    x = VectorField([Poly.var(2, 0) ** 2, Poly.var(2, 1)])
    with pytest.raises(NotEigenFieldError):
        eigen_level(x, WeightVector.radial(2))
    with pytest.raises(NotEigenFieldError):
        kernel_test(x, WeightVector.radial(2))
    with pytest.raises(NotEigenFieldError):
        kernel_test(jouanolou_field(3, 2), WeightVector.radial(3), 0)


def test_resonances():
    res = resonance_scan(WeightVector((1, 2, 5)))
    nontrivial = {(r.sigma, r.j) for r in res if not r.trivial}
    assert ((1, 2, 0), 2) in nontrivial
    assert all(not r.trivial or sum(r.sigma) == 1 for r in res)
    assert all(r.trivial for r in resonance_scan(WeightVector((1, 1))))
    for n in (2, 3, 4):
        assert all(r.trivial for r in resonance_scan(WeightVector.radial(n)))


def test_jouanolou_convention():
    x = jouanolou_field(3, 2)
    v = [Poly.var(3, i) for i in range(3)]
    assert list(x) == [v[1] ** 2, v[2] ** 2, v[0] ** 2]
    assert divergence(x).is_zero()
    with pytest.raises(ValueError):
        jouanolou_field(1, 2)


def test_membership():
    rep = k_membership_report(jouanolou_field(3, 2), WeightVector.radial(3))
    assert rep.member and rep.divergence_free and rep.kernel_trivial and rep.isolated_zero
    bad = k_membership_report(VectorField.coordinate(2, 0, Poly.var(2, 0) ** 2), WeightVector.radial(2))
    assert not bad.divergence_free and not bad.kernel_trivial and not bad.member
    zero = k_membership_report(VectorField.zero(3), WeightVector.radial(3))
    assert not zero.member and not zero.kernel_trivial and not zero.isolated_zero


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=2, max_size=3), st.integers(-1, 3))
def test_sigma_elements_are_eigen(weights, level):
    s = WeightVector(tuple(weights))
    space = sigma_basis(s, level)
    assert set(space.monomial_keys) == brute_sigma(weights, level, max_deg=level + max(weights))
    for b in space.basis[:10]:
        assert eigen_level(b, s) == level
