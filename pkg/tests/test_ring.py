"""Sparse polynomial arithmetic against hand-worked and brute-force oracles."""

from __future__ import annotations

import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbfol.ring import (
    NOT_HOMOGENEOUS,
    Poly,
    compose,
    coprimality_check,
    dehomogenize,
    divisibility_remainder,
    exact_quotient,
    homogeneous_degree,
    homogenize,
    monomials_of_degree,
    poly_eval,
    poly_mul,
    poly_partial,
    random_poly,
)

from conftest import from_sympy, to_sympy

x0, x1, x2 = (Poly.var(3, i) for i in range(3))


def naive_mul(a: Poly, b: Poly) -> dict:
    out: dict = {}
    for ea, ca in a.terms:
        for eb, cb in b.terms:
            e = tuple(i + j for i, j in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c != 0}


def test_difference_of_squares():
    a, b = Poly.var(2, 0), Poly.var(2, 1)
    assert poly_mul(a + b, a - b) == a * a - b * b


def test_zero_annihilates():
    assert (x0 * x1 + 3).__mul__(Poly.zero(3)).is_zero()


def test_product_matches_convolution_oracle():
    rng = random.Random(1)
    for _ in range(20):
        a = random_poly(rng, 3, 3, homogeneous=False, density=0.6)
        b = random_poly(rng, 3, 3, homogeneous=False, density=0.6)
        prod = poly_mul(a, b)
        assert {e: c for e, c in prod.terms} == naive_mul(a, b)


def test_product_matches_sympy():
    rng = random.Random(2)
    a = random_poly(rng, 3, 4, homogeneous=False, density=0.4)
    b = random_poly(rng, 3, 3, homogeneous=False, density=0.4)
    assert to_sympy(a * b) == (to_sympy(a) * to_sympy(b)).expand()


def test_partials():
    assert poly_partial(x0**2 * x1, 0) == 2 * x0 * x1
    assert poly_partial(x1**3, 0).is_zero()


def test_evaluation():
    a = Poly.var(2, 0) ** 2 - Poly.var(2, 1)
    assert poly_eval(a, [2, 3]) == 1
    rng = random.Random(3)
    for _ in range(10):
        p = random_poly(rng, 3, 3, homogeneous=False)
        assert poly_eval(p, [0, 0, 0]) == p.constant_term()
        pt = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(3)]
        oracle = sum(c * pt[0] ** e[0] * pt[1] ** e[1] * pt[2] ** e[2] for e, c in p.terms)
        assert poly_eval(p, pt) == oracle


def test_complex_evaluation():
    p = x0**2 + x1 * x2
    assert poly_eval(p, [1j, 2.0, 3.0]) == pytest.approx(5.0)


def test_homogeneous_degree():
    assert homogeneous_degree(x0 * x1 + x2**2) == 2
    assert homogeneous_degree(x0 + x1**2) == NOT_HOMOGENEOUS


def test_division_examples():
    a, b = Poly.var(2, 0), Poly.var(2, 1)
    q, r = divisibility_remainder(a * a - b * b, a - b)
    assert q == a + b and r.is_zero()
    _, r = divisibility_remainder(a, b)
    assert r == a
    with pytest.raises(ZeroDivisionError):
        divisibility_remainder(a, Poly.zero(2))


def test_division_round_trip():
    rng = random.Random(4)
    for _ in range(15):
        q = random_poly(rng, 3, 2, homogeneous=False, density=0.5)
        h = random_poly(rng, 3, 2, density=0.7)
        if h.is_zero():
            continue
        assert exact_quotient(q * h, h) == q


def test_division_against_sympy():
    rng = random.Random(5)
    g = random_poly(rng, 3, 4, homogeneous=False, density=0.5)
    h = random_poly(rng, 3, 2, density=0.8)
    q, r = divisibility_remainder(g, h)
    assert q * h + r == g
    assert to_sympy(q * h + r) == to_sympy(g)


def test_coprimality():
    a, b = Poly.var(2, 0), Poly.var(2, 1)
    assert coprimality_check([a, b]).coprime
    assert not coprimality_check([a * (a + b), b * (a + b)]).coprime
    z = [Poly.var(5, i) for i in range(5)]
    assert coprimality_check([z[i] ** 2 - z[4] ** 2 for i in range(4)]).coprime


def test_monomials():
    assert set(monomials_of_degree(2, 2)) == {(2, 0), (1, 1), (0, 2)}
    assert monomials_of_degree(3, 0) == [(0, 0, 0)]
    assert len(monomials_of_degree(4, 3)) == comb(6, 3)


def test_compose_and_charts():
    p = x0**2 + x1 * x2
    subs = [Poly.var(2, 0) + Poly.var(2, 1), Poly.var(2, 0), Poly.var(2, 1)]
    expected = from_sympy(to_sympy(p).subs({s: t for s, t in zip(__import__("sympy").symbols("x0:3"),
                                                               [to_sympy(v) for v in subs])}, simultaneous=True), 2)
    assert compose(p, subs) == expected
    d = dehomogenize(p, 2)
    assert homogenize(d, 2) == p


def test_json_round_trip():
    p = Fraction(1, 3) * x0**2 - 5 * x1 * x2
    assert Poly.from_json(p.to_json()) == p


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_ring_axioms(seed):
    rng = random.Random(seed)
    a, b, c = (random_poly(rng, 3, 2, homogeneous=False, density=0.4) for _ in range(3))
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert (a - a).is_zero()
    # Leibniz rule for partials
    assert (a * b).partial(1) == a.partial(1) * b + a * b.partial(1)
