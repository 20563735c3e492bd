"""Shared helpers: random exact objects and a sympy bridge used as an oracle."""

from __future__ import annotations

import random
from itertools import combinations

import pytest
import sympy

from pbfol.exterior import KForm, VectorField
from pbfol.ring import Poly, random_poly


def sym_vars(n: int):
    return sympy.symbols(f"x0:{n}")


def to_sympy(p: Poly):
    xs = sym_vars(p.nvars)
    expr = sympy.Integer(0)
    for e, c in p.terms:
        term = sympy.Rational(c.numerator, c.denominator) if hasattr(c, "denominator") else sympy.Integer(c)
        for x, k in zip(xs, e):
            term *= x**k
        expr += term
    return sympy.expand(expr)


def from_sympy(expr, n: int) -> Poly:
    xs = sym_vars(n)
    poly = sympy.Poly(sympy.expand(expr), *xs)
    from fractions import Fraction

    return Poly.from_terms(n, [(e, Fraction(int(c.p), int(c.q))) for e, c in poly.terms()])


def rand_form(rng: random.Random, n: int, k: int, m: int, density: float = 0.5, coeff_range: int = 3) -> KForm:
    comps = {}
    for idx in combinations(range(n), k):
        p = random_poly(rng, n, m, density=density, coeff_range=coeff_range)
        if not p.is_zero():
            comps[idx] = p
    return KForm(n, k, comps)


def rand_field(rng: random.Random, n: int, d: int, density: float = 0.5, coeff_range: int = 3) -> VectorField:
    return VectorField([random_poly(rng, n, d, density=density, coeff_range=coeff_range) for _ in range(n)])


@pytest.fixture
def rng():
    return random.Random(12345)


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {number} [{title}]: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
