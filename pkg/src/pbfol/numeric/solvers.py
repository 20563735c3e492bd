"""Univariate root finding and bivariate elimination."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..linalg import poly_det
from ..ring import Poly, univariate_coeffs


def durand_kerner(coeffs, *, max_iter: int = 2000, tol: float = 1e-14) -> np.ndarray:
    """All complex roots of ``sum coeffs[i] t^i`` (constant term first).

    Simultaneous Weierstrass iteration from points on a circle bounding the
    roots, followed by a few Newton polishing steps per root.
    """
    c = np.array([complex(v) for v in coeffs], dtype=complex)
    while c.size and c[-1] == 0:
        c = c[:-1]
    deg = c.size - 1
    if deg < 1:
        return np.zeros(0, dtype=complex)
    monic = c / c[-1]
    # Cauchy bound
    radius = 1 + np.abs(monic[:-1]).max()
    z = radius * 0.9 * (0.4 + 0.9j) ** np.arange(deg) / np.abs(0.4 + 0.9j) ** np.arange(deg)
    p = np.polynomial.polynomial.Polynomial(monic)
    dp = p.deriv()
    for _ in range(max_iter):
        num = p(z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        den = diff.prod(axis=1)
        den = np.where(den == 0, 1e-300, den)
        step = num / den
        z = z - step
        if np.all(np.abs(step) <= tol * (1 + np.abs(z))):
            break
    for _ in range(5):
        d = dp(z)
        ok = np.abs(d) > 1e-300
        z = np.where(ok, z - p(z) / np.where(ok, d, 1), z)
    return z


def _as_univariate_in(p: Poly, var: int) -> list[Poly]:
    """Coefficients of ``p`` as a polynomial in ``x_var`` over the other variable (2 vars)."""
    if p.nvars != 2:
        raise ValueError("expected a bivariate polynomial")
    other = 1 - var
    deg = max((e[var] for e, _ in p.terms), default=0)
    coeffs = [dict() for _ in range(deg + 1)]
    for e, c in p.terms:
        coeffs[e[var]][(e[other],)] = c
    return [Poly(1, d) for d in coeffs]


def sylvester_matrix(a: list[Poly], b: list[Poly]) -> list[list[Poly]]:
    """Sylvester matrix of two univariate-coefficient lists (constant term first)."""
    m, n = len(a) - 1, len(b) - 1
    zero = Poly(1)
    size = m + n
    rows = []
    for i in range(n):
        row = [zero] * size
        for j, c in enumerate(reversed(a)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for j, c in enumerate(reversed(b)):
            row[i + j] = c
        rows.append(row)
    return rows


def resultant(p: Poly, q: Poly, eliminate: int = 1) -> Poly:
    """Exact Sylvester resultant of two bivariate polynomials w.r.t. ``x_eliminate``.

    The result is a univariate polynomial in the remaining variable.
    """
    a = _as_univariate_in(p, eliminate)
    b = _as_univariate_in(q, eliminate)
    if len(a) == 1 and len(b) == 1:
        raise ValueError("neither polynomial involves the eliminated variable")
    if len(a) == 1:
        return a[0] ** (len(b) - 1)
    if len(b) == 1:
        return b[0] ** (len(a) - 1)
    return poly_det(sylvester_matrix(a, b))


def univariate_roots(p: Poly) -> np.ndarray:
    coeffs = univariate_coeffs(p)
    if len(coeffs) < 2:
        return np.zeros(0, dtype=complex)
    return durand_kerner([float(Fraction(c)) for c in coeffs])
