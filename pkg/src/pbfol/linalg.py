"""Fraction-free (Bareiss) elimination over Q and over polynomial rings."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .ring import Poly, exact_quotient


def _common_denominator_rows(rows):
    """Scale each row to integers; row scaling does not change rank or kernel."""
    out = []
    for row in rows:
        den = 1
        for v in row:
            if isinstance(v, Fraction) and v.denominator != 1:
                den = den * v.denominator // _gcd(den, v.denominator)
        out.append([int(Fraction(v) * den) for v in row])
    return out


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def bareiss_echelon(matrix: Sequence[Sequence]) -> tuple[list[list[int]], list[int]]:
    """Integer row echelon form by Bareiss elimination.

    Returns the reduced-in-place integer matrix and the list of pivot columns.
    Entries stay integral because every division is exact.
    """
    a = _common_denominator_rows(matrix)
    if not a:
        return a, []
    nrows, ncols = len(a), len(a[0])
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        for i in range(r + 1, nrows):
            aic = a[i][c]
            row_i, row_r = a[i], a[r]
            for j in range(c + 1, ncols):
                row_i[j] = (piv * row_i[j] - aic * row_r[j]) // prev
            row_i[c] = 0
        # entries of earlier rows beyond r are untouched; keeps fraction-free invariant
        prev = piv
        pivots.append(c)
        r += 1
    return a, pivots


def rank(matrix: Sequence[Sequence]) -> int:
    if not matrix or not matrix[0]:
        return 0
    return len(bareiss_echelon(matrix)[1])


def nullspace(matrix: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Exact basis of ``{v : M v = 0}`` over Q."""
    if not matrix:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    ncols = len(matrix[0])
    ech, pivots = bareiss_echelon(matrix)
    r = len(pivots)
    # back substitution on the echelon rows with Fractions
    rows = [[Fraction(v) for v in ech[i]] for i in range(r)]
    for i in range(r - 1, -1, -1):
        c = pivots[i]
        pv = rows[i][c]
        rows[i] = [v / pv for v in rows[i]]
        for k in range(i):
            f = rows[k][c]
            if f:
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[i])]
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -rows[i][fc]
        basis.append(v)
    return basis


def poly_det(matrix: Sequence[Sequence[Poly]]) -> Poly:
    """Determinant of a square matrix of polynomials (Bareiss, exact divisions)."""
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    nv = matrix[0][0].nvars
    a = [list(row) for row in matrix]
    sign = 1
    prev = Poly.const(nv, 1)
    for k in range(n - 1):
        if a[k][k].is_zero():
            p = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if p is None:
                return Poly(nv)
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[k][k] * a[i][j] - a[i][k] * a[k][j]
                a[i][j] = exact_quotient(num, prev) if prev != 1 else num
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign == 1 else -det


def matmul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


def matpow(a, e: int):
    n = len(a)
    result = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    base = a
    while e:
        if e & 1:
            result = matmul(result, base)
        e >>= 1
        if e:
            base = matmul(base, base)
    return result
