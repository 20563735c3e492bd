"""Sparse multivariate polynomials with exact rational coefficients.

Exponent vectors are packed into a single Python int (``_BITS`` bits per
variable) so monomial multiplication is integer addition.  The public view
(:attr:`Poly.terms`) is always the canonical grevlex-sorted list of
``(exponent tuple, coefficient)`` pairs.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from numbers import Rational
from typing import Iterable, Sequence

_BITS = 16
_MASK = (1 << _BITS) - 1

ANY_DEGREE = "any"
NOT_HOMOGENEOUS = "not homogeneous"


def _norm(c):
    """Store integral rationals as ``int`` (much faster arithmetic)."""
    if isinstance(c, int):
        return c
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


def pack(exps: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > _MASK:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (_BITS * i)
    return key


def unpack(key: int, nvars: int) -> tuple[int, ...]:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(nvars))


def grevlex_key(exps: Sequence[int]):
    """Sort key; larger key means larger monomial in grevlex."""
    return (sum(exps), tuple(-e for e in reversed(exps)))


class Poly:
    """Immutable sparse polynomial in ``nvars`` variables over Q."""

    __slots__ = ("nvars", "_d", "_hash", "_sorted")

    def __init__(self, nvars: int, data: dict | None = None, *, _packed: bool = False):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        self.nvars = nvars
        self._hash = None
        self._sorted = None
        if data is None:
            self._d = {}
        elif _packed:
            self._d = data
        else:
            d: dict[int, object] = {}
            for exps, c in data.items():
                if len(exps) != nvars:
                    raise ValueError("exponent vector length differs from nvars")
                k = pack(exps)
                d[k] = d.get(k, 0) + _norm(c)
            self._d = {k: _norm(c) for k, c in d.items() if c != 0}

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        c = _norm(c)
        return cls(nvars, {0: c} if c != 0 else {}, _packed=True)

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        return cls(nvars, {1 << (_BITS * i): 1}, _packed=True)

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "Poly":
        return cls(len(exps), {tuple(exps): c})

    @classmethod
    def from_terms(cls, nvars: int, terms: Iterable[tuple[Sequence[int], object]]) -> "Poly":
        d: dict[int, object] = {}
        for exps, c in terms:
            if len(exps) != nvars:
                raise ValueError("exponent vector length differs from nvars")
            k = pack(exps)
            d[k] = d.get(k, 0) + _norm(c)
        return cls(nvars, {k: _norm(c) for k, c in d.items() if c != 0}, _packed=True)

    # -- views --------------------------------------------------------
    @property
    def terms(self) -> list[tuple[tuple[int, ...], object]]:
        """Canonical term list, grevlex-descending."""
        if self._sorted is None:
            items = [(unpack(k, self.nvars), c) for k, c in self._d.items()]
            items.sort(key=lambda t: grevlex_key(t[0]), reverse=True)
            self._sorted = items
        return list(self._sorted)

    def packed_items(self):
        return self._d.items()

    def coeff(self, exps: Sequence[int]):
        return self._d.get(pack(exps), 0)

    def is_zero(self) -> bool:
        return not self._d

    def __bool__(self):
        return bool(self._d)

    def __len__(self):
        return len(self._d)

    def leading_term(self):
        if not self._d:
            raise ValueError("zero polynomial has no leading term")
        return self.terms[0]

    def total_degree(self) -> int:
        if not self._d:
            return -1
        return max(sum(unpack(k, self.nvars)) for k in self._d)

    def constant_term(self):
        return self._d.get(0, 0)

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(
                    f"variable-count mismatch: {self.nvars} vs {other.nvars}"
                )
            return other
        if isinstance(other, (int, Rational)):
            return Poly.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d = dict(self._d)
        for k, c in other._d.items():
            v = d.get(k, 0) + c
            if v:
                d[k] = _norm(v)
            else:
                d.pop(k, None)
        return Poly(self.nvars, d, _packed=True)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {k: -c for k, c in self._d.items()}, _packed=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Poly":
        c = _norm(c)
        if c == 0:
            return Poly(self.nvars)
        if c == 1:
            return self
        return Poly(self.nvars, {k: _norm(v * c) for k, v in self._d.items()}, _packed=True)

    def __mul__(self, other):
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Rational)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = Poly.const(self.nvars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._d == other._d
        if isinstance(other, (int, Rational)):
            return self == Poly.const(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._d.items())))
        return self._hash

    def __repr__(self):
        return f"Poly({self.nvars}, {self})"

    def __str__(self):
        if not self._d:
            return "0"
        parts = []
        for exps, c in self.terms:
            mono = "*".join(
                f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(exps) if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # -- calculus / evaluation -----------------------------------------
    def partial(self, i: int) -> "Poly":
        return poly_partial(self, i)

    def __call__(self, *point):
        return poly_eval(self, point)

    def map_coeffs(self, fn) -> "Poly":
        d = {}
        for k, c in self._d.items():
            v = _norm(fn(c))
            if v:
                d[k] = v
        return Poly(self.nvars, d, _packed=True)

    def exponent_array(self):
        """(terms, nvars) list-of-lists for numeric compilation, canonical order."""
        return [list(e) for e, _ in self.terms]

    # -- serialization ------------------------------------------------
    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "terms": [{"c": _qstr(c), "e": list(e)} for e, c in self.terms],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Poly":
        n = int(obj["nvars"])
        return cls.from_terms(n, ((t["e"], Fraction(t["c"])) for t in obj["terms"]))


def _qstr(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


# ----------------------------------------------------------------------
# module-level operations
# ----------------------------------------------------------------------


def poly_mul(a: Poly, b: Poly) -> Poly:
    if a.nvars != b.nvars:
        raise ValueError(f"variable-count mismatch: {a.nvars} vs {b.nvars}")
    if not a._d or not b._d:
        return Poly(a.nvars)
    if len(a._d) > len(b._d):
        a, b = b, a
    d: dict[int, object] = {}
    get = d.get
    bitems = list(b._d.items())
    for k1, c1 in a._d.items():
        for k2, c2 in bitems:
            k = k1 + k2
            d[k] = get(k, 0) + c1 * c2
    return Poly(a.nvars, {k: _norm(c) for k, c in d.items() if c}, _packed=True)


def poly_partial(a: Poly, i: int) -> Poly:
    if not 0 <= i < a.nvars:
        raise IndexError(f"variable index {i} out of range for {a.nvars} variables")
    shift = _BITS * i
    one = 1 << shift
    d = {}
    for k, c in a._d.items():
        e = (k >> shift) & _MASK
        if e:
            d[k - one] = _norm(c * e)
    return Poly(a.nvars, d, _packed=True)


def poly_eval(a: Poly, point: Sequence):
    """Evaluate at a point.

    Rational points give exact values; complex/float points use
    compensated (``math.fsum``) summation on real and imaginary parts.
    """
    if len(point) != a.nvars:
        raise ValueError(f"point has length {len(point)}, expected {a.nvars}")
    exact = all(isinstance(p, (int, Rational)) for p in point)
    if exact:
        total = Fraction(0)
        for exps, c in ((unpack(k, a.nvars), c) for k, c in a._d.items()):
            v = Fraction(c)
            for p, e in zip(point, exps):
                if e:
                    v *= Fraction(p) ** e
            total += v
        return _norm(total)
    pt = [complex(p) for p in point]
    vals = []
    for k, c in a._d.items():
        v = complex(float(c))
        for p, e in zip(pt, unpack(k, a.nvars)):
            if e:
                v *= p**e
        vals.append(v)
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))


def homogeneous_degree(a: Poly):
    """Common total degree, ``NOT_HOMOGENEOUS``, or ``ANY_DEGREE`` for zero."""
    if a.is_zero():
        return ANY_DEGREE
    degs = {sum(unpack(k, a.nvars)) for k in a._d}
    if len(degs) == 1:
        return degs.pop()
    return NOT_HOMOGENEOUS


def is_homogeneous(a: Poly) -> bool:
    return homogeneous_degree(a) != NOT_HOMOGENEOUS


def _divides(klead: int, k: int, nvars: int) -> bool:
    for i in range(nvars):
        s = _BITS * i
        if ((klead >> s) & _MASK) > ((k >> s) & _MASK):
            return False
    return True


def divisibility_remainder(g: Poly, h: Poly) -> tuple[Poly, Poly]:
    """Division by a single divisor w.r.t. grevlex: ``g = q*h + r``."""
    if g.nvars != h.nvars:
        raise ValueError(f"variable-count mismatch: {g.nvars} vs {h.nvars}")
    if h.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    n = g.nvars
    lead_e, lead_c = h.leading_term()
    klead = pack(lead_e)
    lead_c = Fraction(lead_c)
    hitems = list(h._d.items())
    work = dict(g._d)
    q: dict[int, object] = {}
    r: dict[int, object] = {}
    while work:
        k = max(work, key=lambda kk: grevlex_key(unpack(kk, n)))
        c = work[k]
        if _divides(klead, k, n):
            kq = k - klead
            cq = _norm(c / lead_c)
            q[kq] = _norm(q.get(kq, 0) + cq)
            for kh, ch in hitems:
                kk = kq + kh
                v = work.get(kk, 0) - cq * ch
                if v:
                    work[kk] = _norm(v)
                else:
                    work.pop(kk, None)
        else:
            r[k] = c
            del work[k]
    return (
        Poly(n, {k: v for k, v in q.items() if v}, _packed=True),
        Poly(n, r, _packed=True),
    )


def exact_quotient(g: Poly, h: Poly) -> Poly:
    q, r = divisibility_remainder(g, h)
    if not r.is_zero():
        raise ArithmeticError("division is not exact")
    return q


def monomials_of_degree(n: int, d: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree ``d`` in ``n`` variables, grevlex-descending."""
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    out = []
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(key=grevlex_key, reverse=True)
    return out


def compose(a: Poly, subs: Sequence[Poly]) -> Poly:
    """Substitute ``x_i -> subs[i]`` (all subs share one variable count)."""
    if len(subs) != a.nvars:
        raise ValueError(f"need {a.nvars} substitutions, got {len(subs)}")
    m = subs[0].nvars
    if any(s.nvars != m for s in subs):
        raise ValueError("substitutions have different variable counts")
    cache: dict[tuple[int, int], Poly] = {}

    def power(i, e):
        key = (i, e)
        if key not in cache:
            cache[key] = subs[i] ** e if e > 1 else subs[i]
        return cache[key]

    result = Poly(m)
    for exps, c in a.terms:
        term = Poly.const(m, c)
        for i, e in enumerate(exps):
            if e:
                term = term * power(i, e)
        result = result + term
    return result


def dehomogenize(a: Poly, j: int, value=1) -> Poly:
    """Set ``x_j = value`` and drop that variable."""
    n = a.nvars
    if not 0 <= j < n:
        raise IndexError("chart index out of range")
    if n == 1:
        raise ValueError("cannot drop the only variable")
    terms = []
    for e, c in a.terms:
        terms.append((e[:j] + e[j + 1 :], c * Fraction(value) ** e[j]))
    return Poly.from_terms(n - 1, terms)


def homogenize(a: Poly, j: int) -> Poly:
    """Insert a new variable at position ``j`` making ``a`` homogeneous of its top degree."""
    top = a.total_degree()
    return Poly.from_terms(
        a.nvars + 1, ((e[:j] + (top - sum(e),) + e[j:], c) for e, c in a.terms)
    )


def random_poly(rng: random.Random, nvars: int, degree: int, *, homogeneous=True,
                density: float = 1.0, coeff_range: int = 5) -> Poly:
    """Random integer-coefficient polynomial (test/support helper)."""
    degs = [degree] if homogeneous else range(degree + 1)
    terms = []
    for dd in degs:
        for e in monomials_of_degree(nvars, dd):
            if rng.random() <= density:
                terms.append((e, rng.randint(-coeff_range, coeff_range)))
    return Poly.from_terms(nvars, terms)


# ----------------------------------------------------------------------
# univariate helpers and coprimality
# ----------------------------------------------------------------------


def univariate_coeffs(a: Poly) -> list[Fraction]:
    """Coefficients of a 1-variable polynomial, constant term first."""
    if a.nvars != 1:
        raise ValueError("expected a univariate polynomial")
    if a.is_zero():
        return []
    deg = a.total_degree()
    out = [Fraction(0)] * (deg + 1)
    for k, c in a._d.items():
        out[k] = Fraction(c)
    return out


def univariate_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd of two univariate polynomials (Euclid over Q)."""
    while not b.is_zero():
        _, r = divisibility_remainder(a, b)
        a, b = b, r
    if a.is_zero():
        return a
    _, lc = a.leading_term()
    return a.scale(Fraction(1) / Fraction(lc))


@dataclass(frozen=True)
class LineRestriction:
    base: tuple
    direction: tuple
    image: Poly

    def __post_init__(self):
        if all(v == 0 for v in self.direction):
            raise ValueError("line direction must be nonzero")


def restrict_to_line(a: Poly, base: Sequence, direction: Sequence) -> LineRestriction:
    s = Poly.var(1, 0)
    subs = [Poly.const(1, p) + s.scale(v) for p, v in zip(base, direction)]
    return LineRestriction(tuple(base), tuple(direction), compose(a, subs))


@dataclass(frozen=True)
class CoprimalityVerdict:
    coprime: bool
    lines_tried: int
    seed: int
    note: str

    def __bool__(self):
        return self.coprime


def coprimality_check(polys: Sequence[Poly], num_lines: int = 5, seed: int = 0,
                      coeff_range: int = 97) -> CoprimalityVerdict:
    """Randomized common-factor test by restriction to rational lines.

    One-sided: a genuine common factor makes every line gcd nonconstant, so
    a single constant gcd certifies coprimality.  "common factor likely" can
    be wrong with probability that shrinks with ``num_lines``.
    """
    if len(polys) < 2:
        raise ValueError("need at least two polynomials")
    n = polys[0].nvars
    for p in polys:
        if p.is_zero():
            raise ValueError("zero polynomial in coprimality check")
        if p.nvars != n:
            raise ValueError("variable-count mismatch")
    rng = random.Random(seed)
    for t in range(1, num_lines + 1):
        base = [Fraction(rng.randint(-coeff_range, coeff_range)) for _ in range(n)]
        direction = [Fraction(rng.randint(-coeff_range, coeff_range)) for _ in range(n)]
        if all(v == 0 for v in direction):
            direction[0] = Fraction(1)
        g = None
        for p in polys:
            img = restrict_to_line(p, base, direction).image
            g = img if g is None else univariate_gcd(g, img)
            if not g.is_zero() and g.total_degree() == 0:
                break
        if g is not None and not g.is_zero() and g.total_degree() == 0:
            return CoprimalityVerdict(True, t, seed, "no common factor (certified by a line with constant gcd)")
    return CoprimalityVerdict(False, num_lines, seed,
                              "common factor likely (every sampled line had a nonconstant gcd)")
