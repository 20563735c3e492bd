"""Graded spaces of polynomial vector fields for a diagonal weight field.

For weights ``k = (k_0, ..., k_{n-1})`` the field ``S = sum k_j x_j d_j`` acts
on monomial fields by ``[S, x^s d_j] = (<s,k> - k_j) x^s d_j``, so the level
``l`` eigenspace is spanned by the monomial fields with ``<s,k> - k_j = l``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .errors import NotEigenFieldError, PreconditionError
from .exterior import VectorField, divergence, lie_bracket
from .linalg import nullspace, rank
from .ring import Poly, monomials_of_degree, grevlex_key


@dataclass(frozen=True)
class WeightVector:
    weights: tuple[int, ...]

    def __post_init__(self):
        if not self.weights or any(int(k) != k or k < 1 for k in self.weights):
            raise ValueError("weights must be positive integers")

    @classmethod
    def radial(cls, n: int) -> "WeightVector":
        return cls((1,) * n)

    @property
    def n(self) -> int:
        return len(self.weights)

    def field(self) -> VectorField:
        n = self.n
        return VectorField([Poly.var(n, j).scale(k) for j, k in enumerate(self.weights)])

    def level_of(self, sigma: Sequence[int], j: int) -> int:
        return sum(s * k for s, k in zip(sigma, self.weights)) - self.weights[j]


def monomial_field(sigma: Sequence[int], j: int, coeff=1) -> VectorField:
    n = len(sigma)
    return VectorField.coordinate(n, j, Poly.monomial(sigma, coeff))


@dataclass
class GradedSubspace:
    """Basis of ``Sigma(S, l)`` (monomial fields) or a subspace of it."""

    weights: WeightVector
    level: int
    basis: list[VectorField]
    monomial_keys: list[tuple[tuple[int, ...], int]] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def coordinates(self, x: VectorField) -> list[Fraction]:
        """Coordinates of ``x`` in the monomial basis (requires a monomial basis)."""
        if not self.monomial_keys:
            raise ValueError("coordinates need the monomial basis")
        pos = {key: i for i, key in enumerate(self.monomial_keys)}
        out = [Fraction(0)] * len(self.monomial_keys)
        for j, comp in enumerate(x):
            for e, c in comp.terms:
                key = (e, j)
                if key not in pos:
                    raise NotEigenFieldError(f"term x^{e} d_{j} is not in Sigma(S, {self.level})")
                out[pos[key]] = Fraction(c)
        return out

    def combination(self, coeffs: Sequence) -> VectorField:
        out = VectorField.zero(self.weights.n)
        for c, b in zip(coeffs, self.basis):
            if c:
                out = out + b.scale(c)
        return out

    def to_json(self) -> dict:
        return {
            "weights": list(self.weights.weights),
            "level": self.level,
            "dim": self.dim,
            "basis": [b.to_json() for b in self.basis],
        }


def degree_bound(s: WeightVector, level: int) -> int:
    """Largest ``|sigma|`` allowed by ``<sigma,k> = k_j + level``."""
    top = level + max(s.weights)
    if top < 0:
        return -1
    return top // min(s.weights)


def sigma_basis(s: WeightVector, level: int, degree_cap: int | None = None) -> GradedSubspace:
    """Monomial basis of ``Sigma(S, level)``, each element eigen-checked by a bracket."""
    bound = degree_bound(s, level)
    if degree_cap is not None and all(k == 1 for k in s.weights):
        degree_cap = None  # level fixes the degree for the radial field
    if degree_cap is not None and bound > degree_cap:
        raise PreconditionError(
            f"analytic degree bound {bound} exceeds degree_cap {degree_cap}"
        )
    n = s.n
    sfield = s.field()
    keys = []
    for deg in range(bound + 1):
        for sigma in monomials_of_degree(n, deg):
            for j in range(n):
                if s.level_of(sigma, j) == level:
                    keys.append((sigma, j))
    keys.sort(key=lambda kj: (kj[1], grevlex_key(kj[0])), reverse=False)
    basis = []
    for sigma, j in keys:
        b = monomial_field(sigma, j)
        if lie_bracket(sfield, b) != b.scale(level):
            raise AssertionError(f"eigen-check failed for x^{sigma} d_{j}")
        basis.append(b)
    return GradedSubspace(s, level, basis, keys)


def sigma_dim_radial(n: int, level: int) -> int:
    """``dim Sigma(R, l) = n * C(n+l, n-1)`` for ``l >= -1``, else 0."""
    from math import comb

    if level < -1:
        return 0
    return n * comb(n + level, n - 1)


def _poly_coordinates(polys: Sequence[Poly]) -> tuple[list[tuple], list[list[Fraction]]]:
    """Matrix whose columns are coefficient vectors of ``polys`` over their joint support."""
    support = sorted({e for p in polys for e, _ in p.terms}, key=grevlex_key, reverse=True)
    pos = {e: i for i, e in enumerate(support)}
    mat = [[Fraction(0)] * len(polys) for _ in support]
    for col, p in enumerate(polys):
        for e, c in p.terms:
            mat[pos[e]][col] = Fraction(c)
    return support, mat


def divfree_basis(space: GradedSubspace) -> GradedSubspace:
    """Kernel of the divergence restricted to ``space`` (exact)."""
    if space.dim == 0:
        return GradedSubspace(space.weights, space.level, [])
    divs = [divergence(b) for b in space.basis]
    _, mat = _poly_coordinates(divs)
    if not mat:
        kernel = nullspace([], ncols=space.dim)
    else:
        kernel = nullspace(mat)
    basis = [space.combination(v) for v in kernel]
    for b in basis:
        if not divergence(b).is_zero():
            raise AssertionError("divergence-free basis element has nonzero divergence")
    return GradedSubspace(space.weights, space.level, basis)


def eigen_level(x: VectorField, s: WeightVector) -> int | None:
    """``l`` with ``[S, X] = l X``, or ``None`` (zero field returns ``None``)."""
    if x.is_zero():
        return None
    br = lie_bracket(s.field(), x)
    for comp_b, comp_x in zip(br, x):
        if not comp_x.is_zero():
            e, c = comp_x.leading_term()
            lv = Fraction(comp_b.coeff(e)) / Fraction(c)
            if lv.denominator != 1 or br != x.scale(lv):
                raise NotEigenFieldError("field is not an eigenvector of [S, .]")
            return int(lv)
    return None


@dataclass
class KernelReport:
    field: VectorField
    weights: WeightVector
    level: int
    matrix_rank: int
    domain_dim: int
    kernel_dim: int
    kernel_basis: list[VectorField]
    verified: list[bool]

    @property
    def trivial(self) -> bool:
        return self.kernel_dim == 0

    def to_json(self) -> dict:
        return {
            "weights": list(self.weights.weights),
            "level": self.level,
            "matrix_shape": None,
            "matrix_rank": self.matrix_rank,
            "domain_dim": self.domain_dim,
            "kernel_dim": self.kernel_dim,
            "kernel_basis": [w.to_json() for w in self.kernel_basis],
            "kernel_verified": self.verified,
        }


def kernel_test(x: VectorField, s: WeightVector, level: int | None = None) -> KernelReport:
    """Exact kernel of ``W -> [X, W]`` from ``Sigma(S, 0)`` to ``Sigma(S, l)``."""
    lv = eigen_level(x, s)
    if lv is None:
        if not x.is_zero():
            raise NotEigenFieldError("field is not an eigenvector of [S, .]")
        lv = 1 if level is None else level
    elif level is not None and level != lv:
        raise NotEigenFieldError(f"field has level {lv}, not {level}")
    domain = sigma_basis(s, 0)
    target = sigma_basis(s, lv)
    cols = []
    for w in domain.basis:
        br = lie_bracket(x, w)
        cols.append(target.coordinates(br))
    nrows = len(target.monomial_keys)
    mat = [[cols[c][r] for c in range(domain.dim)] for r in range(nrows)]
    if nrows == 0 or all(v == 0 for row in mat for v in row):
        rk = 0
        kernel = [[Fraction(int(i == j)) for i in range(domain.dim)] for j in range(domain.dim)]
    else:
        rk = rank(mat)
        kernel = nullspace(mat)
    basis = [domain.combination(v) for v in kernel]
    verified = [lie_bracket(x, w).is_zero() for w in basis]
    return KernelReport(x, s, lv, rk, domain.dim, domain.dim - rk, basis, verified)


@dataclass(frozen=True)
class Resonance:
    sigma: tuple[int, ...]
    j: int
    trivial: bool


def resonance_scan(s: WeightVector) -> list[Resonance]:
    """All ``(sigma, j)`` with ``<sigma,k> = k_j``; ``|sigma| = 1`` ones flagged trivial."""
    out = []
    n = s.n
    for j in range(n):
        kj = s.weights[j]
        ranges = [range(kj // k + 1) for k in s.weights]
        for sigma in product(*ranges):
            if sum(sigma) == 0:
                continue
            if sum(a * b for a, b in zip(sigma, s.weights)) == kj:
                out.append(Resonance(tuple(sigma), j, sum(sigma) == 1))
    out.sort(key=lambda r: (r.trivial, r.j, tuple(-x for x in r.sigma)))
    return out


def jouanolou_field(n: int, d: int) -> VectorField:
    """Cyclic monomial field with component ``i`` equal to ``x_{i+1 mod n}^d``."""
    if n < 2 or d < 2:
        raise ValueError("need n >= 2 and d >= 2")
    return VectorField([Poly.var(n, (i + 1) % n) ** d for i in range(n)])


@dataclass
class MembershipReport:
    divergence_free: bool
    kernel_trivial: bool
    isolated_zero: bool | None
    kernel: KernelReport | None
    note: str = ""

    @property
    def member(self) -> bool:
        return bool(self.divergence_free and self.kernel_trivial and self.isolated_zero)

    def to_json(self) -> dict:
        return {
            "divergence_free": self.divergence_free,
            "kernel_trivial": self.kernel_trivial,
            "isolated_zero": "unchecked" if self.isolated_zero is None else self.isolated_zero,
            "member": self.member,
            "kernel": self.kernel.to_json() if self.kernel else None,
            "note": self.note,
        }


def k_membership_report(x: VectorField, s: WeightVector, *, seed: int = 0) -> MembershipReport:
    """Divergence-free, trivial ``ker L0_X`` and isolated zero at the origin."""
    if x.is_zero():
        return MembershipReport(True, False, False, None, "zero field")
    rep = kernel_test(x, s)
    divfree = divergence(x).is_zero()
    iso = None
    note = ""
    if x.nvars <= 4:
        from .numeric.singular import isolated_zero_at_origin

        iso = isolated_zero_at_origin(x, seed=seed)
    else:
        note = "isolated-zero check skipped for n > 4"
    return MembershipReport(divfree, rep.trivial, iso, rep, note)
