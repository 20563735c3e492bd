"""Foliation-defining forms: constructors and exact global checks.

A one-dimensional foliation on P^{n-1} is given by a homogeneous field ``X``
on C^n and its form ``i_R i_X dvol``.  A pull-back foliation by surfaces on
P^n is given by the (n-2)-form obtained by substituting a rational map into
that form.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import DegenerateFoliationError, PreconditionError
from .exterior import (
    KForm,
    MultiVector,
    VectorField,
    basis_multivectors,
    bivector_dual,
    contract_covector,
    contract_multivector,
    differential,
    exterior_derivative,
    form_to_multivector,
    gradient,
    interior_product,
    lie_bracket,
    radial_field,
    rotational,
)
from .ring import (
    NOT_HOMOGENEOUS,
    ANY_DEGREE,
    Poly,
    compose,
    coprimality_check,
    divisibility_remainder,
    homogeneous_degree,
    monomials_of_degree,
)

log = logging.getLogger(__name__)


# ----------------------------------------------------------------------
# data types
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class OneDimFoliation:
    """Foliation by curves on P^{n-1} defined by a homogeneous field of degree ``degree``."""

    field: VectorField
    form: KForm
    degree: int

    @property
    def ambient_vars(self) -> int:
        return self.field.nvars

    def to_json(self) -> dict:
        return {"field": self.field.to_json(), "form": self.form.to_json(), "d": self.degree}


@dataclass(frozen=True)
class RationalMap:
    """``f = (F_0 : ... : F_{n-1})`` from P^n to P^{n-1}; each ``F_i`` in n+1 variables."""

    components: tuple[Poly, ...]
    degree: int

    @classmethod
    def from_polys(cls, polys: Sequence[Poly], *, check_coprime: bool = True, seed: int = 0) -> "RationalMap":
        polys = tuple(polys)
        n = len(polys)
        if n < 2:
            raise ValueError("a rational map to P^{n-1} needs at least two components")
        if any(p.nvars != n + 1 for p in polys):
            raise ValueError(f"components must be polynomials in {n + 1} variables")
        degs = {homogeneous_degree(p) for p in polys}
        if ANY_DEGREE in degs:
            raise ValueError("zero component in rational map")
        if NOT_HOMOGENEOUS in degs or len(degs) != 1:
            raise ValueError("components must be homogeneous of one common degree")
        if check_coprime:
            verdict = coprimality_check(list(polys), num_lines=4, seed=seed)
            if not verdict.coprime:
                raise ValueError("components appear to share a common factor: " + verdict.note)
        return cls(polys, degs.pop())

    @property
    def target_dim(self) -> int:
        """``n`` (number of components); the source is P^n with n+1 variables."""
        return len(self.components)

    @property
    def nvars(self) -> int:
        return len(self.components) + 1

    def to_json(self) -> dict:
        return {"nvars": self.nvars, "degree": self.degree, "components": [p.to_json() for p in self.components]}

    @classmethod
    def from_json(cls, obj, *, check_coprime: bool = True) -> "RationalMap":
        return cls.from_polys([Poly.from_json(p) for p in obj["components"]], check_coprime=check_coprime)


@dataclass(frozen=True)
class TwoDimFoliation:
    """Foliation by surfaces on P^n given by an (n-2)-form in n+1 variables."""

    form: KForm
    degree: int | None
    map: RationalMap | None = None
    base: OneDimFoliation | None = None
    common_factor: Poly | None = field(default=None, compare=False)

    @property
    def nvars(self) -> int:
        return self.form.nvars

    @property
    def has_provenance(self) -> bool:
        return self.map is not None and self.base is not None

    def to_json(self) -> dict:
        prov = None
        if self.has_provenance:
            prov = {
                "map": self.map.to_json(),
                "field": self.base.field.to_json(),
                "d": self.base.degree,
                "nu": self.map.degree,
            }
        return {"form": self.form.to_json(), "degree": self.degree, "provenance": prov}

    @classmethod
    def from_json(cls, obj) -> "TwoDimFoliation":
        form = KForm.from_json(obj["form"])
        prov = obj.get("provenance")
        fmap = base = None
        if prov:
            fmap = RationalMap.from_json(prov["map"], check_coprime=False)
            base = omega_from_field(VectorField.from_json(prov["field"]))
        deg = obj.get("degree")
        return cls(form, deg, fmap, base)


# ----------------------------------------------------------------------
# constructors
# ----------------------------------------------------------------------


def omega_from_field(x: VectorField) -> OneDimFoliation:
    """``Omega = i_R i_X dvol`` for a homogeneous field ``X``."""
    d = x.degree()
    if d == ANY_DEGREE:
        raise DegenerateFoliationError("zero vector field")
    if d == NOT_HOMOGENEOUS:
        raise PreconditionError("vector field is not homogeneous")
    n = x.nvars
    r = radial_field(n)
    omega = interior_product(r, interior_product(x, KForm.volume(n)))
    if omega.is_zero():
        raise DegenerateFoliationError("field is proportional to the radial field; the form vanishes")
    return OneDimFoliation(x, omega, d)


def _hatted_wedges(dfs: Sequence[KForm], n: int) -> dict[tuple[int, int], KForm]:
    """``dF_0^...^(dF_i)^...^(dF_k)^...^dF_{n-1}`` for every pair ``i < k``.

    Products are shared through a prefix/suffix scheme so each wedge is built
    from cached partial products.
    """
    cache: dict[tuple[int, ...], KForm] = {}

    def wedge_of(idx: tuple[int, ...]) -> KForm:
        if idx in cache:
            return cache[idx]
        if len(idx) == 1:
            out = dfs[idx[0]]
        else:
            out = wedge_of(idx[:-1]).wedge(dfs[idx[-1]])
        cache[idx] = out
        return out

    out = {}
    nv = dfs[0].nvars
    for i, k in combinations(range(n), 2):
        rest = tuple(j for j in range(n) if j not in (i, k))
        out[(i, k)] = wedge_of(rest) if rest else KForm.function(Poly.const(nv, 1))
    return out


def pullback_form(f: RationalMap, g: OneDimFoliation, *, strip_common_factor: bool = True,
                  seed: int = 0) -> TwoDimFoliation:
    """Pull-back of ``g`` by ``f`` from the explicit pair-sum formula.

    ``eta = sum_{i<k} (-1)^{i+k+1} (F_k P_i(F) - F_i P_k(F)) dF_{hat i, hat k}``
    """
    n = f.target_dim
    if g.ambient_vars != n:
        raise ValueError(f"foliation lives in {g.ambient_vars} variables but the map has {n} components")
    F = f.components
    m = f.nvars
    p_of_f = [compose(p, F) for p in g.field.components]
    dfs = [differential(Fi) for Fi in F]
    hatted = _hatted_wedges(dfs, n)
    eta = KForm.zero(m, n - 2)
    for (i, k), w in sorted(hatted.items()):
        coeff = F[k] * p_of_f[i] - F[i] * p_of_f[k]
        if coeff.is_zero():
            continue
        if (i + k + 1) % 2:
            coeff = -coeff
        eta = eta + w.scale(coeff)
    if eta.is_zero():
        raise DegenerateFoliationError("pull-back form vanishes identically")
    factor = None
    if strip_common_factor:
        eta, factor = strip_content(eta, seed=seed)
    cdeg = eta.coefficient_degree()
    degree = cdeg - 1 if isinstance(cdeg, int) else None
    return TwoDimFoliation(eta, degree, f, g, factor)


def pullback_by_substitution(f: RationalMap, omega: KForm) -> KForm:
    """Generic form pull-back: ``x_i -> F_i`` in coefficients, ``dx_i -> dF_i``."""
    F = f.components
    dfs = [differential(Fi) for Fi in F]
    out = KForm.zero(f.nvars, omega.degree)
    for idx, coeff in omega.components.items():
        w = KForm.function(compose(coeff, F))
        for j in idx:
            w = w.wedge(dfs[j])
        out = out + w
    return out


def strip_content(eta: KForm, *, seed: int = 0) -> tuple[KForm, Poly | None]:
    """Remove a common polynomial factor of all components, if there is one.

    Coprimality is decided by line restriction; the factor itself (rare,
    non-generic case) is computed with sympy's multivariate gcd.
    """
    comps = [p for p in eta.components.values()]
    if len(comps) < 2:
        return eta, None
    if coprimality_check(comps, num_lines=3, seed=seed).coprime:
        return eta, None
    import sympy

    n = eta.nvars
    syms = sympy.symbols(f"x0:{n}")

    def to_sym(p: Poly):
        return sympy.Poly.from_dict({e: sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else c
                                     for e, c in p.terms}, *syms)

    g = to_sym(comps[0])
    for p in comps[1:]:
        g = sympy.gcd(g, to_sym(p))
    if g.total_degree() == 0:
        return eta, None
    gpoly = Poly.from_terms(n, ((tuple(e), Fraction(int(c.p), int(c.q))) for e, c in g.terms()))
    stripped = {}
    for idx, p in eta.components.items():
        q, r = divisibility_remainder(p, gpoly)
        if not r.is_zero():
            raise ArithmeticError("gcd does not divide a component")
        stripped[idx] = q
    log.info("stripped common factor of degree %d from pull-back form", g.total_degree())
    return KForm(n, eta.degree, stripped), gpoly


# ----------------------------------------------------------------------
# checks
# ----------------------------------------------------------------------


def radial_contraction_check(eta: KForm) -> bool:
    if eta.degree == 0:
        return eta.is_zero()
    return interior_product(radial_field(eta.nvars), eta).is_zero()


def foliation_degree(eta: KForm) -> int:
    """Degree of the foliation: common coefficient degree minus one."""
    cdeg = eta.coefficient_degree()
    if cdeg == NOT_HOMOGENEOUS:
        raise PreconditionError("coefficients are not homogeneous of one degree")
    if cdeg == ANY_DEGREE:
        raise PreconditionError("zero form has no degree")
    if not radial_contraction_check(eta):
        raise PreconditionError("i_R eta is not zero")
    return cdeg - 1


def decomposability_check(eta: KForm) -> bool:
    """Whether ``eta`` is pointwise decomposable.

    For an (n-2)-form this is ``P^P = 0`` for the dual bivector ``P``; other
    degrees use the Pluecker relations ``(i_w eta) ^ eta = 0`` for all
    constant (k-1)-vectors ``w``.
    """
    k = eta.degree
    if k <= 1 or k >= eta.nvars - 1:
        return True
    if k == eta.nvars - 2:
        p = bivector_dual(eta)
        return p.wedge(p).is_zero()
    for w in basis_multivectors(eta.nvars, k - 1):
        if not contract_multivector(w, eta).wedge(eta).is_zero():
            return False
    return True


def integrability_check(eta: KForm, *, require_decomposable: bool = True) -> bool:
    """``(i_w eta) ^ d eta = 0`` for every constant (k-1)-vector ``w``.

    The criterion characterizes integrability only for locally decomposable
    forms; a non-decomposable input is reported as not integrable.
    """
    k = eta.degree
    if k < 1:
        raise PreconditionError("integrability needs a form of degree >= 1")
    if require_decomposable and k == eta.nvars - 2 and not decomposability_check(eta):
        log.warning("integrability_check: form is not decomposable (precondition violated)")
        return False
    deta = exterior_derivative(eta)
    if deta.is_zero():
        return True
    for w in basis_multivectors(eta.nvars, k - 1):
        one_form = contract_multivector(w, eta) if k > 1 else eta
        if not one_form.wedge(deta).is_zero():
            return False
    return True


def rotational_constant(omega: KForm, x: VectorField) -> Fraction | None:
    """``c`` with ``rotational(omega) = c X`` exactly, or ``None`` if not proportional."""
    z = rotational(omega)
    c = None
    for zi, xi in zip(z, x):
        if xi.is_zero():
            if not zi.is_zero():
                return None
            continue
        _, lc = xi.leading_term()
        e, _ = xi.leading_term()
        ratio = Fraction(zi.coeff(e)) / Fraction(lc)
        if c is None:
            c = ratio
        elif ratio != c:
            return None
        if zi != xi.scale(ratio):
            return None
    return c


def homogeneity_check(x: VectorField) -> bool:
    """``[R, X] = (d-1) X`` exactly."""
    d = x.degree()
    if not isinstance(d, int):
        return d == ANY_DEGREE
    return lie_bracket(radial_field(x.nvars), x) == x.scale(d - 1)


def _as_form(eta) -> KForm:
    return eta.form if isinstance(eta, TwoDimFoliation) else eta


def tangent_field(eta, h: Poly) -> MultiVector:
    """``W = i_{dH} P`` with ``P`` the multivector dual of ``eta``.

    For an (n-2)-form ``P`` is a bivector and ``W`` a vector field (returned
    as a degree-1 multivector).
    """
    form = _as_form(eta)
    p = form_to_multivector(form)
    return contract_covector(gradient(h), p)


def invariant_hypersurface_check(eta, h: Poly) -> bool:
    """Exact test that ``{H = 0}`` is invariant: every component of ``i_{dH} P`` is divisible by ``H``."""
    form = _as_form(eta)
    if h.is_zero():
        raise PreconditionError("H must be nonzero")
    if not isinstance(homogeneous_degree(h), int):
        raise PreconditionError("H must be homogeneous")
    if h.nvars != form.nvars:
        raise PreconditionError("H has the wrong variable count")
    if homogeneous_degree(h) == 0:
        raise PreconditionError("H must be non-constant")
    for comp in tangent_field(form, h).components.values():
        if comp.is_zero():
            continue
        if not divisibility_remainder(comp, h)[1].is_zero():
            return False
    return True


def sampled_tangency(eta, h: Poly, *, samples: int = 50, seed: int = 0, tol: float = 1e-8) -> bool:
    """Numeric oracle: ``eta ^ dH`` vanishes at random points of ``{H = 0}``.

    Points are obtained as roots of ``H`` along random complex lines.
    """
    from .numeric.evaluate import CompiledSystem

    form = _as_form(eta)
    tang = form.wedge(differential(h))
    if tang.is_zero():
        return True
    system = CompiledSystem(list(tang.components.values()))
    hsys = CompiledSystem([h])
    rng = np.random.default_rng(seed)
    n = form.nvars
    e = homogeneous_degree(h)
    found = 0
    while found < samples:
        a = rng.normal(size=n) + 1j * rng.normal(size=n)
        b = rng.normal(size=n) + 1j * rng.normal(size=n)
        ts = np.exp(2j * np.pi * np.arange(e + 1) / (e + 1))
        vals = hsys(a[None, :] + ts[:, None] * b[None, :])[:, 0]
        coeffs = np.linalg.solve(np.vander(ts, e + 1, increasing=True), vals)
        for s in np.roots(coeffs[::-1]):
            z = a + s * b
            z = z / np.abs(z).max()
            v = system(z)
            if np.abs(v).max() > tol * max(1.0, system.scale.max()):
                return False
            found += 1
    return True


@dataclass
class HypersurfaceScan:
    invariant: list[Poly]
    uncertified: list[list[complex]]
    max_degree: int
    seed: int
    note: str = (
        "bounded search: an empty result is evidence up to the scanned degree, not a proof "
        "that no invariant hypersurface exists"
    )

    def to_json(self) -> dict:
        return {
            "invariant": [p.to_json() for p in self.invariant],
            "uncertified_candidates": len(self.uncertified),
            "max_degree": self.max_degree,
            "seed": self.seed,
            "note": self.note,
        }


def _rationalize(v: complex, max_den: int = 1000, tol: float = 1e-7):
    if abs(v.imag) > tol * max(1.0, abs(v)):
        return None
    q = Fraction(v.real).limit_denominator(max_den)
    if abs(float(q) - v.real) > tol * max(1.0, abs(v.real)):
        return None
    return q


def bounded_invariant_hypersurface_scan(eta, max_degree: int = 1, *, seed: int = 0,
                                        starts_per_pivot: int = 6, samples: int = 10,
                                        max_iter: int = 40) -> HypersurfaceScan:
    """Search for invariant hypersurfaces of degree <= ``max_degree``.

    For each degree and each candidate leading monomial (coefficient fixed
    to 1) the condition "``i_{dH} P`` vanishes on ``{H = 0}``" is imposed at
    sampled points of ``{H = 0}`` and solved by Gauss-Newton in the remaining
    coefficients of ``H``.  Converged candidates are rationalized and then
    certified with the exact divisibility test; only certified ones are
    returned.
    """
    from .numeric.evaluate import CompiledSystem

    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    form = _as_form(eta)
    n = form.nvars
    p = form_to_multivector(form)
    pairs = sorted(p.components)
    psys = CompiledSystem([p[idx] for idx in pairs])
    out_index = {idx: i for i, idx in enumerate(combinations(range(n), p.degree - 1))}
    pscale = max(float(psys.scale.max()), 1.0)
    rng = np.random.default_rng(seed)
    lines_a = rng.normal(size=(samples, n)) + 1j * rng.normal(size=(samples, n))
    lines_b = rng.normal(size=(samples, n)) + 1j * rng.normal(size=(samples, n))

    certified: list[Poly] = []
    uncertified: list[list[complex]] = []
    for e in range(1, max_degree + 1):
        monos = monomials_of_degree(n, e)
        expo = np.array(monos)
        grad_expo = []
        for i in range(n):
            ge = expo.copy()
            ge[:, i] -= 1
            grad_expo.append((expo[:, i], np.maximum(ge, 0)))

        def h_eval(coef, z):
            return (np.prod(z[:, None, :] ** expo[None], axis=2)) @ coef

        def h_grad(coef, z):
            out = np.empty(z.shape, dtype=complex)
            for i, (mult, ge) in enumerate(grad_expo):
                out[:, i] = (np.prod(z[:, None, :] ** ge[None], axis=2) * mult[None]) @ coef
            return out

        ts = np.exp(2j * np.pi * np.arange(e + 1) / (e + 1))
        vand = np.vander(ts, e + 1, increasing=True)

        def sample_points(coef):
            pts = []
            for a, b in zip(lines_a, lines_b):
                vals = h_eval(coef, a[None, :] + ts[:, None] * b[None, :])
                c = np.linalg.solve(vand, vals)
                if abs(c[-1]) < 1e-12:
                    continue
                for s in sorted(np.roots(c[::-1]), key=lambda s: (round(s.real, 6), round(s.imag, 6))):
                    pts.append(a + s * b)
            return np.array(pts)

        def residual(coef):
            z = sample_points(coef)
            if len(z) == 0:
                return np.full(samples * e * len(out_index), 1e3, dtype=complex)
            z = z / np.abs(z).max(axis=1, keepdims=True)
            pv = psys(z)
            dh = h_grad(coef, z)
            w = np.zeros((z.shape[0], len(out_index)), dtype=complex)
            for col, idx in enumerate(pairs):
                # i_{dH} d_I = sum_s (-1)^s dH_{I_s} d_{I minus I_s}
                for s_, a_i in enumerate(idx):
                    rest = out_index[idx[:s_] + idx[s_ + 1 :]]
                    sign = -1.0 if s_ % 2 else 1.0
                    w[:, rest] += sign * dh[:, a_i] * pv[:, col]
            return w.ravel() / (pscale * max(1.0, np.linalg.norm(coef)))

        found: list[np.ndarray] = []
        for piv in range(len(monos)):
            free = [j for j in range(len(monos)) if j != piv]
            starts = [np.zeros(len(free), dtype=complex)]
            for _ in range(starts_per_pivot - 1):
                starts.append(0.7 * (rng.normal(size=len(free)) + 1j * rng.normal(size=len(free))))
            for u in starts:
                coef = np.zeros(len(monos), dtype=complex)
                coef[piv] = 1.0
                ok = False
                for _ in range(max_iter):
                    coef[free] = u
                    r0 = residual(coef)
                    if np.linalg.norm(r0) < 1e-12:
                        ok = True
                        break
                    jac = np.empty((r0.size, len(free)), dtype=complex)
                    eps = 1e-7
                    for c, j in enumerate(free):
                        c2 = coef.copy()
                        c2[j] += eps
                        r1 = residual(c2)
                        if r1.shape != r0.shape:
                            break
                        jac[:, c] = (r1 - r0) / eps
                    else:
                        c = None
                    if c is not None:
                        break
                    step = np.linalg.lstsq(jac, -r0, rcond=None)[0]
                    u = u + step
                    if not np.isfinite(u).all() or np.abs(u).max() > 1e4:
                        break
                    if np.linalg.norm(step) < 1e-13 * (1 + np.linalg.norm(u)):
                        coef[free] = u
                        ok = np.linalg.norm(residual(coef)) < 1e-9
                        break
                if ok:
                    coef[free] = u
                    cand = coef / coef[np.argmax(np.abs(coef))]
                    if not any(np.allclose(cand, q, atol=1e-6) for q in found):
                        found.append(cand)

        for cand in found:
            rat = [_rationalize(v) for v in cand]
            if any(r is None for r in rat):
                uncertified.append(list(cand))
                continue
            h = Poly.from_terms(n, zip(monos, rat))
            if h.is_zero():
                continue
            if any(_proportional(h, g) for g in certified):
                continue
            if invariant_hypersurface_check(form, h):
                certified.append(h)
            else:
                uncertified.append(list(cand))
    return HypersurfaceScan(certified, uncertified, max_degree, seed)


def _proportional(a: Poly, b: Poly) -> bool:
    if a.nvars != b.nvars or len(a) != len(b):
        return False
    (ea, ca), (eb, cb) = a.leading_term(), b.leading_term()
    if ea != eb:
        return False
    return a.scale(Fraction(cb) / Fraction(ca)) == b


# ----------------------------------------------------------------------
# built-in families
# ----------------------------------------------------------------------


STANDARD_WEIGHTS = (1, 2, 3, 4)


def diagonal_difference_map(n: int, nu: int, weights: Sequence[int] | None = None) -> RationalMap:
    """``F_i = a_i (z_i^nu - z_n^nu)`` for ``i < n``, a map P^n -> P^{n-1}."""
    if n < 2 or nu < 1:
        raise ValueError("need n >= 2 and nu >= 1")
    w = [1] * n if weights is None else list(weights)
    if len(w) != n or any(Fraction(a) == 0 for a in w):
        raise ValueError("need n nonzero weights")
    m = n + 1
    last = Poly.var(m, n) ** nu
    return RationalMap.from_polys([(Poly.var(m, i) ** nu - last).scale(a) for i, a in enumerate(w)])


def power_map(n: int, nu: int) -> RationalMap:
    """``F_i = z_i^nu``: a degenerate map with one non-reduced indeterminacy point."""
    m = n + 1
    return RationalMap.from_polys([Poly.var(m, i) ** nu for i in range(n)])


def linear_projection_map(n: int) -> RationalMap:
    """``F_i = z_i``, the projection from ``[0:...:0:1]``."""
    return RationalMap.from_polys([Poly.var(n + 1, i) for i in range(n)])


def diagonal_field(coeffs: Sequence) -> VectorField:
    """``sum c_i x_i d_i``."""
    n = len(coeffs)
    return VectorField([Poly.var(n, i).scale(c) for i, c in enumerate(coeffs)])


def standard_pair() -> tuple[RationalMap, OneDimFoliation]:
    """The weighted diagonal-difference map (nu=2, n=4) and the degree-2 Jouanolou foliation on P^3.

    Unit weights are avoided: with them ``[0:0:0:0:1]`` is a critical point
    mapping onto the singularity ``[1:1:1:1]``.
    """
    from .graded import jouanolou_field

    return diagonal_difference_map(4, 2, STANDARD_WEIGHTS), omega_from_field(jouanolou_field(4, 2))
