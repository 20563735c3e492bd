"""Indeterminacy loci, genericity of rational maps, and generic pairs."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from ..foliation import OneDimFoliation, RationalMap
from ..ring import Poly, dehomogenize, monomials_of_degree
from .evaluate import (
    CompiledSystem,
    dedupe_affine,
    dedupe_projective,
    newton_batch,
    projective_distance,
    projective_normalize,
    random_polydisc,
)
from .singular import SolverConfig, solve_singularities

log = logging.getLogger(__name__)


def _cjson(z) -> list[list[float]]:
    return [[complex(v).real, complex(v).imag] for v in z]


@dataclass
class IndeterminacySet:
    points: list[np.ndarray]
    expected: int
    transversal: list[bool]
    reduced: list[bool]
    method: str
    seed: int
    failed_starts: int = 0
    exact_points: list[tuple] | None = None

    @property
    def found(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        return {
            "points": [_cjson(p) for p in self.points],
            "expected": self.expected,
            "found": self.found,
            "transversal": self.transversal,
            "reduced": self.reduced,
            "method": self.method,
            "seed": self.seed,
            "failed_starts": self.failed_starts,
        }


def _diagonal_difference_shape(f: RationalMap):
    """Recognize ``F_i = a_i z_{s(i)}^nu - a_i z_m^nu`` with distinct ``s(i) != m``."""
    nu = f.degree
    m_common = None
    targets = []
    for comp in f.components:
        terms = comp.terms
        if len(terms) != 2:
            return None
        (e1, c1), (e2, c2) = terms
        if c1 != -c2:
            return None
        idx = []
        for e in (e1, e2):
            nz = [j for j, v in enumerate(e) if v]
            if len(nz) != 1 or e[nz[0]] != nu:
                return None
            idx.append(nz[0])
        pos = idx[0] if c1 > 0 else idx[1]
        neg = idx[1] if c1 > 0 else idx[0]
        if m_common is None:
            m_common = neg
        if neg != m_common:
            return None
        targets.append(pos)
    if len(set(targets)) != len(targets) or m_common in targets:
        return None
    return targets, m_common


def _jacobian_rank_flags(system: CompiledSystem, pts, tol: float) -> tuple[list[bool], list[float]]:
    flags, ratios = [], []
    n = system.size
    for p in pts:
        z = projective_normalize(p)
        s = np.linalg.svd(system.jacobian(z), compute_uv=False)
        # relative to the coefficient scale so that a vanishing Jacobian is not rescued
        denom = max(float(s[0]), float(system.scale.max()))
        ratio = float(s[n - 1] / denom) if denom > 0 else 0.0
        flags.append(ratio > tol)
        ratios.append(ratio)
    return flags, ratios


def indeterminacy_locus(f: RationalMap, config: SolverConfig | None = None, *,
                        method: str = "auto", rank_tol: float = 1e-8) -> IndeterminacySet:
    """Common zeros of ``F_0, ..., F_{n-1}`` on P^n.

    ``method="auto"`` enumerates recognized diagonal-difference maps exactly
    (products of roots of unity) and otherwise runs multistart Newton in every
    affine chart.
    """
    cfg = config or SolverConfig()
    n = f.target_dim
    m = f.nvars
    nu = f.degree
    expected = nu**n
    system = CompiledSystem(list(f.components))
    shape = _diagonal_difference_shape(f) if method in ("auto", "exact") else None
    if method == "exact" and shape is None:
        raise ValueError("map is not of diagonal-difference shape")
    if shape is not None:
        targets, last = shape
        roots = np.exp(2j * np.pi * np.arange(nu) / nu)
        pts, exact = [], []
        for ks in product(range(nu), repeat=n):
            z = np.ones(m, dtype=complex)
            for t, k in zip(targets, ks):
                z[t] = roots[k]
            pts.append(projective_normalize(z))
            exact.append(ks)
        flags, _ = _jacobian_rank_flags(system, pts, rank_tol)
        return IndeterminacySet(pts, expected, flags, flags, "exact", cfg.seed, 0, exact)

    rng = np.random.default_rng(cfg.seed)
    homog = []
    failed = 0
    for c in range(m):
        chart_polys = [dehomogenize(p, c) for p in f.components]
        csys = CompiledSystem(chart_polys)
        starts = random_polydisc(rng, cfg.starts_per_point * expected, m - 1, cfg.radius)
        pts, res, ok = newton_batch(csys, starts, max_iter=max(cfg.max_iter, 120))
        failed += int((~ok).sum())
        good = [p for p, r, k in zip(pts, res, ok) if k and r < cfg.residual_tol and np.abs(p).max() <= 1 + 1e-9]
        for p in dedupe_affine(good, cfg.dedupe_radius):
            homog.append(np.insert(p, c, 1.0))
    merged = dedupe_projective(homog, max(cfg.dedupe_radius, 1e-5))
    merged.sort(key=lambda z: tuple(np.round(np.concatenate([z.real, z.imag]), 8)))
    flags, _ = _jacobian_rank_flags(system, merged, rank_tol)
    if len(merged) < expected:
        log.warning("indeterminacy locus: found %d of %d points (%d failed starts)", len(merged), expected, failed)
    return IndeterminacySet(merged, expected, flags, flags, "newton", cfg.seed, failed)


@dataclass
class GenericityVerdict:
    generic: bool
    count_ok: bool
    flags: list[bool]
    tol: float

    def __bool__(self) -> bool:
        return self.generic

    def to_json(self) -> dict:
        return {"generic": self.generic, "count_ok": self.count_ok, "transversal": self.flags, "tol": self.tol}


def genericity_check(f: RationalMap, locus: IndeterminacySet | None = None, tol: float = 1e-8) -> GenericityVerdict:
    """Full-rank Jacobian at every indeterminacy point and exactly ``nu^n`` points."""
    locus = locus or indeterminacy_locus(f)
    system = CompiledSystem(list(f.components))
    flags, _ = _jacobian_rank_flags(system, locus.points, tol)
    count_ok = locus.found == locus.expected
    return GenericityVerdict(bool(count_ok and all(flags)), count_ok, flags, tol)


# ----------------------------------------------------------------------
# fibers and critical values
# ----------------------------------------------------------------------


def _fiber_system(f: RationalMap, q: np.ndarray):
    """Cross-product equations ``F_i q_j0 - F_j0 q_i`` (i != j0) as a float system."""
    q = projective_normalize(q)
    j0 = int(np.argmax(np.abs(q)))
    base = CompiledSystem(list(f.components))

    def evaluate(z):
        v = base(z)
        return np.delete(v * q[j0] - v[..., [j0]] * q, j0, axis=-1)

    def jacobian(z):
        jac = base.jacobian(z)
        out = jac * q[j0] - jac[..., [j0], :] * q[:, None]
        return np.delete(out, j0, axis=-2)

    return evaluate, jacobian, base


def _gauss_newton(fun, jac, x0: np.ndarray, max_iter: int = 100, tol: float = 1e-14):
    """Batched Gauss-Newton; starts leave the active set once their step is tiny."""
    x = np.array(x0, dtype=complex, copy=True)
    active = np.ones(x.shape[0], dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        xa = x[active]
        step = np.einsum("kij,kj->ki", np.linalg.pinv(jac(xa)), fun(xa))
        step = np.nan_to_num(step, nan=0.0, posinf=0.0, neginf=0.0)
        xa = xa - step
        big = ~np.isfinite(xa).all(axis=1) | (np.abs(xa).max(axis=1) > 1e8)
        xa[big] = np.nan
        x[active] = xa
        done = big | (np.linalg.norm(step, axis=1) <= tol * (1 + np.linalg.norm(np.nan_to_num(xa), axis=1)))
        active[np.flatnonzero(active)[done]] = False
    with np.errstate(invalid="ignore", over="ignore"):
        res = np.abs(fun(np.nan_to_num(x))).max(axis=1)
    res = np.where(np.isfinite(x).all(axis=1), res, np.inf)
    return x, res


def fiber_points(f: RationalMap, q, *, slices: int = 2, seed: int = 0, starts: int | None = None,
                 normalizations: int = 3, max_iter: int = 100) -> tuple[list[np.ndarray], list[int]]:
    """Points of ``f^{-1}(q)`` on random hyperplane slices, off ``I(f)``.

    The fiber closure is a curve of degree ``nu^{n-1}``; each slice
    ``a.z = 0`` cuts it in that many points.  Each slice is solved under
    several random normalizations ``b.z = 1`` so that no point is only
    reachable at large affine coordinates.  Returns the points and the
    per-slice counts.
    """
    q = np.asarray(q, dtype=complex)
    n = f.target_dim
    m = f.nvars
    per_slice = f.degree ** (n - 1)
    starts = starts or 100 * per_slice
    rng = np.random.default_rng(seed)
    fe, fj, base = _fiber_system(f, q)
    scale = max(float(base.scale.max()), 1.0)
    out, counts = [], []
    for _ in range(slices):
        a = rng.normal(size=m) + 1j * rng.normal(size=m)
        found = []
        for _ in range(normalizations):
            b = rng.normal(size=m) + 1j * rng.normal(size=m)

            def fun(z, b=b):
                return np.concatenate([fe(z) / scale, (z @ a)[:, None], (z @ b - 1)[:, None]], axis=1)

            def jac(z, b=b):
                extra = np.broadcast_to(np.stack([a, b]), (z.shape[0], 2, m))
                return np.concatenate([fj(z) / scale, extra], axis=1)

            x0 = random_polydisc(rng, starts, m, 2.0)
            x, res = _gauss_newton(fun, jac, x0, max_iter=max_iter)
            found.extend(p for p, r in zip(x, res) if r < 1e-11)
            if len(dedupe_projective(found, 1e-6)) >= per_slice:
                break
        found = [p for p in found if np.abs(base(projective_normalize(p))).max() > 1e-6 * scale]
        pts = dedupe_projective(found, 1e-6)
        counts.append(len(pts))
        out.extend(pts)
    return out, counts


def critical_point_search(f: RationalMap, q, *, seed: int = 0, starts: int = 400,
                          max_iter: int = 150, tol: float = 1e-10) -> list[np.ndarray]:
    """Points ``p`` with ``F(p) = lambda q`` and ``rank DF(p) < n``.

    Gauss-Newton on ``F(p) - lambda q = 0``, ``DF(p)^T mu = 0`` with random
    normalizations of ``p`` and ``mu``; the system is overdetermined by one,
    so solutions exist only when ``q`` is a critical value.
    """
    q = projective_normalize(np.asarray(q, dtype=complex))
    n = f.target_dim
    m = f.nvars
    base = CompiledSystem(list(f.components))
    hess_sys = base.jacobian_system
    rng = np.random.default_rng(seed)
    b = rng.normal(size=m) + 1j * rng.normal(size=m)
    c = rng.normal(size=n) + 1j * rng.normal(size=n)
    scale = max(float(base.scale.max()), 1.0)

    def split(x):
        return x[:, :m], x[:, m], x[:, m + 1 :]

    def fun(x):
        p, lam, mu = split(x)
        fv = base(p) / scale - lam[:, None] * q
        dft = np.einsum("kij,ki->kj", base.jacobian(p), mu) / scale
        return np.concatenate([fv, dft, (p @ b - 1)[:, None], (mu @ c - 1)[:, None]], axis=1)

    def jac(x):
        p, lam, mu = split(x)
        k = x.shape[0]
        jf = base.jacobian(p) / scale
        hess = hess_sys.jacobian(p).reshape(k, n, m, m) / scale
        rows = 2 * n + 3
        out = np.zeros((k, rows, m + 1 + n), dtype=complex)
        out[:, :n, :m] = jf
        out[:, :n, m] = -q
        out[:, n : n + m, :m] = np.einsum("kiab,ki->kba", hess, mu)
        out[:, n : n + m, m + 1 :] = np.transpose(jf, (0, 2, 1))
        out[:, n + m, :m] = b
        out[:, n + m + 1, m + 1 :] = c
        return out

    x0 = np.concatenate(
        [random_polydisc(rng, starts, m, 1.5), random_polydisc(rng, starts, 1, 1.5), random_polydisc(rng, starts, n, 1.5)],
        axis=1,
    )
    x, res = _gauss_newton(fun, jac, x0, max_iter=max_iter)
    hits = [projective_normalize(p[:m]) for p, r in zip(x, res) if r < tol]
    return dedupe_projective(hits, 1e-6)


@dataclass
class GenericPairVerdict:
    verdict: str  # "generic pair" | "not generic" | "inconclusive"
    map_generic: bool
    singularities: int
    fiber_counts: list[list[int]]
    min_rank_ratio: float
    critical_points: list[dict] = field(default_factory=list)
    seed: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "generic pair"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "map_generic": self.map_generic,
            "singularities": self.singularities,
            "fiber_counts": self.fiber_counts,
            "min_rank_ratio": self.min_rank_ratio,
            "critical_points": self.critical_points,
            "seed": self.seed,
            "notes": self.notes,
        }


def generic_pair_check(f: RationalMap, g: OneDimFoliation, config: SolverConfig | None = None, *,
                       rank_tol: float = 1e-8, slices: int = 2, critical_starts: int = 400,
                       singular_points=None) -> GenericPairVerdict:
    """``Sing(G)`` avoids the critical values of ``f``.

    For each singularity ``q`` of ``G``: fiber points are sampled on random
    slices and the Jacobian rank is checked there, and a direct search for
    critical points of ``f`` over ``q`` is run.
    """
    cfg = config or SolverConfig()
    gen = genericity_check(f, indeterminacy_locus(f, cfg))
    if singular_points is None:
        singular_points = [np.asarray(r.point) for r in solve_singularities(g, cfg).points]
    base = CompiledSystem(list(f.components))
    n = f.target_dim
    expected_slice = f.degree ** (n - 1)
    counts, crit, notes = [], [], []
    min_ratio = np.inf
    inconclusive = False
    for idx, q in enumerate(singular_points):
        pts, cts = fiber_points(f, q, slices=slices, seed=cfg.seed + idx)
        counts.append(cts)
        if any(c < expected_slice for c in cts):
            inconclusive = True
            notes.append(f"singularity {idx}: fiber slice count {cts} below {expected_slice}")
        for p in pts:
            s = np.linalg.svd(base.jacobian(projective_normalize(p)), compute_uv=False)
            min_ratio = min(min_ratio, float(s[n - 1] / s[0]))
        for p in critical_point_search(f, q, seed=cfg.seed + idx, starts=critical_starts):
            crit.append({"singularity": idx, "q": _cjson(projective_normalize(q)), "p": _cjson(p)})
    if not np.isfinite(min_ratio):
        min_ratio = 0.0
    if not gen.generic:
        verdict = "not generic"
        notes.append("map fails genericity at its indeterminacy locus")
    elif crit or min_ratio <= rank_tol:
        verdict = "not generic"
    elif inconclusive:
        verdict = "inconclusive"
    else:
        verdict = "generic pair"
    return GenericPairVerdict(verdict, gen.generic, len(singular_points), counts, min_ratio, crit, cfg.seed, notes)


def random_map_perturbation(f: RationalMap, rng: np.random.Generator, coeff_range: int = 2) -> list[Poly]:
    """Random integer-coefficient homogeneous polynomials of the map's degree."""
    monos = monomials_of_degree(f.nvars, f.degree)
    out = []
    for _ in range(f.target_dim):
        coeffs = rng.integers(-coeff_range, coeff_range + 1, size=len(monos))
        out.append(Poly.from_terms(f.nvars, ((e, int(c)) for e, c in zip(monos, coeffs) if c)))
    return out


def perturbed_map(f: RationalMap, g: list[Poly], t) -> RationalMap:
    """``f + t g``, stored as ``q f + p g`` for ``t = p/q`` (the same projective map)."""
    t = Fraction(t)
    return RationalMap.from_polys(
        [a.scale(t.denominator) + b.scale(t.numerator) for a, b in zip(f.components, g)], check_coprime=False
    )
