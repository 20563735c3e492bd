"""Singularities of foliations by curves on P^{n-1}, computed chart by chart."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
import numpy as np

from ..exterior import VectorField
from ..errors import PreconditionError
from ..foliation import OneDimFoliation
from ..ring import Poly, dehomogenize
from .evaluate import (
    CompiledSystem,
    dedupe_affine,
    dedupe_projective,
    newton_batch,
    projective_normalize,
    random_polydisc,
)
from .solvers import _as_univariate_in, durand_kerner, resultant, univariate_roots


@dataclass
class SolverConfig:
    seed: int = 0
    starts_per_point: int = 200
    radius: float = 2.0
    dedupe_radius: float = 1e-6
    residual_tol: float = 1e-10
    hyperbolic_tol: float = 1e-9
    max_iter: int = 80

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class ChartField:
    chart: int
    field: VectorField  # affine field in n-1 variables
    ambient: int

    def embed(self, coords) -> np.ndarray:
        """Homogeneous coordinates of an affine chart point."""
        c = list(coords)
        return np.array(c[: self.chart] + [1.0] + c[self.chart :], dtype=complex)

    def affine(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        z = z / z[self.chart]
        return np.delete(z, self.chart)


@dataclass
class SingularPointRecord:
    chart: int
    coordinates: list[complex]
    point: list[complex]
    residual: float
    eigenvalues: list[complex] | None = None
    ratios: list[complex] | None = None
    classification: str = "unclassified"
    type_tag: tuple | None = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        cj = lambda v: [v.real, v.imag]
        return {
            "chart": self.chart,
            "coordinates": [cj(complex(v)) for v in self.coordinates],
            "point": [cj(complex(v)) for v in self.point],
            "residual": self.residual,
            "eigenvalues": None if self.eigenvalues is None else [cj(complex(v)) for v in self.eigenvalues],
            "ratios": None if self.ratios is None else [cj(complex(v)) for v in self.ratios],
            "classification": self.classification,
            "type_tag": self.type_tag,
            "details": self.details,
        }


def expected_singularity_count(n: int, d: int) -> int:
    """``(d^n - 1)/(d - 1)`` singularities of a generic degree-d foliation on P^{n-1}."""
    return sum(d**i for i in range(n))


def chart_field(g: OneDimFoliation | VectorField, j: int) -> ChartField:
    """Affine field ``(P_i - x_i P_j)|_{x_j = 1}``, ``i != j``."""
    x = g.field if isinstance(g, OneDimFoliation) else g
    n = x.nvars
    if not 0 <= j < n:
        raise IndexError("chart index out of range")
    comps = []
    xj = x[j]
    for i in range(n):
        if i == j:
            continue
        comps.append(dehomogenize(x[i] - Poly.var(n, i) * xj, j))
    return ChartField(j, VectorField(comps), n)


def _records_from_affine(cf: ChartField, pts, system: CompiledSystem) -> list[SingularPointRecord]:
    out = []
    for p in pts:
        res = float(np.abs(system(p) / np.maximum(system.scale, 1e-300)).max())
        out.append(SingularPointRecord(cf.chart, list(p), list(projective_normalize(cf.embed(p))), res))
    return out


def _solve_plane_chart(cf: ChartField, cfg: SolverConfig) -> list[np.ndarray]:
    """Exact resultant elimination in a 2-variable chart, roots numerically."""
    p, q = cf.field.components
    system = CompiledSystem([p, q])
    if p.is_zero() or q.is_zero():
        return []
    r = resultant(p, q, eliminate=1)
    if r.is_zero():
        return []
    us = univariate_roots(r)
    pts = []
    for u in us:
        cands = []
        for poly in (p, q):
            coeffs = _as_univariate_in(poly, 1)
            cv = [complex(c(u)) if not c.is_zero() else 0j for c in coeffs]
            while cv and abs(cv[-1]) < 1e-12 * (1 + max(abs(v) for v in cv)):
                cv.pop()
            if len(cv) >= 2:
                cands.extend(durand_kerner(cv))
            if cands:
                break
        for v in cands:
            pts.append(np.array([u, v]))
    if not pts:
        return []
    refined, res, ok = newton_batch(system, np.array(pts), max_iter=cfg.max_iter)
    good = [x for x, r_, k in zip(refined, res, ok) if k and r_ < cfg.residual_tol * 10]
    return dedupe_affine(good, cfg.dedupe_radius)


def _solve_chart_newton(cf: ChartField, cfg: SolverConfig, count: int, rng) -> list[np.ndarray]:
    system = CompiledSystem(list(cf.field.components))
    starts = random_polydisc(rng, count, cf.ambient - 1, cfg.radius)
    pts, res, ok = newton_batch(system, starts, max_iter=cfg.max_iter)
    good = [p for p, r, k in zip(pts, res, ok) if k and r < cfg.residual_tol and np.abs(p).max() <= 1.0 + 1e-9]
    return dedupe_affine(good, cfg.dedupe_radius)


@dataclass
class SingularityReport:
    points: list[SingularPointRecord]
    expected: int
    found: int
    seed: int
    method: str
    tolerances: dict

    def to_json(self) -> dict:
        return {
            "points": [p.to_json() for p in self.points],
            "expected": self.expected,
            "found": self.found,
            "seed": self.seed,
            "method": self.method,
            "tolerances": self.tolerances,
        }


def solve_singularities(g: OneDimFoliation, config: SolverConfig | None = None,
                        method: str = "auto") -> SingularityReport:
    """All singular points of ``g`` on P^{n-1}, merged across charts.

    ``method``: ``"resultant"`` (only for P^2), ``"newton"``, or ``"auto"``.
    Each point is stored in the chart of its largest coordinate.
    """
    cfg = config or SolverConfig()
    n = g.ambient_vars
    d = g.degree
    expected = expected_singularity_count(n, d)
    if method == "auto":
        method = "resultant" if n == 3 else "newton"
    if method == "resultant" and n != 3:
        raise ValueError("resultant route is only available on P^2")
    rng = np.random.default_rng(cfg.seed)
    homog: list[np.ndarray] = []
    for j in range(n):
        cf = chart_field(g, j)
        if all(c.is_zero() for c in cf.field):
            raise PreconditionError("degenerate foliation: chart field vanishes identically")
        if method == "resultant":
            pts = _solve_plane_chart(cf, cfg)
        else:
            pts = _solve_chart_newton(cf, cfg, cfg.starts_per_point * expected, rng)
        homog.extend(cf.embed(p) for p in pts)
    merged = dedupe_projective(homog, cfg.dedupe_radius)
    records = []
    for z in merged:
        j = int(np.argmax(np.abs(z)))
        cf = chart_field(g, j)
        system = CompiledSystem(list(cf.field.components))
        aff = cf.affine(z)
        refined, _, _ = newton_batch(system, aff[None, :], max_iter=10)
        records.extend(_records_from_affine(cf, [refined[0]], system))
    records.sort(key=lambda r: tuple(np.round(np.concatenate([np.real(r.point), np.imag(r.point)]), 8)))
    return SingularityReport(records, expected, len(records), cfg.seed, method,
                             {"residual": cfg.residual_tol, "dedupe_radius": cfg.dedupe_radius})


def classify_hyperbolic(rec: SingularPointRecord, cf: ChartField | OneDimFoliation,
                        tol: float = 1e-9, residual_tol: float = 1e-8) -> SingularPointRecord:
    """Eigenvalues of the chart linearization and the non-real-ratio test."""
    if isinstance(cf, OneDimFoliation):
        cf = chart_field(cf, rec.chart)
    if rec.residual > residual_tol:
        raise PreconditionError(f"residual {rec.residual:.3e} above tolerance {residual_tol:.1e}")
    system = CompiledSystem(list(cf.field.components))
    coords = cf.affine(np.asarray(rec.point)) if cf.chart != rec.chart else np.asarray(rec.coordinates)
    jac = system.jacobian(coords)
    vals, vecs = np.linalg.eig(jac)
    rec.eigenvalues = list(vals)
    scale = max(np.abs(vals).max(), 1e-300)
    cond = np.linalg.cond(vecs) if vals.size else 1.0
    ratios = []
    for a in range(len(vals)):
        for b in range(len(vals)):
            if a != b and abs(vals[b]) > 1e-12 * scale:
                ratios.append(vals[a] / vals[b])
    rec.ratios = ratios
    if not np.isfinite(cond) or cond > 1e10:
        rec.classification = "unresolved"
        rec.details["note"] = "defective linearization within tolerance"
        return rec
    if np.any(np.abs(vals) <= 1e-10 * max(scale, 1.0)):
        rec.classification = "non-hyperbolic"
        rec.details["note"] = "zero eigenvalue"
        return rec
    hyper = all(abs(r.imag) > tol * abs(r) for r in ratios)
    rec.classification = "hyperbolic" if hyper else "non-hyperbolic"
    return rec


def ratio_set(rec: SingularPointRecord) -> list[complex]:
    return sorted(rec.ratios or [], key=lambda z: (round(z.real, 9), round(z.imag, 9)))


def isolated_zero_at_origin(x: VectorField, *, seed: int = 0, starts: int = 400) -> bool:
    """Numeric evidence that a (quasi-)homogeneous field vanishes only at 0.

    Searches for zeros on a random affine hyperplane ``a.x = 1`` (which meets
    every orbit of a nonzero zero of a quasi-homogeneous field); none found
    means the zero at the origin is isolated.
    """
    n = x.nvars
    if x.is_zero():
        return False
    polys = [p for p in x if not p.is_zero()]
    if len(polys) < n:
        # fewer equations than variables: the zero set is positive-dimensional
        return False
    rng = np.random.default_rng(seed)
    system = CompiledSystem(polys)
    a = rng.normal(size=(1, n)) + 1j * rng.normal(size=(1, n))
    pts0 = random_polydisc(rng, starts, n, 1.5)
    pts, res, ok = newton_batch(system, pts0, extra_rows=(a, np.ones(1)), max_iter=100)
    return not bool(np.any(res < 1e-9))
