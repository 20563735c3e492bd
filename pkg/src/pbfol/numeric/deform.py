"""Continuation of n.g.k singularities along a deformation of a pull-back."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..errors import PreconditionError
from ..exterior import VectorField
from ..foliation import TwoDimFoliation, omega_from_field, pullback_form
from ..ring import Poly
from .evaluate import newton_batch, projective_distance
from .local import DEFAULT_TOL, chart_rotational, isolation_probe, nilpotency_residual
from .maps import indeterminacy_locus, perturbed_map

log = logging.getLogger(__name__)


@dataclass
class DeformationPath:
    index: int
    chart: int
    points: dict[str, np.ndarray] = field(default_factory=dict)
    residuals: dict[str, float] = field(default_factory=dict)
    nilpotency: dict[str, float] = field(default_factory=dict)
    unique: dict[str, bool | None] = field(default_factory=dict)
    status: str = "stable"  # "stable" | "lost" | "type change"
    lipschitz: float = 0.0
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "chart": self.chart,
            "status": self.status,
            "lipschitz_estimate": self.lipschitz,
            "by_t": {
                t: {
                    "point": [[complex(v).real, complex(v).imag] for v in p],
                    "residual": self.residuals[t],
                    "nilpotency_residual": self.nilpotency.get(t),
                    "unique_in_ball": self.unique.get(t),
                }
                for t, p in self.points.items()
            },
            "notes": self.notes,
        }


@dataclass
class DeformationReport:
    paths: list[DeformationPath]
    t_grid: list[str]
    seed: int
    tolerances: dict
    endpoint_error: float | None = None

    @property
    def lost(self) -> int:
        return sum(p.status == "lost" for p in self.paths)

    @property
    def type_changes(self) -> int:
        return sum(p.status == "type change" for p in self.paths)

    def to_json(self) -> dict:
        return {
            "paths": [p.to_json() for p in self.paths],
            "t_grid": self.t_grid,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "stable": sum(p.status == "stable" for p in self.paths),
            "lost": self.lost,
            "type_changes": self.type_changes,
            "endpoint_error": self.endpoint_error,
        }


def _key(t: Fraction) -> str:
    return str(t)


def deformed_foliation(f0: TwoDimFoliation, t: Fraction, map_perturbation: Sequence[Poly] | None,
                       field_perturbation: VectorField | None) -> TwoDimFoliation:
    fmap = f0.map
    if map_perturbation is not None and t:
        fmap = perturbed_map(fmap, list(map_perturbation), t)
    base = f0.base
    if field_perturbation is not None and t:
        base = omega_from_field(base.field + field_perturbation.scale(t))
    return pullback_form(fmap, base)


def track_deformation(f0: TwoDimFoliation, t_grid: Sequence, *, map_perturbation: Sequence[Poly] | None = None,
                      field_perturbation: VectorField | None = None, points=None, tol: float = DEFAULT_TOL,
                      jump_tol: float = 0.25, check_uniqueness: bool = True, seed: int = 0,
                      endpoint_check: bool = False) -> DeformationReport:
    """Newton-continue the n.g.k points of ``f0`` along ``f + t g`` or ``X + t Y``.

    Each step runs Gauss-Newton on the deflated system ``Z_t = 0``,
    ``DZ_t = 0`` (the points are degenerate zeros of ``Z_t``), starting from
    the previous point.  A path is lost when Newton fails or the point
    jumps by more than ``jump_tol`` in chordal distance; it changes type when
    ``DZ_t`` stops being nilpotent.
    """
    if not f0.has_provenance:
        raise PreconditionError("deformation tracking needs a pull-back with provenance")
    if map_perturbation is None and field_perturbation is None:
        raise PreconditionError("no perturbation given")
    grid = sorted(Fraction(t) for t in t_grid)
    if points is None:
        points = indeterminacy_locus(f0.map).points
    paths = [DeformationPath(i, int(np.argmax(np.abs(p)))) for i, p in enumerate(points)]
    current = [np.asarray(p, dtype=complex) / p[path.chart] for p, path in zip(points, paths)]
    prev_t: Fraction | None = None
    for t in grid:
        key = _key(t)
        eta = deformed_foliation(f0, t, map_perturbation, field_perturbation)
        for path, p in zip(paths, current):
            if path.status == "lost":
                continue
            rot = chart_rotational(eta, path.chart)
            u0 = rot.affine(p)
            u, res, ok = newton_batch(rot.deflated_system, u0[None, :], max_iter=60, tol=1e-15)
            u = u[0]
            zres = float(np.abs(rot.z_system(u)).max() / rot.scale)
            new = rot.embed(u)
            jump = projective_distance(new, p)
            if not np.isfinite(u).all() or res[0] > 1e-9 or jump > jump_tol:
                path.status = "lost"
                path.notes.append(f"t={key}: path lost (residual {res[0]:.2e}, jump {jump:.2e})")
                continue
            nil = nilpotency_residual(rot.z_system.jacobian(u), rot.scale, tol)
            uniq = None
            if check_uniqueness:
                uniq, others = isolation_probe(rot, u, seed=seed)
            path.points[key] = new
            path.residuals[key] = zres
            path.nilpotency[key] = nil
            path.unique[key] = uniq
            if nil > tol and path.status == "stable":
                path.status = "type change"
                path.notes.append(f"t={key}: nilpotency residual {nil:.2e}")
            if uniq is False:
                path.notes.append(f"t={key}: another zero of Z inside the continuation ball")
            if prev_t is not None and t != prev_t:
                path.lipschitz = max(path.lipschitz, float(np.linalg.norm(new - p)) / float(t - prev_t))
        current = [
            path.points.get(key, cur) for path, cur in zip(paths, current)
        ]
        prev_t = t
    endpoint_error = None
    if endpoint_check and grid and map_perturbation is not None:
        f_end = perturbed_map(f0.map, list(map_perturbation), grid[-1])
        locus = indeterminacy_locus(f_end, method="newton", config=None)
        endpoint_error = 0.0
        for path, p in zip(paths, current):
            if path.status == "lost":
                continue
            dist = min((float(np.abs(p - q / q[path.chart]).max()) for q in locus.points), default=np.inf)
            endpoint_error = max(endpoint_error, dist)
    return DeformationReport(paths, [_key(t) for t in grid], seed,
                             {"tol": tol, "jump_tol": jump_tol}, endpoint_error)
