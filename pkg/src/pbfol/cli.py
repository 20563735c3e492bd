"""Command-line front end: build objects, run verification pipelines, emit JSON reports.

Exit codes: 0 pass, 1 construction or check failure, 2 usage error,
3 inconclusive numeric result.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import __version__
from .errors import DegenerateFoliationError, NotEigenFieldError, PbfolError, PreconditionError
from .exterior import VectorField
from .foliation import (
    OneDimFoliation,
    RationalMap,
    TwoDimFoliation,
    bounded_invariant_hypersurface_scan,
    decomposability_check,
    diagonal_difference_map,
    foliation_degree,
    integrability_check,
    linear_projection_map,
    omega_from_field,
    power_map,
    pullback_form,
    radial_contraction_check,
    rotational_constant,
    standard_pair,
)
from .graded import (
    WeightVector,
    divfree_basis,
    eigen_level,
    jouanolou_field,
    kernel_test,
    resonance_scan,
    sigma_basis,
)
from .ring import ANY_DEGREE, NOT_HOMOGENEOUS, Poly, coprimality_check

log = logging.getLogger("pbfol")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ----------------------------------------------------------------------
# reports
# ----------------------------------------------------------------------


def canonical(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_json_default)


def digest(obj: Any) -> str:
    return hashlib.sha256(canonical(obj).encode()).hexdigest()


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


@dataclass
class Check:
    name: str
    anchor: str
    verdict: str  # "pass" | "fail" | "inconclusive" | "info"
    mandatory: bool = True
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "anchor": self.anchor,
            "verdict": self.verdict,
            "mandatory": self.mandatory,
            "details": self.details,
        }


@dataclass
class PipelineReport:
    pipeline: str
    inputs: dict[str, str]
    seed: int
    tolerances: dict
    checks: list[Check] = field(default_factory=list)

    def add(self, *args, **kwargs) -> Check:
        c = Check(*args, **kwargs)
        self.checks.append(c)
        return c

    @property
    def overall(self) -> str:
        mandatory = [c for c in self.checks if c.mandatory]
        if any(c.verdict == "fail" for c in mandatory):
            return "fail"
        if any(c.verdict == "inconclusive" for c in mandatory):
            return "inconclusive"
        return "pass"

    @property
    def exit_code(self) -> int:
        return {"pass": EXIT_OK, "fail": EXIT_FAIL, "inconclusive": EXIT_INCONCLUSIVE}[self.overall]

    def to_json(self) -> dict:
        body = {
            "pipeline": self.pipeline,
            "inputs": self.inputs,
            "checks": [c.to_json() for c in self.checks],
            "overall": self.overall,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "version": __version__,
        }
        body["digest"] = digest(body)
        return body


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


# ----------------------------------------------------------------------
# input handling
# ----------------------------------------------------------------------


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def load_field(obj: dict) -> VectorField:
    if "field" in obj:
        obj = obj["field"]
    return VectorField.from_json(obj)


def load_foliation(obj: dict) -> OneDimFoliation:
    return omega_from_field(load_field(obj))


def load_map(obj: dict) -> RationalMap:
    return RationalMap.from_json(obj, check_coprime=False)


def load_bundle(obj: dict) -> TwoDimFoliation:
    return TwoDimFoliation.from_json(obj)


def _inputs(args, names) -> tuple[dict, dict[str, str]]:
    objs, digests = {}, {}
    for name in names:
        path = getattr(args, name, None)
        if path:
            objs[name] = _load_json(path)
            digests[name] = digest(objs[name])
    return objs, digests


def _resolve_pair(args) -> tuple[RationalMap, OneDimFoliation, TwoDimFoliation | None, dict[str, str]]:
    objs, digests = _inputs(args, ["bundle", "map", "fol"])
    if getattr(args, "standard", False):
        f, g = standard_pair()
        digests["standard"] = digest({"map": f.to_json(), "field": g.field.to_json()})
        return f, g, None, digests
    if "bundle" in objs:
        b = load_bundle(objs["bundle"])
        if not b.has_provenance:
            raise UsageError("bundle has no provenance (map and field)")
        return b.map, b.base, b, digests
    if "map" in objs and "fol" in objs:
        return load_map(objs["map"]), load_foliation(objs["fol"]), None, digests
    raise UsageError("need --bundle, --standard, or both --map and --fol")


def _tolerances(args) -> dict:
    return {
        "tol": args.tol,
        "rank_tol": args.rank_tol,
        "hyperbolic_tol": args.hyperbolic_tol,
        "residual_tol": args.residual_tol,
        "dedupe_radius": args.dedupe_radius,
    }


def _solver_config(args):
    from .numeric.singular import SolverConfig

    return SolverConfig(seed=args.seed, residual_tol=args.residual_tol, dedupe_radius=args.dedupe_radius,
                        hyperbolic_tol=args.hyperbolic_tol)


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}") from exc


def parse_t_grid(text: str) -> list[Fraction]:
    """``"a:b:h"`` (inclusive) or a comma list of decimals; empty text gives an empty grid."""
    text = text.strip()
    if not text:
        return []
    try:
        if ":" in text:
            a, b, h = (Fraction(v) for v in text.split(":"))
            if h <= 0:
                raise UsageError("grid step must be positive")
            out, t = [], a
            while t <= b:
                out.append(t)
                t += h
            return out
        return [Fraction(v) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad t-grid {text!r}") from exc


# ----------------------------------------------------------------------
# build
# ----------------------------------------------------------------------


def cmd_build(args) -> tuple[dict, int]:
    kind = args.kind
    if kind == "jouanolou":
        if args.n is None or args.d is None or args.n < 2 or args.d < 2:
            raise UsageError("jouanolou needs --n >= 2 and --d >= 2")
        return jouanolou_field(args.n, args.d).to_json(), EXIT_OK
    if kind == "omega":
        if args.field:
            x = load_field(_load_json(args.field))
        elif args.n is not None and args.d is not None:
            x = jouanolou_field(args.n, args.d)
        else:
            raise UsageError("omega needs --field or --n/--d (Jouanolou)")
        return omega_from_field(x).to_json(), EXIT_OK
    if kind == "map":
        if args.n is None or args.n < 2:
            raise UsageError("map needs --n >= 2")
        if args.power:
            f = power_map(args.n, args.nu or 2)
        elif args.linear:
            f = linear_projection_map(args.n)
        else:
            if args.nu is None or args.nu < 1:
                raise UsageError("diagonal-difference map needs --nu >= 1")
            weights = _parse_int_list(args.weights) if args.weights else None
            try:
                f = diagonal_difference_map(args.n, args.nu, weights)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
        return f.to_json(), EXIT_OK
    if kind == "pullback":
        f, g, _, _ = _resolve_pair(args)
        eta = pullback_form(f, g, seed=args.seed)
        out = eta.to_json()
        out["common_factor"] = None if eta.common_factor is None else eta.common_factor.to_json()
        return out, EXIT_OK
    raise UsageError(f"unknown build kind {kind}")


# ----------------------------------------------------------------------
# verify pipelines
# ----------------------------------------------------------------------


def true_degree(nu: int, d: int, n: int) -> int:
    """Degree of the pull-back foliation from a direct count of coefficient degrees."""
    return nu * (d + n - 1) - n + 1


def stated_degree(nu: int, d: int, n: int) -> int:
    return (d + n - 1) * nu - 3


def _foliation_checks(rep: PipelineReport, eta: TwoDimFoliation, args) -> None:
    form = eta.form
    rep.add("radial contraction", "i_R eta = 0", _verdict(radial_contraction_check(form)))
    cdeg = form.coefficient_degree()
    homog = isinstance(cdeg, int)
    rep.add("homogeneous coefficients", "coefficients homogeneous of degree deg+1", _verdict(homog),
            details={"coefficient_degree": cdeg if homog else str(cdeg)})
    dec = decomposability_check(form)
    rep.add("decomposability", "eta is pointwise a product of 1-forms", _verdict(dec))
    integ = integrability_check(form) if dec else False
    rep.add("integrability", "integrable (n-2)-form", _verdict(integ),
            details={} if dec else {"note": "skipped: form is not decomposable"})
    if homog:
        theta = foliation_degree(form)
        details = {"theta": theta}
        ok = True
        if eta.has_provenance:
            nu, d, n = eta.map.degree, eta.base.degree, eta.map.target_dim
            details.update({"nu": nu, "d": d, "n": n, "expected": true_degree(nu, d, n)})
            ok = theta == true_degree(nu, d, n) and eta.common_factor is None
            stated = stated_degree(nu, d, n)
            rep.add("degree formula audit", "Theta(nu,d,n) = (d+n-1)nu - 3", "info", mandatory=False,
                    details={"stated": stated, "computed": theta, "discrepancy": stated != theta})
        rep.add("degree", "degree of the pull-back foliation", _verdict(ok), details=details)
    if eta.has_provenance:
        g = eta.base
        c = rotational_constant(g.form, g.field)
        n = g.ambient_vars
        rep.add("rotational constant audit", "rotational of Omega equals (d+n) X", "info", mandatory=False,
                details={"computed": None if c is None else str(c), "stated": g.degree + n,
                         "proportional": c is not None,
                         "discrepancy": c is None or c != g.degree + n})


def _generic_map_checks(rep: PipelineReport, f: RationalMap, args):
    from .numeric.maps import genericity_check, indeterminacy_locus

    cop = coprimality_check(list(f.components), num_lines=5, seed=args.seed)
    rep.add("coprimality", "components without common factors", _verdict(cop.coprime),
            details={"note": cop.note, "lines": cop.lines_tried})
    locus = indeterminacy_locus(f, _solver_config(args), rank_tol=args.rank_tol)
    gen = genericity_check(f, locus, tol=args.rank_tol)
    count_verdict = "pass" if gen.count_ok else ("fail" if locus.found > locus.expected else "inconclusive")
    rep.add("indeterminacy count", "I(f) consists of nu^n distinct points", count_verdict,
            details={"found": locus.found, "expected": locus.expected, "method": locus.method,
                     "failed_starts": locus.failed_starts})
    trans = all(gen.flags)
    rep.add("transversality", "dF_0 ^ ... ^ dF_{n-1} != 0 at every point of I(f)", _verdict(trans),
            details={"flags": gen.flags, "non_reduced_points": sum(not x for x in locus.reduced)})
    if not trans and count_verdict == "inconclusive":
        # a degenerate point explains the under-count
        rep.checks[-2].verdict = "fail"
    return locus, gen


def _generic_pair_check(rep: PipelineReport, f, g, args, sing):
    from .numeric.maps import generic_pair_check

    pts = [np.asarray(r.point) for r in sing.points]
    gp = generic_pair_check(f, g, _solver_config(args), rank_tol=args.rank_tol, singular_points=pts)
    verdict = {"generic pair": "pass", "not generic": "fail", "inconclusive": "inconclusive"}[gp.verdict]
    rep.add("generic pair", "Sing(G) and the critical values of f are disjoint", verdict, details=gp.to_json())
    return gp


def _singularity_check(rep: PipelineReport, g: OneDimFoliation, args, mandatory: bool = True):
    from .numeric.singular import classify_hyperbolic, solve_singularities

    sing = solve_singularities(g, _solver_config(args))
    for r in sing.points:
        classify_hyperbolic(r, g, tol=args.hyperbolic_tol)
    verdict = "pass" if sing.found == sing.expected else "inconclusive"
    rep.add("singularity count", "exactly N = (d^n-1)/(d-1) singularities", verdict, mandatory=mandatory,
            details={"found": sing.found, "expected": sing.expected,
                     "classifications": [r.classification for r in sing.points]})
    return sing


def cmd_verify(args) -> tuple[dict, int]:
    pipeline = args.pipeline
    tols = _tolerances(args)
    if pipeline == "foliation":
        objs, digests = _inputs(args, ["bundle", "fol"])
        rep = PipelineReport(pipeline, digests, args.seed, tols)
        if "bundle" in objs:
            eta = load_bundle(objs["bundle"])
        elif "fol" in objs:
            g = load_foliation(objs["fol"])
            eta = TwoDimFoliation(g.form, None)
            rep.add("homogeneity of the field", "[R, X] = (d-1) X", "pass")
        elif args.standard:
            f, g = standard_pair()
            eta = pullback_form(f, g, seed=args.seed)
            rep.inputs["standard"] = digest(eta.to_json())
        else:
            raise UsageError("verify foliation needs --bundle, --fol or --standard")
        _foliation_checks(rep, eta, args)
        return rep.to_json(), rep.exit_code

    if pipeline == "generic-map":
        objs, digests = _inputs(args, ["map", "bundle"])
        if "map" in objs:
            f = load_map(objs["map"])
        elif "bundle" in objs:
            f = load_bundle(objs["bundle"]).map
        elif args.standard:
            f = standard_pair()[0]
        else:
            raise UsageError("verify generic-map needs --map, --bundle or --standard")
        if f is None:
            raise UsageError("bundle has no map")
        rep = PipelineReport(pipeline, digests, args.seed, tols)
        _generic_map_checks(rep, f, args)
        return rep.to_json(), rep.exit_code

    f, g, bundle, digests = _resolve_pair(args)
    rep = PipelineReport(pipeline, digests, args.seed, tols)
    if pipeline == "generic-pair":
        _generic_map_checks(rep, f, args)
        sing = _singularity_check(rep, g, args)
        _generic_pair_check(rep, f, g, args, sing)
        return rep.to_json(), rep.exit_code
    if pipeline == "theoremB-hypotheses":
        _theorem_b(rep, f, g, bundle, args)
        return rep.to_json(), rep.exit_code
    raise UsageError(f"unknown pipeline {pipeline}")


def _theorem_b(rep: PipelineReport, f: RationalMap, g: OneDimFoliation, bundle, args) -> None:
    from .numeric.local import kupka_test, ngk_test
    from .numeric.maps import fiber_points

    eta = bundle if bundle is not None else pullback_form(f, g, seed=args.seed)
    locus, gen = _generic_map_checks(rep, f, args)
    sing = _singularity_check(rep, g, args)
    gp = _generic_pair_check(rep, f, g, args, sing)

    # P1: every indeterminacy point is an isolated n.g.k singularity of the expected type
    verdicts = [ngk_test(eta, p, args.tol, genericity_ok=flag, seed=args.seed)
                for p, flag in zip(locus.points, gen.flags)]
    p1 = all(v.ngk for v in verdicts) and len(verdicts) == locus.expected
    unresolved = any(v.verdict == "unresolved" for v in verdicts)
    rep.add("P1 n.g.k points", "each p in I(f) is n.g.k with Sing(Z_p) = {p}",
            "inconclusive" if (unresolved and not p1) else _verdict(p1),
            details={"points": len(verdicts), "ngk": sum(v.ngk for v in verdicts),
                     "max_nilpotency_residual": max((v.nilpotency_residual for v in verdicts), default=None),
                     "type_tags": sorted({str(v.type_tag) for v in verdicts}),
                     "notes": sorted({n for v in verdicts for n in v.notes})})

    # P2 and P3 at a transversal singularity of G
    hyper = [r for r in sing.points if r.classification == "hyperbolic"]
    if not sing.points:
        rep.add("P2 Kupka fiber", "fibers over Sing(G) lie in the Kupka set", "inconclusive",
                details={"note": "no singularity of G found"})
        return
    q_rec = hyper[0] if hyper else sing.points[0]
    pts, counts = fiber_points(f, np.asarray(q_rec.point), slices=2, seed=args.seed)
    kup = [kupka_test(eta, p, args.tol) for p in pts]
    both = [ngk_test(eta, p, args.tol, isolation=False).ngk for p in pts]
    p2 = bool(kup) and all(k.kupka for k in kup) and not any(both)
    rep.add("P2 Kupka fiber", "fiber over a singularity of G off I(f) lies in the Kupka set",
            _verdict(p2) if len(pts) >= 10 else "inconclusive",
            details={"sampled": len(pts), "slice_counts": counts, "kupka": sum(k.kupka for k in kup),
                     "min_relative_rotational": min((k.z_norm / k.scale for k in kup), default=None)})
    ratios = [[complex(z).real, complex(z).imag] for z in (q_rec.ratios or [])]
    p3 = q_rec.classification == "hyperbolic"
    rep.add("P3 non-real index data", "Camacho-Sad index along the separatrix is non-real", _verdict(p3),
            details={"singularity": [[complex(v).real, complex(v).imag] for v in q_rec.point],
                     "eigenvalue_ratios": ratios})

    # P4: bounded evidence only
    scan = bounded_invariant_hypersurface_scan(eta, args.p4_degree, seed=args.seed)
    if scan.invariant:
        rep.add("P4 no invariant hypersurface", "F has no algebraic invariant hypersurface", "fail",
                details=scan.to_json())
    else:
        rep.add("P4 no invariant hypersurface", "F has no algebraic invariant hypersurface", "pass",
                mandatory=False,
                details={**scan.to_json(), "summary": f"no invariant hypersurface up to degree {args.p4_degree}"})


# ----------------------------------------------------------------------
# deform, sigma, solve
# ----------------------------------------------------------------------


def cmd_deform(args) -> tuple[dict, int]:
    from .numeric.deform import track_deformation
    from .numeric.maps import random_map_perturbation

    objs, digests = _inputs(args, ["bundle"])
    if "bundle" in objs:
        bundle = load_bundle(objs["bundle"])
    elif args.standard:
        f, g = standard_pair()
        bundle = pullback_form(f, g, seed=args.seed)
        digests["standard"] = digest(bundle.to_json())
    else:
        raise UsageError("deform needs --bundle or --standard")
    if not bundle.has_provenance:
        raise UsageError("bundle has no provenance")
    grid = parse_t_grid(args.t_grid)
    map_pert = field_pert = None
    if args.perturb in (None, "random-map"):
        map_pert = random_map_perturbation(bundle.map, np.random.default_rng(args.seed))
    else:
        obj = _load_json(args.perturb)
        digests["perturb"] = digest(obj)
        if "map" in obj:
            map_pert = [Poly.from_json(p) for p in obj["map"]]
        elif "field" in obj:
            field_pert = VectorField.from_json(obj["field"])
        else:
            raise UsageError("perturbation JSON needs a 'map' or 'field' entry")
    if not grid:
        body = {"paths": [], "t_grid": [], "seed": args.seed, "inputs": digests, "tolerances": _tolerances(args)}
        return body, EXIT_OK
    rep = track_deformation(bundle, grid, map_perturbation=map_pert, field_perturbation=field_pert,
                            tol=args.tol, seed=args.seed, endpoint_check=map_pert is not None)
    body = rep.to_json()
    body["inputs"] = digests
    body["perturbation"] = {
        "kind": "map" if map_pert is not None else "field",
        "value": [p.to_json() for p in map_pert] if map_pert is not None else field_pert.to_json(),
    }
    body["anchor"] = "the n.g.k point is the unique singularity of F_t near it"
    if rep.lost:
        return body, EXIT_INCONCLUSIVE
    if rep.type_changes:
        return body, EXIT_FAIL
    return body, EXIT_OK


def cmd_sigma(args) -> tuple[dict, int]:
    weights = _parse_int_list(args.weights)
    try:
        s = WeightVector(tuple(weights))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out: dict[str, Any] = {"weights": weights}
    x = None
    if args.field:
        x = load_field(_load_json(args.field))
        out["inputs"] = {"field": digest(x.to_json())}
        if x.nvars != s.n:
            raise UsageError("field and weights have different dimensions")
    level = args.level
    if level is None:
        level = eigen_level(x, s) if x is not None and not x.is_zero() else 0
    space = sigma_basis(s, level, args.degree_cap)
    out["level"] = level
    out["dim"] = space.dim
    out["divfree_dim"] = divfree_basis(space).dim
    if args.basis:
        out["basis"] = [b.to_json() for b in space.basis]
    res = resonance_scan(s)
    out["resonances"] = [{"sigma": list(r.sigma), "j": r.j} for r in res if not r.trivial]
    out["trivial_resonances"] = [{"sigma": list(r.sigma), "j": r.j} for r in res if r.trivial]
    if x is not None:
        rep = kernel_test(x, s, level)
        out["kernel"] = rep.to_json()
        out["anchor"] = "N necessarily vanishes iff ker(L0_X) = {0}"
    return out, EXIT_OK


def cmd_solve(args) -> tuple[dict, int]:
    from .numeric.maps import genericity_check, indeterminacy_locus
    from .numeric.singular import classify_hyperbolic, solve_singularities

    objs, digests = _inputs(args, ["fol", "map"])
    if "fol" in objs:
        g = load_foliation(objs["fol"])
        rep = solve_singularities(g, _solver_config(args), method=args.method)
        for r in rep.points:
            classify_hyperbolic(r, g, tol=args.hyperbolic_tol)
        body = rep.to_json()
        body["inputs"] = digests
        body["anchor"] = "exactly N = (d^n-1)/(d-1) hyperbolic singularities"
        return body, EXIT_OK if rep.found == rep.expected else EXIT_INCONCLUSIVE
    if "map" in objs:
        f = load_map(objs["map"])
        method = "auto" if args.method in ("auto", "resultant") else args.method
        locus = indeterminacy_locus(f, _solver_config(args), method=method, rank_tol=args.rank_tol)
        gen = genericity_check(f, locus, args.rank_tol)
        body = locus.to_json()
        body["generic"] = gen.generic
        body["inputs"] = digests
        body["anchor"] = "I(f) consists of nu^n distinct points"
        return body, EXIT_OK if locus.found == locus.expected else EXIT_INCONCLUSIVE
    raise UsageError("solve needs --fol or --map")


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------


def _global_options(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="seed for every randomized procedure")
    p.add_argument("--tol", type=float, default=d(1e-8), help="Kupka / nilpotency tolerance")
    p.add_argument("--rank-tol", type=float, default=d(1e-8), help="relative singular-value threshold")
    p.add_argument("--hyperbolic-tol", type=float, default=d(1e-9), help="relative imaginary-part threshold")
    p.add_argument("--residual-tol", type=float, default=d(1e-10), help="solver residual tolerance")
    p.add_argument("--dedupe-radius", type=float, default=d(1e-6), help="projective merge radius")
    p.add_argument("--out", default=d(None), help="write the JSON document to this file")
    p.add_argument("--format", choices=["json"], default=d("json"))
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pbfol", description=__doc__.splitlines()[0])
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", parents=[common], help="construct an object")
    b.add_argument("kind", choices=["jouanolou", "omega", "pullback", "map"])
    b.add_argument("--n", type=int)
    b.add_argument("--d", type=int)
    b.add_argument("--nu", type=int)
    b.add_argument("--weights", help="comma-separated weights for the diagonal-difference map")
    b.add_argument("--diagonal-difference", action="store_true", help="F_i = a_i (z_i^nu - z_n^nu) (default)")
    b.add_argument("--power", action="store_true", help="F_i = z_i^nu")
    b.add_argument("--linear", action="store_true", help="F_i = z_i")
    b.add_argument("--field", help="VectorField JSON")
    b.add_argument("--map", help="RationalMap JSON")
    b.add_argument("--fol", help="VectorField or foliation JSON")
    b.add_argument("--bundle", help=argparse.SUPPRESS)
    b.add_argument("--standard", action="store_true", help="use the built-in standard pair")

    v = sub.add_parser("verify", parents=[common], help="run a verification pipeline")
    v.add_argument("pipeline", choices=["foliation", "generic-map", "generic-pair", "theoremB-hypotheses"])
    v.add_argument("--bundle", help="TwoDimFoliation bundle JSON")
    v.add_argument("--map", help="RationalMap JSON")
    v.add_argument("--fol", help="VectorField or foliation JSON")
    v.add_argument("--standard", action="store_true", help="use the built-in standard pair")
    v.add_argument("--p4-degree", type=int, default=1, help="degree bound for the invariant hypersurface scan")

    d = sub.add_parser("deform", parents=[common], help="continue n.g.k points along a deformation")
    d.add_argument("--bundle", "--foliation", dest="bundle", help="TwoDimFoliation bundle JSON with provenance")
    d.add_argument("--standard", action="store_true", help="use the built-in standard pull-back")
    d.add_argument("--perturb", default="random-map",
                   help="'random-map' (seeded) or JSON with a 'map' list of polynomials or a 'field'")
    d.add_argument("--t-grid", default="0:0.05:0.01", help="'start:stop:step' or comma list")

    s = sub.add_parser("sigma", parents=[common], help="graded spaces, kernels and resonances")
    s.add_argument("--weights", required=True, help="comma-separated positive weights")
    s.add_argument("--level", type=int)
    s.add_argument("--field", help="VectorField JSON for the kernel test")
    s.add_argument("--degree-cap", type=int)
    s.add_argument("--basis", action="store_true", help="include the monomial basis")

    so = sub.add_parser("solve", parents=[common], help="singularities or indeterminacy points")
    so.add_argument("--fol", help="VectorField or foliation JSON")
    so.add_argument("--map", help="RationalMap JSON")
    so.add_argument("--method", choices=["auto", "resultant", "newton", "exact"], default="auto")
    return parser


COMMANDS = {"build": cmd_build, "verify": cmd_verify, "deform": cmd_deform, "sigma": cmd_sigma, "solve": cmd_solve}


def emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True, default=_json_default)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
        print(json.dumps({"written": out, "sha256": digest(doc)}))
    else:
        print(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        doc, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotEigenFieldError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateFoliationError, PreconditionError, PbfolError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        emit({"command": args.command, "error": str(exc)}, None)
        return EXIT_FAIL
    emit(doc, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
