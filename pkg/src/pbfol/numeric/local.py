"""Local tests at singular points of foliations by surfaces: Kupka and n.g.k."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import PreconditionError
from ..exterior import KForm, VectorField, rotational
from ..foliation import TwoDimFoliation
from ..linalg import matpow
from ..ring import Poly, dehomogenize, poly_eval
from .evaluate import CompiledSystem, newton_batch, projective_normalize

DEFAULT_TOL = 1e-8


def chart_form(eta: KForm, c: int) -> KForm:
    """Restriction of a homogeneous form to the affine chart ``z_c = 1``."""
    n = eta.nvars
    if not 0 <= c < n:
        raise IndexError("chart index out of range")
    comps = {}
    for idx, p in eta.components.items():
        if c in idx:
            continue
        q = dehomogenize(p, c)
        if q.is_zero():
            continue
        new = tuple(i if i < c else i - 1 for i in idx)
        comps[new] = comps[new] + q if new in comps else q
    return KForm(n - 1, eta.degree, comps)


@dataclass
class ChartRotational:
    """Rotational ``Z`` of a chart restriction, compiled for evaluation."""

    chart: int
    form: KForm
    field: VectorField
    form_system: CompiledSystem
    z_system: CompiledSystem
    dz_polys: list[list[Poly]]
    deflated_system: CompiledSystem

    @property
    def scale(self) -> float:
        return max(float(self.z_system.scale.max()), 1e-300)

    def affine(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=complex)
        return np.delete(p / p[self.chart], self.chart)

    def embed(self, u) -> np.ndarray:
        return np.insert(np.asarray(u, dtype=complex), self.chart, 1.0)


def _build_chart_rotational(eta: KForm, c: int) -> ChartRotational:
    form = chart_form(eta, c)
    z = rotational(form)
    comps = list(z.components)
    m = form.nvars
    zero = Poly(m)
    fsys = CompiledSystem(list(form.components.values()) or [zero])
    zsys = CompiledSystem(comps)
    dz = [[zi.partial(j) for j in range(m)] for zi in comps]
    defl = CompiledSystem(comps + [q for row in dz for q in row])
    return ChartRotational(c, form, z, fsys, zsys, dz, defl)


_CACHE: dict[tuple[int, int], tuple[KForm, ChartRotational]] = {}


def chart_rotational(eta: KForm | TwoDimFoliation, c: int) -> ChartRotational:
    """Cached :class:`ChartRotational` of ``eta`` in the chart ``z_c = 1``."""
    form = eta.form if isinstance(eta, TwoDimFoliation) else eta
    key = (hash(form), c)
    hit = _CACHE.get(key)
    if hit is not None and (hit[0] is form or hit[0] == form):
        return hit[1]
    if len(_CACHE) > 256:
        _CACHE.clear()
    rot = _build_chart_rotational(form, c)
    _CACHE[key] = (form, rot)
    return rot


def _chart_of(p) -> int:
    p = np.asarray(p, dtype=complex)
    return int(np.argmax(np.abs(p)))


def is_singular(eta, p, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    form = eta.form if isinstance(eta, TwoDimFoliation) else eta
    z = projective_normalize(np.asarray(p, dtype=complex))
    sys_ = CompiledSystem(list(form.components.values()))
    val = float(np.abs(sys_(z)).max() / max(sys_.scale.max(), 1e-300))
    return val <= tol, val


@dataclass
class KupkaVerdict:
    kupka: bool
    z_norm: float
    scale: float
    chart: int
    tol: float

    def __bool__(self) -> bool:
        return self.kupka

    def to_json(self) -> dict:
        return {"kupka": self.kupka, "z_norm": self.z_norm, "scale": self.scale, "chart": self.chart, "tol": self.tol}


def kupka_test(eta, p, tol: float = DEFAULT_TOL) -> KupkaVerdict:
    """Kupka iff the rotational does not vanish at the singular point ``p``."""
    sing, val = is_singular(eta, p, tol)
    if not sing:
        raise PreconditionError(f"point is not singular (relative form value {val:.3e})")
    c = _chart_of(p)
    rot = chart_rotational(eta, c)
    zval = rot.z_system(rot.affine(p))
    znorm = float(np.linalg.norm(zval))
    return KupkaVerdict(znorm > tol * rot.scale, znorm, rot.scale, c, tol)


@dataclass
class NgkVerdict:
    verdict: str  # "ngk" | "not ngk" | "unresolved"
    z_norm: float
    nilpotency_residual: float
    exact: bool
    isolated: bool | None
    chart: int
    tol: float
    type_tag: tuple | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ngk(self) -> bool:
        return self.verdict == "ngk"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "z_norm": self.z_norm,
            "nilpotency_residual": self.nilpotency_residual,
            "exact": self.exact,
            "isolated": self.isolated,
            "chart": self.chart,
            "tol": self.tol,
            "type_tag": None if self.type_tag is None else [list(self.type_tag[0]), self.type_tag[1]],
            "notes": self.notes,
        }


def _as_rational_point(p, max_den: int = 64, tol: float = 1e-12) -> list[Fraction] | None:
    z = projective_normalize(np.asarray(p, dtype=complex))
    out = []
    for v in z:
        if abs(v.imag) > tol:
            return None
        q = Fraction(float(v.real)).limit_denominator(max_den)
        if abs(float(q) - v.real) > tol:
            return None
        out.append(q)
    return out


def nilpotency_residual(m: np.ndarray, scale: float, tol: float = DEFAULT_TOL) -> float:
    """``||M^k|| / ||M||^k`` with ``k`` the size plus one; ``||M||/scale`` when ``M`` is negligible."""
    k = m.shape[0] + 1
    norm = float(np.linalg.norm(m))
    if norm <= tol * scale:
        return norm / scale
    return float(np.linalg.norm(np.linalg.matrix_power(m / norm, k)))


def isolation_probe(rot: ChartRotational, u: np.ndarray, *, radius: float = 0.05, starts: int = 24,
                    seed: int = 0, tol: float = 1e-10) -> tuple[bool, list[np.ndarray]]:
    """Newton on ``Z`` from a shell around ``u``; any other zero nearby breaks isolation."""
    rng = np.random.default_rng(seed)
    m = u.size
    dirs = rng.normal(size=(starts, m)) + 1j * rng.normal(size=(starts, m))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    x0 = u[None, :] + radius * dirs
    pts, res, _ = newton_batch(rot.z_system, x0, max_iter=200, tol=1e-15)
    others = []
    for q, r in zip(pts, res):
        if r > tol or not np.isfinite(q).all():
            continue
        dist = float(np.linalg.norm(q - u))
        if 1e-3 < dist < 2 * radius:
            others.append(q)
    return not others, others


def ngk_test(eta, p, tol: float = DEFAULT_TOL, *, exact_point=None, isolation: bool = True,
             seed: int = 0, genericity_ok: bool | None = None) -> NgkVerdict:
    """Nilpotent generalized Kupka test at a singular point.

    ``Z(p) = 0``, nilpotent ``DZ(p)`` and an isolated zero of ``Z``.  The
    nilpotency test is exact when ``p`` has (recognizably) rational
    coordinates.  For pull-backs ``p`` in the indeterminacy locus receives
    the type tag ``((1,...,1), d-1)`` when ``genericity_ok`` is true.
    """
    sing, val = is_singular(eta, p, tol)
    if not sing:
        raise PreconditionError(f"point is not singular (relative form value {val:.3e})")
    c = _chart_of(p)
    rot = chart_rotational(eta, c)
    u = rot.affine(p)
    zval = rot.z_system(u)
    znorm = float(np.linalg.norm(zval))
    notes: list[str] = []
    if znorm > tol * rot.scale:
        return NgkVerdict("not ngk", znorm, float("nan"), False, None, c, tol, None, ["rotational does not vanish"])

    rat = exact_point if exact_point is not None else _as_rational_point(p)
    exact = False
    if rat is not None:
        rat = [Fraction(v) for v in rat]
        rat = [v / rat[c] for v in rat]
        ua = rat[:c] + rat[c + 1 :]
        if all(poly_eval(zi, ua) == 0 for zi in rot.field):
            mat = [[poly_eval(q, ua) for q in row] for row in rot.dz_polys]
            k = len(mat) + 1
            exact = True
            nil = all(v == 0 for row in matpow(mat, k) for v in row)
            resid = 0.0 if nil else 1.0
        else:
            notes.append("rational point is not an exact zero of Z; using the float test")
    if not exact:
        jac = rot.z_system.jacobian(u)
        resid = nilpotency_residual(jac, rot.scale, tol)
        nil = resid <= tol
        if not nil and resid <= np.sqrt(tol):
            return NgkVerdict("unresolved", znorm, resid, False, None, c, tol, None,
                              notes + ["nilpotency indeterminate within tolerance"])

    isolated = None
    if isolation:
        isolated, others = isolation_probe(rot, u, seed=seed)
        if not isolated:
            notes.append(f"{len(others)} other zeros of Z found near the point")
    ok = nil and (isolated is not False)
    tag = None
    if ok and isinstance(eta, TwoDimFoliation) and eta.has_provenance and genericity_ok:
        fvals = CompiledSystem(list(eta.map.components))(projective_normalize(np.asarray(p, dtype=complex)))
        if np.abs(fvals).max() <= tol * max(1.0, float(CompiledSystem(list(eta.map.components)).scale.max())):
            n = eta.map.target_dim
            tag = ((1,) * n, eta.base.degree - 1)
            notes.append(f"type weight k = d-1 = {eta.base.degree - 1}; the nominal value quoted for this "
                         f"family is {n}")
    return NgkVerdict("ngk" if ok else "not ngk", znorm, resid, exact, isolated, c, tol, tag, notes)
