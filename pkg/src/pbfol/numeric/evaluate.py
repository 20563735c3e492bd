"""Vectorized complex evaluation of polynomial systems and their Jacobians."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..ring import Poly


class CompiledSystem:
    """A list of polynomials in the same variables, compiled for batch evaluation.

    All polynomials share one monomial table, so evaluating ``m`` polynomials
    at ``K`` points costs one ``(K, T)`` monomial matrix and one matmul.
    """

    def __init__(self, polys: Sequence[Poly]):
        if not polys:
            raise ValueError("empty system")
        self.nvars = polys[0].nvars
        if any(p.nvars != self.nvars for p in polys):
            raise ValueError("polynomials have different variable counts")
        self.size = len(polys)
        index: dict[tuple, int] = {}
        rows: list[tuple[int, int, complex]] = []
        for j, p in enumerate(polys):
            for e, c in p.terms:
                t = index.setdefault(e, len(index))
                rows.append((t, j, complex(float(c))))
        if not index:
            index[(0,) * self.nvars] = 0
        self.exps = np.array(list(index.keys()), dtype=np.int64).reshape(len(index), self.nvars)
        self.coeffs = np.zeros((len(index), self.size), dtype=complex)
        for t, j, c in rows:
            self.coeffs[t, j] += c
        self.maxdeg = int(self.exps.max()) if self.exps.size else 0
        self.scale = np.abs(self.coeffs).sum(axis=0)
        self._jac = None
        self._polys = list(polys)

    def monomials(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=complex))
        k = pts.shape[0]
        out = np.ones((k, self.exps.shape[0]), dtype=complex)
        if self.maxdeg == 0:
            return out
        # power table (K, n, maxdeg+1)
        powers = np.ones((k, self.nvars, self.maxdeg + 1), dtype=complex)
        for d in range(1, self.maxdeg + 1):
            powers[:, :, d] = powers[:, :, d - 1] * pts
        for i in range(self.nvars):
            out *= powers[:, i, self.exps[:, i]]
        return out

    def __call__(self, pts) -> np.ndarray:
        """Values with shape ``(K, m)`` (or ``(m,)`` for a single point)."""
        arr = np.asarray(pts, dtype=complex)
        single = arr.ndim == 1
        vals = self.monomials(arr) @ self.coeffs
        return vals[0] if single else vals

    @property
    def jacobian_system(self) -> "CompiledSystem":
        if self._jac is None:
            self._jac = CompiledSystem(
                [p.partial(i) for p in self._polys for i in range(self.nvars)]
            )
        return self._jac

    def jacobian(self, pts) -> np.ndarray:
        """Jacobians with shape ``(K, m, n)`` (or ``(m, n)`` for a single point)."""
        arr = np.asarray(pts, dtype=complex)
        single = arr.ndim == 1
        vals = self.jacobian_system(np.atleast_2d(arr)).reshape(-1, self.size, self.nvars)
        return vals[0] if single else vals


def newton_batch(system: CompiledSystem, starts: np.ndarray, *, max_iter: int = 60,
                 tol: float = 1e-13, extra_rows=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched (Gauss-)Newton from many starts.

    ``extra_rows`` is an optional pair ``(A, b)`` of linear equations ``A x = b``
    appended to every system (used for random linear slices).

    Returns ``(points, residuals, converged)`` where residuals are relative
    to the coefficient scale of each equation.
    """
    x = np.array(starts, dtype=complex, copy=True)
    k, n = x.shape
    scale = np.maximum(system.scale, 1e-300)
    active = np.ones(k, dtype=bool)
    for _ in range(max_iter):
        if not active.any():
            break
        xa = x[active]
        f = system(xa)
        jac = system.jacobian(xa)
        if extra_rows is not None:
            a_mat, b_vec = extra_rows
            f = np.concatenate([f, xa @ a_mat.T - b_vec], axis=1)
            jac = np.concatenate([jac, np.broadcast_to(a_mat, (xa.shape[0],) + a_mat.shape)], axis=1)
        if jac.shape[1] == n:
            try:
                step = np.linalg.solve(jac, f[..., None])[..., 0]
            except np.linalg.LinAlgError:
                step = np.einsum("kij,kj->ki", np.linalg.pinv(jac), f)
        else:
            step = np.einsum("kij,kj->ki", np.linalg.pinv(jac), f)
        step = np.nan_to_num(step, nan=0.0, posinf=0.0, neginf=0.0)
        x[active] = xa - step
        small = np.linalg.norm(step, axis=1) <= tol * (1.0 + np.linalg.norm(xa, axis=1))
        blown = ~np.isfinite(x[active]).all(axis=1) | (np.abs(x[active]).max(axis=1) > 1e8)
        idx = np.flatnonzero(active)
        active[idx[small | blown]] = False
    x = np.where(np.isfinite(x), x, np.nan)
    with np.errstate(invalid="ignore", over="ignore"):
        f = system(np.nan_to_num(x))
        res = np.abs(f / scale).max(axis=1)
        if extra_rows is not None:
            a_mat, b_vec = extra_rows
            lin = np.abs(np.nan_to_num(x) @ a_mat.T - b_vec).max(axis=1)
            res = np.maximum(res, lin / (1 + np.abs(a_mat).sum(axis=1).max()))
    res = np.where(np.isfinite(x).all(axis=1), res, np.inf)
    return x, res, res < 1e-9


def random_polydisc(rng: np.random.Generator, count: int, dim: int, radius: float = 2.0) -> np.ndarray:
    """Points uniform in a complex polydisc."""
    r = radius * np.sqrt(rng.random((count, dim)))
    theta = 2 * np.pi * rng.random((count, dim))
    return r * np.exp(1j * theta)


def projective_normalize(z: np.ndarray) -> np.ndarray:
    """Scale so the largest-modulus coordinate (first among near-ties) equals 1."""
    z = np.asarray(z, dtype=complex)
    mags = np.abs(z)
    j = int(np.flatnonzero(mags >= mags.max() * (1 - 1e-6))[0])
    return z / z[j]


def projective_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Chordal (Fubini-Study sine) distance between two projective points."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    ip = abs(np.vdot(a, b)) / (na * nb)
    return float(np.sqrt(max(0.0, 1.0 - min(1.0, ip) ** 2)))


def dedupe_projective(points: Sequence[np.ndarray], radius: float = 1e-6) -> list[np.ndarray]:
    """Deterministic sequential merge of projectively equal points."""
    kept: list[np.ndarray] = []
    for p in points:
        if not any(projective_distance(p, q) < radius for q in kept):
            kept.append(projective_normalize(p))
    return kept


def dedupe_affine(points: Sequence[np.ndarray], radius: float = 1e-6) -> list[np.ndarray]:
    kept: list[np.ndarray] = []
    for p in points:
        if not any(np.linalg.norm(p - q) < radius * (1 + np.linalg.norm(q)) for q in kept):
            kept.append(np.asarray(p))
    return kept
