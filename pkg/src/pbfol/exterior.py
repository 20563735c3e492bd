"""Polynomial differential forms, multivectors and vector fields.

Sign conventions (fixed once, used everywhere):

* ``i_v`` contracts the first slot:
  ``i_v(dx_{i_1}^...^dx_{i_k}) = sum_s (-1)^s v_{i_s} dx_{I without i_s}``.
* A multivector ``w_1^...^w_k`` contracts as ``i_{w_1} i_{w_2} ... i_{w_k}``,
  so ``i_{R^X} = i_R i_X`` and the dual of ``i_R i_X dvol`` is ``R^X``.
* ``dvol = dx_0^...^dx_{n-1}``; the rotational of an ``(n-2)``-form ``a`` is
  the field ``Z`` with ``da = i_Z dvol``.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .ring import Poly, homogeneous_degree, ANY_DEGREE, NOT_HOMOGENEOUS


def _merge_sign(a: tuple[int, ...], b: tuple[int, ...]):
    """Sign and sorted union of two disjoint index tuples, or ``(0, None)``."""
    if set(a) & set(b):
        return 0, None
    inversions = sum(1 for x in a for y in b if x > y)
    return (-1 if inversions & 1 else 1), tuple(sorted(a + b))


class _Alternating:
    """Shared storage/algebra for k-forms and k-vectors: ``{index tuple: Poly}``."""

    __slots__ = ("nvars", "degree", "_c")

    def __init__(self, nvars: int, degree: int, components: Mapping[tuple, Poly] | None = None):
        if not 0 <= degree:
            raise ValueError("degree must be non-negative")
        self.nvars = nvars
        self.degree = degree
        c = {}
        for idx, p in (components or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or any(i < 0 or i >= nvars for i in idx):
                raise ValueError(f"bad index tuple {idx} for degree {degree} in {nvars} variables")
            if list(idx) != sorted(set(idx)):
                raise ValueError(f"index tuple {idx} must be strictly increasing")
            if p.nvars != nvars:
                raise ValueError("component has the wrong variable count")
            if not p.is_zero():
                c[idx] = p
        self._c = c

    @classmethod
    def _raw(cls, nvars, degree, comps):
        obj = cls.__new__(cls)
        obj.nvars, obj.degree = nvars, degree
        obj._c = {k: v for k, v in comps.items() if not v.is_zero()}
        return obj

    @property
    def components(self) -> dict[tuple, Poly]:
        return dict(sorted(self._c.items()))

    def __getitem__(self, idx) -> Poly:
        return self._c.get(tuple(idx), Poly(self.nvars))

    def is_zero(self) -> bool:
        return not self._c

    def _check(self, other):
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.nvars != self.nvars:
            raise ValueError("dimension mismatch")

    def __add__(self, other):
        self._check(other)
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        out = dict(self._c)
        for k, v in other._c.items():
            out[k] = out[k] + v if k in out else v
        return self._raw(self.nvars, self.degree, out)

    def __neg__(self):
        return self._raw(self.nvars, self.degree, {k: -v for k, v in self._c.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f) -> "_Alternating":
        """Multiply every component by a scalar or a Poly."""
        return self._raw(self.nvars, self.degree, {k: v * f for k, v in self._c.items()})

    def __mul__(self, f):
        return self.scale(f)

    __rmul__ = __mul__

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return (self.nvars, self.degree, self._c) == (other.nvars, other.degree, other._c)

    def __hash__(self):
        return hash((type(self).__name__, self.nvars, self.degree, frozenset(self._c.items())))

    def wedge(self, other):
        self._check(other)
        deg = self.degree + other.degree
        out: dict[tuple, Poly] = {}
        if deg > self.nvars:
            return self._raw(self.nvars, deg, {})
        for i1, p1 in self._c.items():
            for i2, p2 in other._c.items():
                s, idx = _merge_sign(i1, i2)
                if not s:
                    continue
                term = p1 * p2
                if s < 0:
                    term = -term
                out[idx] = out[idx] + term if idx in out else term
        return self._raw(self.nvars, deg, out)

    __xor__ = wedge

    def map(self, fn) -> "_Alternating":
        return self._raw(self.nvars, self.degree, {k: fn(v) for k, v in self._c.items()})

    def coefficient_degree(self):
        """Common homogeneous degree of the components (``ANY_DEGREE`` for zero)."""
        degs = {homogeneous_degree(p) for p in self._c.values()}
        if not degs:
            return ANY_DEGREE
        if len(degs) == 1:
            return degs.pop()
        return NOT_HOMOGENEOUS

    def __repr__(self):
        name = type(self).__name__
        body = ", ".join(f"{k}: {v}" for k, v in sorted(self._c.items()))
        return f"{name}(n={self.nvars}, k={self.degree}, {{{body}}})"

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "degree": self.degree,
            "components": [{"idx": list(k), "poly": v.to_json()} for k, v in sorted(self._c.items())],
        }

    @classmethod
    def from_json(cls, obj):
        comps = {tuple(c["idx"]): Poly.from_json(c["poly"]) for c in obj["components"]}
        return cls(int(obj["nvars"]), int(obj["degree"]), comps)


class KForm(_Alternating):
    """Polynomial k-form ``sum_I a_I dx_I``."""

    __slots__ = ()

    @classmethod
    def zero(cls, nvars: int, degree: int) -> "KForm":
        return cls._raw(nvars, degree, {})

    @classmethod
    def function(cls, p: Poly) -> "KForm":
        return cls._raw(p.nvars, 0, {(): p})

    @classmethod
    def dx(cls, nvars: int, *idx: int) -> "KForm":
        """Constant form ``dx_{i_1}^...^dx_{i_k}`` (indices in any order)."""
        s, sorted_idx = 1, ()
        for i in idx:
            s2, sorted_idx2 = _merge_sign(sorted_idx, (i,))
            if not s2:
                return cls.zero(nvars, len(idx))
            s, sorted_idx = s * s2, sorted_idx2
        return cls._raw(nvars, len(idx), {sorted_idx: Poly.const(nvars, s)})

    @classmethod
    def volume(cls, nvars: int) -> "KForm":
        return cls.dx(nvars, *range(nvars))


class MultiVector(_Alternating):
    """Polynomial k-vector ``sum_I P_I d_I`` with ``d_I = d_{i_1}^...^d_{i_k}``."""

    __slots__ = ()

    @classmethod
    def from_fields(cls, *fields: "VectorField") -> "MultiVector":
        out = cls._raw(fields[0].nvars, 0, {(): Poly.const(fields[0].nvars, 1)})
        for v in fields:
            out = out.wedge(cls._raw(v.nvars, 1, {(i,): c for i, c in enumerate(v.components)}))
        return out


class VectorField:
    """Polynomial vector field ``sum_i P_i d/dx_i``."""

    __slots__ = ("nvars", "components")

    def __init__(self, components: Sequence[Poly]):
        comps = tuple(components)
        if not comps:
            raise ValueError("empty vector field")
        n = len(comps)
        if any(p.nvars != n for p in comps):
            raise ValueError("components must be polynomials in as many variables as the field has components")
        self.nvars = n
        self.components = comps

    @classmethod
    def zero(cls, n: int) -> "VectorField":
        return cls([Poly(n)] * n)

    @classmethod
    def coordinate(cls, n: int, j: int, coeff: Poly | None = None) -> "VectorField":
        """``coeff * d/dx_j``."""
        coeff = Poly.const(n, 1) if coeff is None else coeff
        return cls([coeff if i == j else Poly(n) for i in range(n)])

    def __getitem__(self, i) -> Poly:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return self.nvars

    def _check(self, other):
        if not isinstance(other, VectorField):
            raise TypeError("expected a VectorField")
        if other.nvars != self.nvars:
            raise ValueError("dimension mismatch")

    def __add__(self, other):
        self._check(other)
        return VectorField([a + b for a, b in zip(self, other)])

    def __sub__(self, other):
        self._check(other)
        return VectorField([a - b for a, b in zip(self, other)])

    def __neg__(self):
        return VectorField([-a for a in self])

    def scale(self, f) -> "VectorField":
        return VectorField([a * f for a in self])

    __mul__ = scale
    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self)

    def apply(self, f: Poly) -> Poly:
        """Derivation ``v(f) = sum v_i df/dx_i``."""
        out = Poly(self.nvars)
        for i, vi in enumerate(self):
            if not vi.is_zero():
                out = out + vi * f.partial(i)
        return out

    def degree(self):
        """Common homogeneous degree of the nonzero components."""
        degs = {homogeneous_degree(p) for p in self if not p.is_zero()}
        if not degs:
            return ANY_DEGREE
        if len(degs) == 1:
            return degs.pop()
        return NOT_HOMOGENEOUS

    def as_multivector(self) -> MultiVector:
        return MultiVector._raw(self.nvars, 1, {(i,): c for i, c in enumerate(self)})

    def __repr__(self):
        return "VectorField(" + ", ".join(str(p) for p in self) + ")"

    def to_json(self) -> dict:
        return {"nvars": self.nvars, "components": [p.to_json() for p in self]}

    @classmethod
    def from_json(cls, obj) -> "VectorField":
        comps = [Poly.from_json(p) for p in obj["components"]]
        if int(obj["nvars"]) != len(comps):
            raise ValueError("nvars does not match the number of components")
        return cls(comps)


# ----------------------------------------------------------------------
# operations
# ----------------------------------------------------------------------


def wedge(a: KForm, b: KForm) -> KForm:
    return a.wedge(b)


def exterior_derivative(a: KForm) -> KForm:
    if a.degree >= a.nvars:
        raise ValueError("exterior derivative of a top-degree form is not represented")
    out: dict[tuple, Poly] = {}
    for idx, p in a._c.items():
        for j in range(a.nvars):
            if j in idx:
                continue
            dp = p.partial(j)
            if dp.is_zero():
                continue
            s, new = _merge_sign((j,), idx)
            term = dp if s > 0 else -dp
            out[new] = out[new] + term if new in out else term
    return KForm._raw(a.nvars, a.degree + 1, out)


def interior_product(v: VectorField, a: _Alternating) -> _Alternating:
    """Contraction of the first slot of a form (or of a multivector by a 1-form field)."""
    if v.nvars != a.nvars:
        raise ValueError("dimension mismatch")
    if a.degree < 1:
        raise ValueError("interior product of a degree-0 object")
    out: dict[tuple, Poly] = {}
    for idx, p in a._c.items():
        for s, i in enumerate(idx):
            vi = v.components[i]
            if vi.is_zero():
                continue
            term = vi * p
            if s & 1:
                term = -term
            rest = idx[:s] + idx[s + 1 :]
            out[rest] = out[rest] + term if rest in out else term
    return type(a)._raw(a.nvars, a.degree - 1, out)


def contract_multivector(w: MultiVector, a: KForm) -> KForm:
    """``i_w a`` with ``i_{w_1^...^w_k} = i_{w_1} ... i_{w_k}``."""
    if w.nvars != a.nvars:
        raise ValueError("dimension mismatch")
    k = w.degree
    if k > a.degree:
        raise ValueError("multivector degree exceeds form degree")
    n = a.nvars
    out = KForm._raw(n, a.degree - k, {})
    for idx, coeff in w._c.items():
        part = a
        for i in reversed(idx):
            part = interior_product(VectorField.coordinate(n, i), part)
        out = out + part.scale(coeff)
    return out


def lie_bracket(a: VectorField, b: VectorField) -> VectorField:
    """``[a,b]_i = sum_j (a_j d_j b_i - b_j d_j a_i)``."""
    if a.nvars != b.nvars:
        raise ValueError("dimension mismatch")
    return VectorField([a.apply(bi) - b.apply(ai) for ai, bi in zip(a, b)])


def divergence(a: VectorField) -> Poly:
    out = Poly(a.nvars)
    for i, p in enumerate(a):
        out = out + p.partial(i)
    return out


def lie_derivative(v: VectorField, a: KForm) -> KForm:
    """Cartan formula ``L_v a = i_v da + d i_v a``."""
    if v.nvars != a.nvars:
        raise ValueError("dimension mismatch")
    if a.degree == 0:
        return KForm.function(v.apply(a[()])) if not a.is_zero() else a
    out = exterior_derivative(interior_product(v, a))
    if a.degree < a.nvars:
        out = out + interior_product(v, exterior_derivative(a))
    return out


def radial_field(n: int) -> VectorField:
    if n < 1:
        raise ValueError("n must be positive")
    return VectorField([Poly.var(n, i) for i in range(n)])


def _complement(idx: Iterable[int], n: int) -> tuple[int, ...]:
    s = set(idx)
    return tuple(i for i in range(n) if i not in s)


def _volume_sign(idx: tuple[int, ...], n: int) -> int:
    """Sign ``e`` with ``i_{d_I} dvol = e * dx_{complement(I)}``."""
    form = KForm.volume(n)
    for i in reversed(idx):
        form = interior_product(VectorField.coordinate(n, i), form)
    (coeff,) = form._c.values()
    return 1 if coeff == 1 else -1


def multivector_to_form(w: MultiVector) -> KForm:
    """``i_w dvol``."""
    n = w.nvars
    out = {}
    for idx, p in w._c.items():
        s = _volume_sign(idx, n)
        out[_complement(idx, n)] = p if s > 0 else -p
    return KForm._raw(n, n - w.degree, out)


def form_to_multivector(a: KForm) -> MultiVector:
    """Inverse of :func:`multivector_to_form`: the unique ``w`` with ``i_w dvol = a``."""
    n = a.nvars
    out = {}
    for idx, p in a._c.items():
        comp = _complement(idx, n)
        s = _volume_sign(comp, n)
        out[comp] = p if s > 0 else -p
    return MultiVector._raw(n, n - a.degree, out)


def bivector_dual(a: KForm) -> MultiVector:
    if a.degree != a.nvars - 2:
        raise ValueError(f"bivector dual needs an (n-2)-form, got degree {a.degree} in {a.nvars} variables")
    return form_to_multivector(a)


def bivector_dual_inverse(p: MultiVector) -> KForm:
    if p.degree != 2:
        raise ValueError("expected a bivector")
    return multivector_to_form(p)


def contract_covector(df: Sequence[Poly], w: MultiVector) -> _Alternating:
    """``i_{df} w`` for a 1-form with components ``df`` acting on the first slot of ``w``."""
    return interior_product(VectorField(list(df)), w)


def rotational(a: KForm) -> VectorField:
    """The field ``Z`` with ``da = i_Z dvol`` for an ``(n-2)``-form ``a``."""
    n = a.nvars
    if a.degree != n - 2:
        raise ValueError(f"rotational needs an (n-2)-form, got degree {a.degree} in {n} variables")
    da = exterior_derivative(a)
    w = form_to_multivector(da)
    return VectorField([w[(i,)] for i in range(n)])


def basis_multivectors(n: int, k: int) -> list[MultiVector]:
    return [
        MultiVector._raw(n, k, {idx: Poly.const(n, 1)}) for idx in combinations(range(n), k)
    ]


def gradient(f: Poly) -> list[Poly]:
    return [f.partial(i) for i in range(f.nvars)]


def differential(f: Poly) -> KForm:
    return KForm._raw(f.nvars, 1, {(i,): f.partial(i) for i in range(f.nvars)})
