"""Exterior forms with values in a tagged coefficient space.

A form of degree r stores components ``(v, I) -> RatFn`` where ``v`` is a
value index of its :class:`ValueSpace` and ``I`` a strictly increasing
r-tuple of coordinate slots.  Only the normalized copy is kept; lookups
with an unsorted ``I`` pick up the permutation sign.

Value indices by kind:

* ``scalar``        -> ``0``
* ``lie(p)``        -> ``tau`` in ``range(p)``
* ``jet(n,m,q)``    -> ``(k, mu)`` with ``|mu| <= q``
* ``symbols(n,m,q)``-> ``(k, mu)`` with ``|mu| == q``
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple

from . import multiindex as mi
from .algebra import ZERO_R, RatFn, as_ratfn


class ValueSpaceError(TypeError):
    pass


@dataclass(frozen=True)
class ValueSpace:
    kind: str
    dims: Tuple[int, ...] = ()

    @classmethod
    def scalar(cls):
        return cls("scalar")

    @classmethod
    def lie(cls, p: int):
        return cls("lie", (p,))

    @classmethod
    def jet(cls, n: int, m: int, q: int):
        return cls("jet", (n, m, q))

    @classmethod
    def symbols(cls, n: int, m: int, q: int):
        return cls("symbols", (n, m, q))

    def indices(self):
        if self.kind == "scalar":
            return [0]
        if self.kind == "lie":
            return list(range(self.dims[0]))
        n, m, q = self.dims
        mus = mi.of_order(n, q) if self.kind == "symbols" else mi.up_to(n, q)
        return [(k, mu) for k in range(m) for mu in mus]

    def __str__(self):
        if self.kind == "scalar":
            return "scalar"
        return f"{self.kind}{self.dims}"


SCALAR = ValueSpace.scalar()


def sort_sign(idx) -> Tuple[int, Tuple[int, ...]]:
    """Sign of the sorting permutation and the sorted tuple (sign 0 on repeats)."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    # insertion sort counting transpositions
    for a in range(1, len(idx)):
        b = a
        while b > 0 and idx[b - 1] > idx[b]:
            idx[b - 1], idx[b] = idx[b], idx[b - 1]
            sign = -sign
            b -= 1
    return sign, tuple(idx)


class Form:
    __slots__ = ("space", "degree", "coords", "comps")

    def __init__(self, space: ValueSpace, degree: int, coords, comps=None):
        coords = tuple(coords)
        # degree above n is allowed only for the (empty) overflow zero form
        if degree < 0 or (degree > len(coords) and comps):
            raise ValueError(f"degree {degree} out of range for {len(coords)} coordinates")
        self.space = space
        self.degree = degree
        self.coords = coords
        clean: Dict[tuple, RatFn] = {}
        for (v, I), f in (comps or {}).items():
            f = as_ratfn(f)
            if f.is_zero():
                continue
            sign, J = sort_sign(I)
            if sign == 0:
                continue
            if len(J) != degree:
                raise ValueError(f"index {I} does not match degree {degree}")
            key = (v, J)
            val = f if sign > 0 else -f
            if key in clean:
                val = clean[key] + val
                if val.is_zero():
                    del clean[key]
                    continue
            clean[key] = val
        self.comps = clean

    @property
    def n(self) -> int:
        return len(self.coords)

    # -- constructors --------------------------------------------------------
    @classmethod
    def function(cls, coords, f, space: ValueSpace = SCALAR, v=0) -> "Form":
        return cls(space, 0, coords, {(v, ()): f})

    @classmethod
    def scalar(cls, coords, degree: int, comps: Dict[tuple, object]) -> "Form":
        return cls(SCALAR, degree, coords, {(0, I): f for I, f in comps.items()})

    @classmethod
    def dx(cls, coords, i: int) -> "Form":
        return cls(SCALAR, 1, coords, {(0, (i,)): 1})

    @classmethod
    def zero(cls, space: ValueSpace, degree: int, coords) -> "Form":
        return cls(space, degree, coords, {})

    @classmethod
    def lie_one_form(cls, coords, A) -> "Form":
        """Lie-valued 1-form from a p x n array ``A[tau][i]``."""
        p = len(A)
        return cls(ValueSpace.lie(p), 1, coords,
                   {(t, (i,)): A[t][i] for t in range(p) for i in range(len(coords))})

    # -- access ----------------------------------------------------------------
    def __getitem__(self, key) -> RatFn:
        v, I = key
        sign, J = sort_sign(I)
        if sign == 0:
            return ZERO_R
        f = self.comps.get((v, J), ZERO_R)
        return f if sign > 0 else -f

    def is_zero(self) -> bool:
        return not self.comps

    def component_forms(self):
        """Split into scalar forms, one per value index present."""
        out: Dict[object, Dict[tuple, RatFn]] = {}
        for (v, I), f in self.comps.items():
            out.setdefault(v, {})[I] = f
        return {v: Form.scalar(self.coords, self.degree, c) for v, c in out.items()}

    def map(self, fn) -> "Form":
        return Form(self.space, self.degree, self.coords, {k: fn(f) for k, f in self.comps.items()})

    # -- linear structure ---------------------------------------------------------
    def _check(self, other: "Form"):
        if not isinstance(other, Form):
            raise TypeError("expected a Form")
        if other.space != self.space:
            raise ValueSpaceError(f"value spaces differ: {self.space} vs {other.space}")
        if other.degree != self.degree or other.coords != self.coords:
            raise ValueError("forms differ in degree or coordinates")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        comps = dict(self.comps)
        for k, f in other.comps.items():
            comps[k] = comps[k] + f if k in comps else f
        return Form(self.space, self.degree, self.coords, comps)

    def __neg__(self) -> "Form":
        return self.map(lambda f: -f)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, c) -> "Form":
        c = as_ratfn(c)
        return self.map(lambda f: f * c)

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return (self.space == other.space and self.degree == other.degree
                and self.coords == other.coords and self.comps == other.comps)

    def __hash__(self):
        return hash((self.space, self.degree, self.coords, frozenset(self.comps.items())))

    def __str__(self):
        if not self.comps:
            return "0"
        parts = []
        for (v, I), f in sorted(self.comps.items(), key=lambda kv: (str(kv[0][0]), kv[0][1])):
            basis = "^".join(f"d{self.coords[i]}" for i in I)
            tag = "" if self.space.kind == "scalar" else f"[{v}]"
            coef = str(f)
            if basis:
                coef = f"({coef})" if any(ch in coef for ch in "+-/") else coef
                parts.append(f"{tag}{coef} {basis}")
            else:
                parts.append(f"{tag}{coef}")
        return " + ".join(parts)

    __repr__ = __str__


def wedge(alpha: Form, beta: Form) -> Form:
    """Exterior product; at least one factor must be scalar-valued.

    Degree overflow (r + s > n) yields the zero form.
    """
    if alpha.coords != beta.coords:
        raise ValueError("forms live on different coordinates")
    if alpha.space.kind != "scalar" and beta.space.kind != "scalar":
        raise ValueSpaceError("valued ^ valued is only defined through a bracket")
    space = beta.space if alpha.space.kind == "scalar" else alpha.space
    deg = alpha.degree + beta.degree
    if deg > alpha.n:
        return Form(space, deg, alpha.coords, {})
    comps: Dict[tuple, RatFn] = {}
    for (va, I), f in alpha.comps.items():
        for (vb, J), g in beta.comps.items():
            sign, K = sort_sign(I + J)
            if not sign:
                continue
            v = vb if alpha.space.kind == "scalar" else va
            t = f * g
            key = (v, K)
            t = t if sign > 0 else -t
            comps[key] = comps[key] + t if key in comps else t
    return Form(space, deg, alpha.coords, comps)


def ext_d(alpha: Form) -> Form:
    """Exterior derivative, applied componentwise in the value space."""
    n = alpha.n
    if alpha.degree == n:
        return Form(alpha.space, n + 1, alpha.coords, {})
    comps: Dict[tuple, RatFn] = {}
    for (v, I), f in alpha.comps.items():
        for i, x in enumerate(alpha.coords):
            if i in I:
                continue
            df = f.derive(x)
            if df.is_zero():
                continue
            sign, K = sort_sign((i,) + I)
            key = (v, K)
            t = df if sign > 0 else -df
            comps[key] = comps[key] + t if key in comps else t
    return Form(alpha.space, alpha.degree + 1, alpha.coords, comps)


def _lie_dim(form: Form) -> int:
    if form.space.kind != "lie":
        raise ValueSpaceError(f"expected a lie-valued form, got {form.space}")
    return form.space.dims[0]


def valued_bracket(A: Form, B: Form, c) -> Form:
    """[A,B]^t_ij = 1/2 c^t_rs (A^r_i B^s_j - A^r_j B^s_i) for lie-valued 1-forms.

    With this normalization [A,A]^t_ij = c^t_rs A^r_i A^s_j, so the curvature
    reads F = dA - [A,A].
    """
    p = _lie_dim(A)
    if _lie_dim(B) != p or c.p != p:
        raise ValueError("Lie algebra dimensions differ")
    if A.degree != 1 or B.degree != 1:
        raise ValueError("valued_bracket expects 1-forms")
    n = A.n
    half = Fraction(1, 2)
    comps: Dict[tuple, RatFn] = {}
    for (t, r, s), cv in c.nonzero():
        for i, j in mi.increasing(n, 2):
            val = A[(r, (i,))] * B[(s, (j,))] - A[(r, (j,))] * B[(s, (i,))]
            if val.is_zero():
                continue
            val = val * (cv * half)
            key = (t, (i, j))
            comps[key] = comps[key] + val if key in comps else val
    return Form(A.space, 2, A.coords, comps)


def delta_terms(n: int, k: int, nu, I):
    """Image of the basis element dx^I (x) e^k_nu under the Spencer map.

    Yields ``(sign, (k, mu), J)`` with ``J`` increasing.
    """
    for i in range(n):
        if nu[i] == 0 or i in I:
            continue
        sign, J = sort_sign((i,) + tuple(I))
        yield sign, (k, mi.sub_unit(nu, i)), J


def spencer_delta(omega: Form) -> Form:
    """(delta w)^k_mu = dx^i ^ w^k_{mu+1_i}, from S_{q+1} to S_q values."""
    if omega.space.kind != "symbols":
        raise ValueSpaceError(f"spencer_delta needs a symbols-valued form, got {omega.space}")
    n, m, q1 = omega.space.dims
    if q1 < 1:
        raise ValueSpaceError("spencer_delta needs symbols of order >= 1")
    if omega.degree == n:
        return Form(ValueSpace.symbols(n, m, q1 - 1), n + 1, omega.coords, {})
    comps: Dict[tuple, RatFn] = {}
    for ((k, nu), I), f in omega.comps.items():
        for sign, v, J in delta_terms(n, k, nu, I):
            key = (v, J)
            t = f if sign > 0 else -f
            comps[key] = comps[key] + t if key in comps else t
    return Form(ValueSpace.symbols(n, m, q1 - 1), omega.degree + 1, omega.coords, comps)


__all__ = [
    "ValueSpace", "ValueSpaceError", "SCALAR", "Form", "wedge", "ext_d",
    "valued_bracket", "spencer_delta", "delta_terms", "sort_sign",
]
