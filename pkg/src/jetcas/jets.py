"""Jet sections, the linear Spencer operator, brackets and the jet groupoid.

Jet components are stored as values ``xi^k_mu`` (derivative values, not
Taylor coefficients).  Composition, inversion and the action of map jets on
vector-field jets go through truncated Taylor series whose coefficients are
``value / mu!``; a series is a dict ``{mu: RatFn}``.
"""
from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from . import multiindex as mi
from .algebra import ONE_R, ZERO_R, RatFn, as_ratfn, derive_multi
from .forms import Form, ValueSpace
from .linalg import SingularMatrixError, det, inverse

Key = Tuple[int, mi.MultiIndex]


def default_coords(n: int, stem: str = "x") -> Tuple[str, ...]:
    return tuple(f"{stem}{i + 1}" for i in range(n))


def jet_dims(n: int, m: int, q: int) -> Tuple[int, int]:
    """(dim S_q T* (x) E, dim J_q(E)) for dim E = m."""
    if n < 1 or m < 1 or q < 0:
        raise ValueError("need n >= 1, m >= 1, q >= 0")
    return m * mi.sym_dim(n, q), m * mi.jet_dim(n, q)


class JetSection:
    """Section xi_q of J_q(E) with components xi^k_mu, |mu| <= q."""

    __slots__ = ("n", "m", "q", "coords", "comps")

    def __init__(self, n: int, m: int, q: int, comps=None, coords=None):
        self.n, self.m, self.q = n, m, q
        self.coords = tuple(coords) if coords is not None else default_coords(n)
        if len(self.coords) != n:
            raise ValueError("coordinate count does not match n")
        clean: Dict[Key, RatFn] = {}
        for (k, mu), f in (comps or {}).items():
            mu = tuple(mu)
            if len(mu) != n or sum(mu) > q or not 0 <= k < m:
                raise ValueError(f"component {(k, mu)} outside J_{q} with n={n}, m={m}")
            f = as_ratfn(f)
            if not f.is_zero():
                clean[(k, mu)] = f
        self.comps = clean

    # -- construction ----------------------------------------------------------
    @classmethod
    def holonomic(cls, fields: Sequence, q: int, coords=None) -> "JetSection":
        """j_q of a section given by its components (RatFn or strings)."""
        fields = [as_ratfn(f) for f in fields]
        n = len(coords) if coords is not None else len(fields)
        coords = tuple(coords) if coords is not None else default_coords(n)
        comps = {}
        for k, f in enumerate(fields):
            for mu in mi.up_to(n, q):
                comps[(k, mu)] = derive_multi(f, coords, mu)
        return cls(n, len(fields), q, comps, coords)

    @classmethod
    def zero(cls, n, m, q, coords=None) -> "JetSection":
        return cls(n, m, q, {}, coords)

    def keys(self):
        return [(k, mu) for k in range(self.m) for mu in mi.up_to(self.n, self.q)]

    def __getitem__(self, key) -> RatFn:
        k, mu = key
        return self.comps.get((k, tuple(mu)), ZERO_R)

    def order0(self) -> List[RatFn]:
        z = mi.zero(self.n)
        return [self[(k, z)] for k in range(self.m)]

    def signature(self):
        return (self.n, self.m, self.q)

    def project(self, q: int) -> "JetSection":
        if q > self.q:
            raise ValueError("cannot project to a higher order")
        return JetSection(self.n, self.m, q,
                          {key: f for key, f in self.comps.items() if sum(key[1]) <= q}, self.coords)

    def lift(self, extra: Optional[Dict[Key, RatFn]] = None) -> "JetSection":
        """Order q+1 lift; strict order q+1 components default to zero."""
        comps = dict(self.comps)
        for (k, mu), f in (extra or {}).items():
            if sum(mu) != self.q + 1:
                raise ValueError("lift data must have strict order q+1")
            comps[(k, tuple(mu))] = as_ratfn(f)
        return JetSection(self.n, self.m, self.q + 1, comps, self.coords)

    def _like(self, other: "JetSection"):
        if self.signature() != other.signature() or self.coords != other.coords:
            raise ValueError("jet sections have different signatures")

    def __add__(self, other: "JetSection") -> "JetSection":
        self._like(other)
        comps = dict(self.comps)
        for key, f in other.comps.items():
            comps[key] = comps[key] + f if key in comps else f
        return JetSection(self.n, self.m, self.q, comps, self.coords)

    def __neg__(self):
        return JetSection(self.n, self.m, self.q, {k: -f for k, f in self.comps.items()}, self.coords)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "JetSection":
        c = as_ratfn(c)
        return JetSection(self.n, self.m, self.q, {k: f * c for k, f in self.comps.items()}, self.coords)

    def is_zero(self) -> bool:
        return not self.comps

    def __eq__(self, other):
        if not isinstance(other, JetSection):
            return NotImplemented
        return (self.signature() == other.signature() and self.coords == other.coords
                and self.comps == other.comps)

    def __hash__(self):
        return hash((self.signature(), self.coords, frozenset(self.comps.items())))

    def subs(self, mapping) -> "JetSection":
        return JetSection(self.n, self.m, self.q, {k: f.subs(mapping) for k, f in self.comps.items()},
                          self.coords)

    def __str__(self):
        parts = []
        for key in self.keys():
            f = self[key]
            if f:
                k, mu = key
                parts.append(f"xi^{k + 1}_{mi.label(mu, self.coords) or '0'} = {f}")
        return "; ".join(parts) if parts else "0"

    __repr__ = __str__


class JetMapSection:
    """Section f_q of Pi_q: components f^k_mu over source coordinates.

    ``tgt`` names the target coordinates, needed when a jet over the target
    is composed with this one.
    """

    __slots__ = ("n", "q", "src", "tgt", "comps", "_jinv")

    def __init__(self, n: int, q: int, comps, src=None, tgt=None, check: bool = True):
        self.n, self.q = n, q
        self.src = tuple(src) if src is not None else default_coords(n)
        self.tgt = tuple(tgt) if tgt is not None else default_coords(n, "y")
        clean: Dict[Key, RatFn] = {}
        for (k, mu), f in comps.items():
            mu = tuple(mu)
            if len(mu) != n or sum(mu) > q or not 0 <= k < n:
                raise ValueError(f"component {(k, mu)} outside Pi_{q} with n={n}")
            f = as_ratfn(f)
            if not f.is_zero():
                clean[(k, mu)] = f
        self.comps = clean
        self._jinv = None
        if check and q >= 1 and det(self.jacobian(), one=ONE_R).is_zero():
            raise SingularMatrixError("det(f^k_i) vanishes identically")

    @classmethod
    def identity(cls, n: int, q: int, src=None, tgt=None) -> "JetMapSection":
        src = tuple(src) if src is not None else default_coords(n)
        comps = {(k, mi.zero(n)): RatFn.var(src[k]) for k in range(n)}
        if q >= 1:
            for k in range(n):
                comps[(k, mi.unit(n, k))] = ONE_R
        return cls(n, q, comps, src, tgt if tgt is not None else src, check=False)

    def __getitem__(self, key) -> RatFn:
        k, mu = key
        return self.comps.get((k, tuple(mu)), ZERO_R)

    def base(self) -> List[RatFn]:
        z = mi.zero(self.n)
        return [self[(k, z)] for k in range(self.n)]

    def jacobian(self) -> List[List[RatFn]]:
        """The order-1 block f^k_i as a matrix [k][i]."""
        return [[self[(k, mi.unit(self.n, i))] for i in range(self.n)] for k in range(self.n)]

    def jacobian_inverse(self) -> List[List[RatFn]]:
        if self._jinv is None:
            self._jinv = inverse(self.jacobian(), one=ONE_R, zero=ZERO_R)
        return self._jinv

    def project(self, q: int) -> "JetMapSection":
        return JetMapSection(self.n, q, {k: f for k, f in self.comps.items() if sum(k[1]) <= q},
                             self.src, self.tgt, check=False)

    def as_section(self) -> JetSection:
        return JetSection(self.n, self.n, self.q, self.comps, self.src)

    def keys(self):
        return [(k, mu) for k in range(self.n) for mu in mi.up_to(self.n, self.q)]

    def __eq__(self, other):
        if not isinstance(other, JetMapSection):
            return NotImplemented
        return (self.n, self.q, self.src, self.tgt, self.comps) == \
            (other.n, other.q, other.src, other.tgt, other.comps)

    def __hash__(self):
        return hash((self.n, self.q, self.src, self.tgt, frozenset(self.comps.items())))

    def __str__(self):
        parts = []
        for k, mu in self.keys():
            f = self[(k, mu)]
            if f:
                parts.append(f"f^{k + 1}_{mi.label(mu, self.src) or '0'} = {f}")
        return "; ".join(parts)

    __repr__ = __str__


# -- vector fields ----------------------------------------------------------------

def vf_bracket(xi: Sequence, eta: Sequence, coords) -> List[RatFn]:
    """([xi,eta])^i = xi^r d_r eta^i - eta^r d_r xi^i."""
    xi = [as_ratfn(a) for a in xi]
    eta = [as_ratfn(a) for a in eta]
    out = []
    for i in range(len(xi)):
        acc = ZERO_R
        for r, x in enumerate(coords):
            acc = acc + xi[r] * eta[i].derive(x) - eta[r] * xi[i].derive(x)
        out.append(acc)
    return out


# -- Spencer operator and brackets -------------------------------------------------

def spencer_D(xi: JetSection) -> Form:
    """(D xi)^k_{mu,i} = d_i xi^k_mu - xi^k_{mu+1_i}, a 1-form valued in J_{q-1}."""
    if xi.q < 1:
        raise ValueError("spencer_D needs order >= 1")
    n, q = xi.n, xi.q - 1
    comps = {}
    for k in range(xi.m):
        for mu in mi.up_to(n, q):
            f = xi[(k, mu)]
            for i, x in enumerate(xi.coords):
                comps[((k, mu), (i,))] = f.derive(x) - xi[(k, mi.add_unit(mu, i))]
    return Form(ValueSpace.jet(n, xi.m, q), 1, xi.coords, comps)


def _check_tangent(xi: JetSection, eta: JetSection):
    xi._like(eta)
    if xi.m != xi.n:
        raise ValueError("brackets need sections of J_q(T) (m = n)")


def algebraic_bracket(xi: JetSection, eta: JetSection) -> JetSection:
    """{xi_{q+1}, eta_{q+1}} in J_q(T), the bilinear Leibniz extension."""
    _check_tangent(xi, eta)
    n, q = xi.n, xi.q - 1
    if q < 0:
        raise ValueError("algebraic bracket needs order >= 1")
    comps = {}
    for k in range(n):
        for mu in mi.up_to(n, q):
            acc = ZERO_R
            for lam, nu in mi.iter_pairs(mu):
                c = mi.binom(mu, lam)
                for r in range(n):
                    t = xi[(r, lam)] * eta[(k, mi.add_unit(nu, r))] - eta[(r, lam)] * xi[(k, mi.add_unit(nu, r))]
                    if t:
                        acc = acc + t * c
            comps[(k, mu)] = acc
    return JetSection(n, n, q, comps, xi.coords)


def contract_D(xi: JetSection, D: Form, q: int) -> JetSection:
    """i(xi) D: component (k, mu) is xi^i (D)^k_{mu,i}."""
    comps = {}
    base = xi.order0()
    m = D.space.dims[1]
    for k in range(m):
        for mu in mi.up_to(xi.n, q):
            acc = ZERO_R
            for i in range(xi.n):
                if base[i]:
                    acc = acc + base[i] * D[((k, mu), (i,))]
            comps[(k, mu)] = acc
    return JetSection(xi.n, m, q, comps, xi.coords)


def _resolve_lift(s: JetSection, lift: Optional[JetSection]) -> JetSection:
    if lift is None:
        return s.lift()
    if lift.q != s.q + 1 or lift.project(s.q) != s:
        raise ValueError("lift does not project onto the given section")
    return lift


def differential_bracket(xi: JetSection, eta: JetSection, lifts=None) -> JetSection:
    """[xi_q, eta_q] = {xi_{q+1}, eta_{q+1}} + i(xi) D eta_{q+1} - i(eta) D xi_{q+1}."""
    _check_tangent(xi, eta)
    lx, le = (None, None) if lifts is None else lifts
    xi1 = _resolve_lift(xi, lx)
    eta1 = _resolve_lift(eta, le)
    q = xi.q
    out = algebraic_bracket(xi1, eta1)
    out = out + contract_D(xi, spencer_D(eta1), q) - contract_D(eta, spencer_D(xi1), q)
    return out


# -- truncated Taylor series ------------------------------------------------------

def to_series(values: Dict[mi.MultiIndex, RatFn]) -> Dict[mi.MultiIndex, RatFn]:
    out = {}
    for mu, f in values.items():
        if f:
            out[mu] = f / mi.mfactorial(mu) if sum(mu) > 1 else f
    return out


def from_series(series: Dict[mi.MultiIndex, RatFn], n: int, q: int) -> Dict[mi.MultiIndex, RatFn]:
    return {mu: series[mu] * mi.mfactorial(mu) for mu in mi.up_to(n, q) if mu in series}


def series_mul(a, b, q: int):
    out: Dict[mi.MultiIndex, RatFn] = {}
    for mu, x in a.items():
        dm = sum(mu)
        for nu, y in b.items():
            if dm + sum(nu) > q:
                continue
            key = mi.add(mu, nu)
            t = x * y
            out[key] = out[key] + t if key in out else t
    return {k: v for k, v in out.items() if v}


def series_add(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out[k] + v if k in out else v
    return {k: v for k, v in out.items() if v}


def series_scale(a, c):
    return {k: v * c for k, v in a.items() if v}


def series_compose(G: List[dict], U: List[dict], n_out: int, q: int) -> List[dict]:
    """G_k(U(h)) truncated at order q; each U_i must have no constant term."""
    powers: Dict[mi.MultiIndex, dict] = {mi.zero(len(U)): {mi.zero(n_out): ONE_R}}

    def power(nu):
        if nu in powers:
            return powers[nu]
        i = mi.first_slot(nu)
        p = series_mul(power(mi.sub_unit(nu, i)), U[i], q)
        powers[nu] = p
        return p

    out = []
    for g in G:
        acc: Dict[mi.MultiIndex, RatFn] = {}
        for nu, c in g.items():
            if sum(nu) > q:
                continue
            acc = series_add(acc, series_scale(power(nu), c))
        out.append(acc)
    return out


def _map_series(f: JetMapSection, q: int, drop_const: bool = True):
    z = mi.zero(f.n)
    out = []
    for k in range(f.n):
        vals = {mu: f[(k, mu)] for mu in mi.up_to(f.n, q) if not (drop_const and mu == z)}
        out.append(to_series(vals))
    return out


def _inverse_series(f: JetMapSection, q: int) -> List[dict]:
    """Series G(u) over the source point with F(G(u)) - f(x) = u, to order q."""
    n = f.n
    L_inv = f.jacobian_inverse()
    F = _map_series(f, q)
    # nonlinear part of F
    N = [{mu: c for mu, c in s.items() if sum(mu) >= 2} for s in F]
    lin = [{mi.unit(n, j): L_inv[i][j] for j in range(n) if L_inv[i][j]} for i in range(n)]
    G = lin
    for _ in range(q - 1):
        NG = series_compose(N, G, n, q)
        G = []
        for i in range(n):
            acc = dict(lin[i])
            for j in range(n):
                if L_inv[i][j] and NG[j]:
                    acc = series_add(acc, series_scale(NG[j], -L_inv[i][j]))
            G.append(acc)
    return G


def _check_base_inverse(f: JetMapSection, ginv: Sequence):
    ginv = [as_ratfn(g) for g in ginv]
    if len(ginv) != f.n:
        raise ValueError("base inverse has the wrong arity")
    back = {x: g for x, g in zip(f.src, ginv)}
    for k, fk in enumerate(f.base()):
        if fk.subs(back) != RatFn.var(f.tgt[k]):
            raise ValueError("supplied base map is not an inverse of f")
    return back


def jet_prolong_map(fmap: Sequence, q: int, src=None, tgt=None) -> JetMapSection:
    """j_q(f) for a rational map f given componentwise."""
    fmap = [as_ratfn(f) for f in fmap]
    n = len(fmap)
    src = tuple(src) if src is not None else default_coords(n)
    comps = {}
    for k, f in enumerate(fmap):
        for mu in mi.up_to(n, q):
            comps[(k, mu)] = derive_multi(f, src, mu)
    return JetMapSection(n, q, comps, src, tgt)


def jet_compose(g: JetMapSection, f: JetMapSection) -> JetMapSection:
    """g_q o f_q, with g given over the target coordinates of f."""
    if g.n != f.n or g.q != f.q:
        raise ValueError("jets must have equal n and q")
    if g.src != f.tgt:
        raise ValueError("source coordinates of g must be the target coordinates of f")
    n, q = f.n, f.q
    at = dict(zip(f.tgt, f.base()))
    G = [to_series({mu: g[(k, mu)].subs(at) for mu in mi.up_to(n, q)}) for k in range(n)]
    H = series_compose(G, _map_series(f, q), n, q)
    comps = {}
    for k in range(n):
        for mu, v in from_series(H[k], n, q).items():
            comps[(k, mu)] = v
    return JetMapSection(n, q, comps, f.src, g.tgt, check=False)


def jet_invert(f: JetMapSection, ginv: Sequence) -> JetMapSection:
    """f_q^{-1} over the target; ``ginv`` is the inverse base map y -> x."""
    back = _check_base_inverse(f, ginv)
    n, q = f.n, f.q
    G = _inverse_series(f, q)
    comps = {}
    z = mi.zero(n)
    for k in range(n):
        comps[(k, z)] = back[f.src[k]]
        for mu, v in from_series(G[k], n, q).items():
            comps[(k, mu)] = v.subs(back)
    return JetMapSection(n, q, comps, f.tgt, f.src, check=False)


def leibniz_terms(f: JetMapSection, zeta: JetSection, q: int) -> Dict[Key, RatFn]:
    """sum_{lam <= mu} C(mu, lam) f^k_{mu-lam+1_r} zeta^r_lam for |mu| <= q."""
    n = f.n
    out = {}
    for k in range(n):
        for mu in mi.up_to(n, q):
            acc = ZERO_R
            for lam, rest in mi.iter_pairs(mu):
                c = mi.binom(mu, lam)
                for r in range(n):
                    z = zeta[(r, lam)]
                    if z:
                        fk = f[(k, mi.add_unit(rest, r))]
                        if fk:
                            acc = acc + z * fk * c
            out[(k, mu)] = acc
    return out


def leibniz_solve(f: JetMapSection, rhs: Dict[Key, RatFn], q: int, coords=None) -> JetSection:
    """Solve sum C(mu,lam) f^k_{mu-lam+1_r} zeta^r_lam = rhs^k_mu order by order.

    The leading term is f^k_r zeta^r_mu, inverted with the order-1 block.
    """
    n = f.n
    if f.q < q + 1:
        raise ValueError(f"need a map jet of order >= {q + 1}")
    Linv = f.jacobian_inverse()
    zeta: Dict[Key, RatFn] = {}
    for mu in mi.up_to(n, q):
        resid = []
        for k in range(n):
            acc = as_ratfn(rhs.get((k, mu), ZERO_R))
            for lam, rest in mi.iter_pairs(mu):
                if lam == mu:
                    continue
                c = mi.binom(mu, lam)
                for r in range(n):
                    z = zeta.get((r, lam))
                    if z:
                        fk = f[(k, mi.add_unit(rest, r))]
                        if fk:
                            acc = acc - z * fk * c
            resid.append(acc)
        for r in range(n):
            acc = ZERO_R
            for k in range(n):
                if Linv[r][k] and resid[k]:
                    acc = acc + Linv[r][k] * resid[k]
            if acc:
                zeta[(r, mu)] = acc
    return JetSection(n, n, q, zeta, coords if coords is not None else f.src)


def section_compose_inverse(R: Dict[Key, RatFn], f: JetMapSection, q: int, back) -> Dict[Key, RatFn]:
    """Given R = eta o f_q (as jets over the source), recover eta over the target."""
    n = f.n
    G = _inverse_series(f, q)
    m = 1 + max((k for k, _ in R), default=-1)
    series = [to_series({mu: R.get((k, mu), ZERO_R) for mu in mi.up_to(n, q)}) for k in range(m)]
    E = series_compose(series, G, n, q)
    out = {}
    for k in range(m):
        for mu, v in from_series(E[k], n, q).items():
            out[(k, mu)] = v.subs(back)
    return out


def jet_act(f: JetMapSection, xi: JetSection, ginv: Sequence) -> JetSection:
    """eta_q = f_{q+1}(xi_q), a section of J_q(T) over the target."""
    q = xi.q
    if f.q < q + 1:
        raise ValueError("jet_act needs f of order q+1")
    if xi.n != f.n or xi.m != f.n or xi.coords != f.src:
        raise ValueError("signatures of f and xi do not match")
    back = _check_base_inverse(f, ginv)
    R = leibniz_terms(f, xi, q)
    eta = section_compose_inverse(R, f, q, back)
    return JetSection(f.n, f.n, q, eta, f.tgt)


def section_compose(eta: JetSection, f: JetMapSection, q: Optional[int] = None) -> Dict[Key, RatFn]:
    """Jets of eta o f over the source: truncated Faa di Bruno with f_q."""
    n = f.n
    q = eta.q if q is None else q
    if eta.coords != f.tgt:
        raise ValueError("eta must live over the target of f")
    at = dict(zip(f.tgt, f.base()))
    series = [to_series({mu: eta[(k, mu)].subs(at) for mu in mi.up_to(n, q)}) for k in range(eta.m)]
    U = _map_series(f, q)
    H = series_compose(series, U, n, q)
    out = {}
    for k in range(eta.m):
        for mu, v in from_series(H[k], n, q).items():
            out[(k, mu)] = v
    return out


__all__ = [
    "jet_dims", "JetSection", "JetMapSection", "vf_bracket", "spencer_D",
    "algebraic_bracket", "differential_bracket", "contract_D", "jet_compose",
    "jet_invert", "jet_prolong_map", "jet_act", "leibniz_terms", "leibniz_solve",
    "section_compose", "default_coords",
]
