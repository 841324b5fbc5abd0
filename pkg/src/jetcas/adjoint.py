"""Differential operators in normal form, formal adjoints and their divergence witnesses.

An operator ``P = a^mu d_mu`` is kept with all coefficients to the left.
Pairings between two families of unknowns are bilinear expressions, stored
as ``{(r, alpha, c, beta): coefficient}`` meaning
``coefficient * d_alpha(lam_r) * d_beta(xi_c)``.  No symbolic names are
invented for the unknowns, so total derivatives stay exact bookkeeping.
"""
from __future__ import annotations

from typing import Dict, List, Optional, Sequence

from . import multiindex as mi
from .algebra import ONE_R, ZERO_R, RatFn, as_ratfn, derive_multi
from .forms import Form, SCALAR
from .jets import default_coords
from .linalg import det, inverse


def _acc(d: dict, key, v):
    if not v:
        return
    t = d[key] + v if key in d else v
    if t:
        d[key] = t
    else:
        del d[key]


class DiffOp:
    __slots__ = ("coords", "terms")

    def __init__(self, terms=None, coords=None):
        terms = terms or {}
        if coords is None:
            n = len(next(iter(terms))) if terms else 1
            coords = default_coords(n)
        self.coords = tuple(coords)
        clean = {}
        for mu, a in terms.items():
            mu = tuple(mu)
            if len(mu) != len(self.coords):
                raise ValueError(f"multi-index {mu} does not match {len(self.coords)} coordinates")
            _acc(clean, mu, as_ratfn(a))
        self.terms = clean

    @property
    def n(self) -> int:
        return len(self.coords)

    @classmethod
    def d(cls, i: int, coords) -> "DiffOp":
        return cls({mi.unit(len(coords), i): ONE_R}, coords)

    @classmethod
    def mult(cls, a, coords) -> "DiffOp":
        return cls({mi.zero(len(coords)): a}, coords)

    @classmethod
    def vector_field(cls, xi, coords) -> "DiffOp":
        n = len(coords)
        return cls({mi.unit(n, i): a for i, a in enumerate(xi)}, coords)

    @classmethod
    def zero(cls, coords) -> "DiffOp":
        return cls({}, coords)

    def order(self) -> int:
        return max((sum(mu) for mu in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other):
        if not isinstance(other, DiffOp):
            raise TypeError("expected a DiffOp")
        if other.coords != self.coords:
            raise ValueError("operators on different coordinates")

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for mu, a in other.terms.items():
            _acc(t, mu, a)
        return DiffOp(t, self.coords)

    def __neg__(self):
        return DiffOp({mu: -a for mu, a in self.terms.items()}, self.coords)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "DiffOp":
        c = as_ratfn(c)
        return DiffOp({mu: a * c for mu, a in self.terms.items()}, self.coords)

    def __mul__(self, other):
        return op_mul(self, other)

    def apply(self, f) -> RatFn:
        f = as_ratfn(f)
        return sum((a * derive_multi(f, self.coords, mu) for mu, a in self.terms.items()), ZERO_R)

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.coords == other.coords and self.terms == other.terms

    def __hash__(self):
        return hash((self.coords, frozenset(self.terms.items())))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mu in sorted(self.terms, key=lambda m: (-sum(m), tuple(-e for e in m))):
            a = self.terms[mu]
            dpart = "".join(f"d_{x}" + (f"^{e}" if e > 1 else "") for x, e in zip(self.coords, mu) if e)
            if not dpart:
                parts.append(str(a))
            elif a == ONE_R:
                parts.append(dpart)
            elif a == -ONE_R:
                parts.append("-" + dpart)
            else:
                s = str(a)
                parts.append((f"({s})" if any(ch in s[1:] for ch in "+-/") else s) + "*" + dpart)
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def op_mul(P: DiffOp, Q: DiffOp) -> DiffOp:
    """Normal-form product via d_i a = a d_i + d_i(a)."""
    P._check(Q)
    out: Dict[tuple, RatFn] = {}
    for mu, a in P.terms.items():
        for nu, b in Q.terms.items():
            for lam in mi.below(mu):
                db = derive_multi(b, P.coords, mi.sub(mu, lam))
                if db:
                    _acc(out, mi.add(lam, nu), a * db * mi.binom(mu, lam))
    return DiffOp(out, P.coords)


def op_adjoint(P: DiffOp) -> DiffOp:
    """ad(a d_mu) = (-1)^|mu| d_mu a = sum_lam (-1)^|mu| C(mu, lam) d_{mu-lam}(a) d_lam."""
    out: Dict[tuple, RatFn] = {}
    for mu, a in P.terms.items():
        sign = -1 if sum(mu) % 2 else 1
        for lam in mi.below(mu):
            da = derive_multi(a, P.coords, mi.sub(mu, lam))
            if da:
                _acc(out, lam, da * (sign * mi.binom(mu, lam)))
    return DiffOp(out, P.coords)


class OperatorMatrix:
    """rows x cols array of DiffOp acting on column vectors of functions."""

    def __init__(self, entries, coords):
        self.coords = tuple(coords)
        self.e: List[List[DiffOp]] = []
        for row in entries:
            r = []
            for op in row:
                if not isinstance(op, DiffOp):
                    op = DiffOp.mult(op, self.coords)
                if op.coords != self.coords:
                    raise ValueError("entry on different coordinates")
                r.append(op)
            self.e.append(r)
        self.rows = len(self.e)
        self.cols = len(self.e[0]) if self.e else 0
        if any(len(r) != self.cols for r in self.e):
            raise ValueError("operator matrix must be rectangular")

    def __getitem__(self, rc) -> DiffOp:
        r, c = rc
        return self.e[r][c]

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if self.cols != other.rows:
            raise ValueError("operator matrix shapes do not compose")
        out = []
        for r in range(self.rows):
            row = []
            for c in range(other.cols):
                acc = DiffOp.zero(self.coords)
                for k in range(self.cols):
                    acc = acc + op_mul(self.e[r][k], other.e[k][c])
                row.append(acc)
            out.append(row)
        return OperatorMatrix(out, self.coords)

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix([[op_adjoint(self.e[r][c]) for r in range(self.rows)] for c in range(self.cols)],
                              self.coords)

    def apply(self, fs) -> List[RatFn]:
        return [sum((self.e[r][c].apply(fs[c]) for c in range(self.cols)), ZERO_R) for r in range(self.rows)]

    def is_zero(self) -> bool:
        return all(op.is_zero() for row in self.e for op in row)

    def __eq__(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        return self.coords == other.coords and self.e == other.e

    def __hash__(self):
        return hash((self.coords, tuple(tuple(r) for r in self.e)))

    def __str__(self):
        return "[" + "; ".join(", ".join(str(op) for op in row) for row in self.e) + "]"

    __repr__ = __str__


# -- bilinear bookkeeping ---------------------------------------------------------------

Bilinear = Dict[tuple, RatFn]


def total_derivative(B: Bilinear, i: int, coords) -> Bilinear:
    """D_i of sum c * lam_{r,alpha} * xi_{c,beta}."""
    out: Bilinear = {}
    x = coords[i]
    for (r, al, c, be), f in B.items():
        _acc(out, (r, al, c, be), f.derive(x))
        _acc(out, (r, mi.add_unit(al, i), c, be), f)
        _acc(out, (r, al, c, mi.add_unit(be, i)), f)
    return out


def _badd(out: Bilinear, B: Bilinear, sign=1):
    for k, f in B.items():
        _acc(out, k, f if sign > 0 else -f)


class DivergenceWitness:
    """W^i bilinear in the jets of (lam, xi)."""

    def __init__(self, components: Sequence[Bilinear], coords):
        self.coords = tuple(coords)
        self.W = [dict(w) for w in components]

    def divergence(self) -> Bilinear:
        out: Bilinear = {}
        for i, w in enumerate(self.W):
            _badd(out, total_derivative(w, i, self.coords))
        return out

    def render(self, lam_names=None, xi_names=None) -> List[str]:
        return [render_bilinear(w, self.coords, lam_names, xi_names) for w in self.W]


def _jet_name(base: str, mu, coords) -> str:
    suffix = "".join(x * e for x, e in zip(coords, mu))
    return f"{base}_{suffix}" if suffix else base


def render_bilinear(B: Bilinear, coords, lam_names=None, xi_names=None) -> str:
    if not B:
        return "0"
    parts = []
    for (r, al, c, be) in sorted(B, key=lambda k: (k[2], k[3], k[0], k[1])):
        f = B[(r, al, c, be)]
        ln = _jet_name(lam_names[r] if lam_names else f"lam{r + 1}", al, coords)
        xn = _jet_name(xi_names[c] if xi_names else f"xi{c + 1}", be, coords)
        if f == ONE_R:
            parts.append(f"{ln}*{xn}")
        elif f == -ONE_R:
            parts.append(f"-{ln}*{xn}")
        else:
            parts.append(f"({f})*{ln}*{xn}")
    return " + ".join(parts).replace("+ -", "- ")


def pairing(D: OperatorMatrix) -> Bilinear:
    """<lam, D xi> = sum_{r,c} lam_r D_rc xi_c."""
    out: Bilinear = {}
    z = mi.zero(len(D.coords))
    for r in range(D.rows):
        for c in range(D.cols):
            for mu, a in D[(r, c)].terms.items():
                _acc(out, (r, z, c, mu), a)
    return out


def adjoint_pairing(adD: OperatorMatrix) -> Bilinear:
    """<ad(D) lam, xi> where ad(D) maps lam (length rows of D) to length cols."""
    out: Bilinear = {}
    z = mi.zero(len(adD.coords))
    for c in range(adD.rows):
        for r in range(adD.cols):
            for mu, a in adD[(c, r)].terms.items():
                _acc(out, (r, mu, c, z), a)
    return out


def _ibp_witness(D: OperatorMatrix) -> DivergenceWitness:
    """Integrate every lam_r a d_mu xi_c by parts, one derivative at a time.

    L d_{nu+1_i} xi = D_i(L d_nu xi) - (D_i L) d_nu xi, with L linear in the
    jets of lam; the pieces D_i(...) are collected into W^i.
    """
    n, X = len(D.coords), D.coords
    z = mi.zero(n)
    W: List[Bilinear] = [{} for _ in range(n)]
    for r in range(D.rows):
        for c in range(D.cols):
            for mu, a in D[(r, c)].terms.items():
                L = {z: a}  # alpha -> coefficient of d_alpha lam_r
                nu = mu
                while sum(nu):
                    i = mi.first_slot(nu)
                    nu = mi.sub_unit(nu, i)
                    for al, f in L.items():
                        _acc(W[i], (r, al, c, nu), f)
                    nxt: Dict[tuple, RatFn] = {}
                    for al, f in L.items():
                        _acc(nxt, al, -f.derive(X[i]))
                        _acc(nxt, mi.add_unit(al, i), -f)
                    L = nxt
    return DivergenceWitness(W, X)


def adjoint(D) -> tuple:
    """(ad(D), witness) with <lam, D xi> = <ad(D) lam, xi> + sum_i D_i W^i."""
    if isinstance(D, DiffOp):
        D = OperatorMatrix([[D]], D.coords)
    return D.adjoint(), _ibp_witness(D)


def witness_check(D, adD: Optional[OperatorMatrix] = None,
                  witness: Optional[DivergenceWitness] = None) -> Bilinear:
    """<lam, D xi> - <ad(D) lam, xi> - div W; empty when the identity is exact."""
    if isinstance(D, DiffOp):
        D = OperatorMatrix([[D]], D.coords)
    if adD is None:
        adD = D.adjoint()
    if witness is None:
        witness = _ibp_witness(D)
    out = pairing(D)
    _badd(out, adjoint_pairing(adD), -1)
    _badd(out, witness.divergence(), -1)
    return out


# -- the 1-D dual Spencer chain ----------------------------------------------------------

_MOMENTA = ("σ", "μ", "ν")
_SOURCES = ("f", "m", "j")


def spencer_chain_1d(q: int, x: str = "x") -> OperatorMatrix:
    """(xi, xi_x, ..., xi_{x^q}) -> (d xi_0 - xi_1, ..., d xi_{q-1} - xi_q, d xi_q)."""
    if q < 0:
        raise ValueError("q must be >= 0")
    X = (x,)
    rows = []
    for i in range(q + 1):
        row = [DiffOp.zero(X) for _ in range(q + 1)]
        row[i] = DiffOp.d(0, X)
        if i + 1 <= q:
            row[i + 1] = DiffOp.mult(-1, X)
        rows.append(row)
    return OperatorMatrix(rows, X)


def dual_spencer_1d(q: int, x: str = "x") -> dict:
    """Momenta equations of the 1-D chain xi_{x^(q+1)} = 0.

    The raw adjoint reads -(d sigma) = ..., -(d mu + sigma) = ...; the
    reported ``equations`` carry the positive sign with sources f, m, j.
    """
    D = spencer_chain_1d(q, x)
    adD, W = adjoint(D)
    names = list(_MOMENTA[: q + 1]) + [f"σ{k}" for k in range(3, q + 1)]
    sources = list(_SOURCES[: q + 1]) + [f"f{k}" for k in range(3, q + 1)]
    pos = OperatorMatrix([[-adD[(r, c)] for c in range(adD.cols)] for r in range(adD.rows)], D.coords)
    eqs = []
    for r in range(pos.rows):
        terms = []
        for c in range(pos.cols):
            op = pos[(r, c)]
            if op.is_zero():
                continue
            terms.append((op, names[c]))
        eqs.append((terms, sources[r]))
    return {
        "operator": D,
        "raw_adjoint": adD,
        "momenta": pos,
        "names": names,
        "sources": sources,
        "equations": eqs,
        "equation_strings": [_render_equation(t, s, x) for t, s in eqs],
        "witness": W,
        "witness_string": _render_chain_witness(W, names, q, x),
    }


def _render_equation(terms, src, x) -> str:
    parts = []
    for op, name in sorted(terms, key=lambda t: -t[0].order()):
        if op == DiffOp.d(0, op.coords):
            parts.append(f"∂_{x}{name}")
        elif op == DiffOp.mult(1, op.coords):
            parts.append(name)
        else:
            parts.append(f"({op}){name}")
    return " + ".join(parts) + f" = {src}"


def _render_chain_witness(W: DivergenceWitness, names, q, x) -> str:
    parts = []
    for (r, al, c, be), f in sorted(W.W[0].items(), key=lambda kv: (kv[0][2], kv[0][0])):
        xi = "ξ" if c == 0 else "ξ_" + x * c
        coeff = "" if f == ONE_R else ("-" if f == -ONE_R else f"({f})")
        lam = names[r] + ("_" + x * al[0] if al[0] else "")
        deriv = "_" + x * be[0] if be[0] else ""
        parts.append(f"{coeff}{lam}{xi}{deriv}")
    return " + ".join(parts).replace("+ -", "- ") if parts else "0"


# -- invariance identities ----------------------------------------------------------------

def _jacobian(f, xvars):
    return [[fk.derive(x) for x in xvars] for fk in f]


def _check_inverse(f, g, xvars, yvars):
    sub = dict(zip(xvars, g))
    for k, fk in enumerate(f):
        if fk.subs(sub) != RatFn.var(yvars[k]):
            raise ValueError("g is not an inverse of f")


def inverse_jacobian_divergence(f, g, xvars, yvars) -> List[RatFn]:
    """d/dy^k ((1/Delta(g(y))) d_i f^k(g(y))), one entry per i, as RatFn in y.

    Vanishes identically for any diffeomorphism y = f(x) with inverse g.
    """
    f = [as_ratfn(a) for a in f]
    g = [as_ratfn(a) for a in g]
    _check_inverse(f, g, xvars, yvars)
    J = _jacobian(f, xvars)
    delta = det(J, one=ONE_R)
    if delta.is_zero():
        raise ValueError("Jacobian determinant vanishes")
    sub = dict(zip(xvars, g))
    inv_delta = (ONE_R / delta).subs(sub)
    n = len(xvars)
    out = []
    for i in range(n):
        v = ZERO_R
        for k in range(n):
            v = v + (inv_delta * J[k][i].subs(sub)).derive(yvars[k])
        out.append(v)
    return out


lemma45_residual = inverse_jacobian_divergence


def em_invariance_residual(f, Fmat, xvars, g=None, yvars=None) -> dict:
    """Transport of the induction equations d_i F^{ij} = J^j under y = f(x).

    ``transport[l]`` is d/dy^k ((1/Delta) d_i f^k d_j f^l F^{ij}) -
    (1/Delta) d_j f^l d_i F^{ij}, written in x through d/dy^k =
    (df^{-1})^s_k d/dx^s; ``second_derivative[l]`` is d_{ij} f^l F^{ij}.
    """
    f = [as_ratfn(a) for a in f]
    n = len(xvars)
    Fm = [[as_ratfn(v) for v in row] for row in Fmat]
    for i in range(n):
        for j in range(n):
            if Fm[i][j] != -Fm[j][i]:
                raise ValueError("F must be antisymmetric")
    if g is not None:
        _check_inverse(f, [as_ratfn(a) for a in g], xvars, yvars)
    J = _jacobian(f, xvars)
    delta = det(J, one=ONE_R)
    if delta.is_zero():
        raise ValueError("Jacobian determinant vanishes")
    Jinv = inverse(J, one=ONE_R, zero=ZERO_R)  # Jinv[s][k] = d x^s / d y^k
    inv_delta = ONE_R / delta
    divF = [sum((Fm[i][j].derive(xvars[i]) for i in range(n)), ZERO_R) for j in range(n)]
    transport, second = [], []
    for l in range(n):
        total = ZERO_R
        for k in range(n):
            h = ZERO_R
            for i in range(n):
                for j in range(n):
                    if Fm[i][j]:
                        h = h + J[k][i] * J[l][j] * Fm[i][j]
            h = h * inv_delta
            for s in range(n):
                if Jinv[s][k]:
                    total = total + Jinv[s][k] * h.derive(xvars[s])
        rhs = inv_delta * sum((J[l][j] * divF[j] for j in range(n)), ZERO_R)
        transport.append(total - rhs)
        second.append(sum((f[l].derive(xvars[i]).derive(xvars[j]) * Fm[i][j]
                           for i in range(n) for j in range(n)), ZERO_R))
    return {"transport": transport, "second_derivative": second,
            "passed": all(v.is_zero() for v in transport + second)}


# -- right action on volume forms --------------------------------------------------------

def volume_right_action(alpha: Form, P) -> Form:
    """alpha.P for a top-degree form alpha = a dx^1...dx^n.

    A vector field xi acts by alpha.xi = -d_i(a xi^i) dx = -L(xi) alpha; a
    general operator acts through ad: alpha.P = ad(P)(a) dx.
    """
    if alpha.space != SCALAR or alpha.degree != alpha.n:
        raise ValueError("right action needs a scalar top-degree form")
    if not isinstance(P, DiffOp):
        P = DiffOp.vector_field(P, alpha.coords)
    if P.coords != alpha.coords:
        raise ValueError("operator and form live on different coordinates")
    I = tuple(range(alpha.n))
    a = alpha[(0, I)]
    return Form.scalar(alpha.coords, alpha.n, {I: op_adjoint(P).apply(a)})


def exterior_derivative_matrix(n: int, r: int, coords=None) -> OperatorMatrix:
    """d: wedge^r -> wedge^{r+1} as a C(n,r+1) x C(n,r) operator matrix."""
    coords = tuple(coords) if coords is not None else default_coords(n)
    src = mi.increasing(n, r)
    tgt = mi.increasing(n, r + 1)
    col = {I: j for j, I in enumerate(src)}
    rows = []
    for K in tgt:
        row = [DiffOp.zero(coords) for _ in src]
        for pos, i in enumerate(K):
            I = K[:pos] + K[pos + 1:]
            sign = -1 if pos % 2 else 1
            row[col[I]] = row[col[I]] + DiffOp.d(i, coords).scale(sign)
        rows.append(row)
    return OperatorMatrix(rows, coords)


__all__ = [
    "DiffOp", "OperatorMatrix", "op_mul", "op_adjoint", "adjoint", "witness_check",
    "DivergenceWitness", "pairing", "adjoint_pairing", "total_derivative", "render_bilinear",
    "spencer_chain_1d", "dual_spencer_1d", "inverse_jacobian_divergence", "lemma45_residual", "em_invariance_residual",
    "volume_right_action", "exterior_derivative_matrix",
]
