"""Nonlinear Spencer calculus: the 1-form chi_q = Dbar f_{q+1} and friends.

A :class:`Chi` is a 1-form with values in J_q(T); component
``(k, mu, i)`` is chi^k_{mu,i}.  Its value on the direction d/dx^i is the
jet section ``chi.direction(i)``.
"""
from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

from . import multiindex as mi
from .algebra import ONE_R, ZERO_R, RatFn, as_ratfn
from .forms import Form, ValueSpace, ext_d
from .jets import (JetMapSection, JetSection, differential_bracket, jet_act, jet_compose,
                   leibniz_solve, section_compose, spencer_D)
from .linalg import identity, matmul


class Chi:
    __slots__ = ("n", "q", "coords", "comps")

    def __init__(self, n: int, q: int, comps, coords):
        self.n, self.q = n, q
        self.coords = tuple(coords)
        clean = {}
        for (k, mu, i), f in comps.items():
            mu = tuple(mu)
            if sum(mu) > q or len(mu) != n:
                raise ValueError(f"component {(k, mu, i)} outside order {q}")
            f = as_ratfn(f)
            if f:
                clean[(k, mu, i)] = f
        self.comps = clean

    @classmethod
    def from_directions(cls, sections: Sequence[JetSection]) -> "Chi":
        s0 = sections[0]
        comps = {}
        for i, s in enumerate(sections):
            for (k, mu), f in s.comps.items():
                comps[(k, mu, i)] = f
        return cls(s0.n, s0.q, comps, s0.coords)

    @classmethod
    def from_form(cls, form: Form) -> "Chi":
        n, m, q = form.space.dims
        return cls(n, q, {(k, mu, I[0]): f for ((k, mu), I), f in form.comps.items()}, form.coords)

    def __getitem__(self, key) -> RatFn:
        k, mu, i = key
        return self.comps.get((k, tuple(mu), i), ZERO_R)

    def direction(self, i: int) -> JetSection:
        return JetSection(self.n, self.n, self.q,
                          {(k, mu): f for (k, mu, j), f in self.comps.items() if j == i}, self.coords)

    def project(self, q: int) -> "Chi":
        return Chi(self.n, q, {key: f for key, f in self.comps.items() if sum(key[1]) <= q}, self.coords)

    def A(self) -> List[List[RatFn]]:
        """A^k_i = chi^k_{,i} + delta^k_i."""
        z = mi.zero(self.n)
        return [[self[(k, z, i)] + (ONE_R if k == i else ZERO_R) for i in range(self.n)]
                for k in range(self.n)]

    def alpha(self) -> List[RatFn]:
        """alpha_i = chi^r_{r,i}."""
        if self.q < 1:
            raise ValueError("alpha needs order >= 1")
        out = []
        for i in range(self.n):
            acc = ZERO_R
            for r in range(self.n):
                acc = acc + self[(r, mi.unit(self.n, r), i)]
            out.append(acc)
        return out

    def as_form(self) -> Form:
        return Form(ValueSpace.jet(self.n, self.n, self.q), 1, self.coords,
                    {((k, mu), (i,)): f for (k, mu, i), f in self.comps.items()})

    def evaluate_on(self, xi: Sequence) -> JetSection:
        """chi(xi): components chi^k_{mu,i} xi^i."""
        xi = [as_ratfn(a) for a in xi]
        comps: Dict[tuple, RatFn] = {}
        for (k, mu, i), f in self.comps.items():
            if xi[i]:
                t = f * xi[i]
                comps[(k, mu)] = comps[(k, mu)] + t if (k, mu) in comps else t
        return JetSection(self.n, self.n, self.q, comps, self.coords)

    def __add__(self, other: "Chi") -> "Chi":
        self._like(other)
        comps = dict(self.comps)
        for key, f in other.comps.items():
            comps[key] = comps[key] + f if key in comps else f
        return Chi(self.n, self.q, comps, self.coords)

    def __neg__(self):
        return Chi(self.n, self.q, {k: -f for k, f in self.comps.items()}, self.coords)

    def __sub__(self, other):
        return self + (-other)

    def _like(self, other):
        if (self.n, self.q, self.coords) != (other.n, other.q, other.coords):
            raise ValueError("chi forms have different signatures")

    def is_zero(self) -> bool:
        return not self.comps

    def __eq__(self, other):
        if not isinstance(other, Chi):
            return NotImplemented
        return (self.n, self.q, self.coords, self.comps) == (other.n, other.q, other.coords, other.comps)

    def __hash__(self):
        return hash((self.n, self.q, self.coords, frozenset(self.comps.items())))

    def __str__(self):
        parts = []
        for (k, mu, i), f in sorted(self.comps.items(), key=lambda kv: (kv[0][0], sum(kv[0][1]), kv[0][1], kv[0][2])):
            parts.append(f"chi^{k + 1}_{{{mi.label(mu, self.coords)},{self.coords[i]}}} = {f}")
        return "; ".join(parts) if parts else "0"

    __repr__ = __str__


def chi(f: JetMapSection, g1=None) -> Chi:
    """chi_q = Dbar f_{q+1} from the triangular recursion

    f^k_r chi^r_{mu,i} + ... + f^k_{mu+1_r} chi^r_{,i} = d_i f^k_mu - f^k_{mu+1_i}.

    ``g1`` optionally supplies the inverse of the order-1 block; it is
    checked against f.
    """
    if f.q < 1:
        raise ValueError("chi needs a map jet of order >= 1")
    n, q = f.n, f.q - 1
    if g1 is not None:
        g1 = [[as_ratfn(a) for a in row] for row in g1]
        if matmul(g1, f.jacobian()) != identity(n, ONE_R, ZERO_R):
            raise ValueError("g1 is not the inverse of the order-1 block of f")
        f._jinv = g1
    sections = []
    for i, x in enumerate(f.src):
        rhs = {}
        for k in range(n):
            for mu in mi.up_to(n, q):
                rhs[(k, mu)] = f[(k, mu)].derive(x) - f[(k, mi.add_unit(mu, i))]
        sections.append(leibniz_solve(f, rhs, q))
    return Chi.from_directions(sections)


dbar = chi


def chi_cc_residual(c: Chi):
    """Left-hand sides of the two compatibility identities of chi.

    First (q >= 1), keyed (k, i, j) with i < j:
        d_i chi^k_{,j} - d_j chi^k_{,i} - chi^k_{i,j} + chi^k_{j,i}
        - (chi^r_{,i} chi^k_{r,j} - chi^r_{,j} chi^k_{r,i})
    Second (q >= 2, else None), keyed (k, l, i, j):
        d_i chi^k_{l,j} - d_j chi^k_{l,i} - chi^k_{li,j} + chi^k_{lj,i}
        - (chi^r_{,i} chi^k_{lr,j} + chi^r_{l,i} chi^k_{r,j}
           - chi^r_{l,j} chi^k_{r,i} - chi^r_{,j} chi^k_{lr,i})
    """
    if c.q < 1:
        raise ValueError("compatibility identities need order >= 1")
    n, X = c.n, c.coords
    z = mi.zero(n)
    e = [mi.unit(n, i) for i in range(n)]
    first = {}
    for k in range(n):
        for i, j in mi.increasing(n, 2):
            v = (c[(k, z, j)].derive(X[i]) - c[(k, z, i)].derive(X[j]) - c[(k, e[i], j)] + c[(k, e[j], i)])
            for r in range(n):
                v = v - (c[(r, z, i)] * c[(k, e[r], j)] - c[(r, z, j)] * c[(k, e[r], i)])
            first[(k, i, j)] = v
    if c.q < 2:
        return first, None
    second = {}
    for k in range(n):
        for l in range(n):
            for i, j in mi.increasing(n, 2):
                li, lj = mi.add(e[l], e[i]), mi.add(e[l], e[j])
                v = (c[(k, e[l], j)].derive(X[i]) - c[(k, e[l], i)].derive(X[j]) - c[(k, li, j)] + c[(k, lj, i)])
                for r in range(n):
                    lr = mi.add(e[l], e[r])
                    v = v - (c[(r, z, i)] * c[(k, lr, j)] + c[(r, e[l], i)] * c[(k, e[r], j)]
                             - c[(r, e[l], j)] * c[(k, e[r], i)] - c[(r, z, j)] * c[(k, lr, i)])
                second[(k, l, i, j)] = v
    return first, second


def rewritten_cc_residual(c: Chi):
    """The same identities written with A = chi_0 + id in place of chi_0.

        d_i A^k_j - d_j A^k_i - A^r_i chi^k_{r,j} + A^r_j chi^k_{r,i}
        d_i chi^k_{l,j} - d_j chi^k_{l,i} - chi^r_{l,i} chi^k_{r,j} + chi^r_{l,j} chi^k_{r,i}
            - A^r_i chi^k_{lr,j} + A^r_j chi^k_{lr,i}
    """
    n, X = c.n, c.coords
    A = c.A()
    e = [mi.unit(n, i) for i in range(n)]
    first, second = {}, None
    for k in range(n):
        for i, j in mi.increasing(n, 2):
            v = A[k][j].derive(X[i]) - A[k][i].derive(X[j])
            for r in range(n):
                v = v - A[r][i] * c[(k, e[r], j)] + A[r][j] * c[(k, e[r], i)]
            first[(k, i, j)] = v
    if c.q >= 2:
        second = {}
        for k in range(n):
            for l in range(n):
                for i, j in mi.increasing(n, 2):
                    v = c[(k, e[l], j)].derive(X[i]) - c[(k, e[l], i)].derive(X[j])
                    for r in range(n):
                        lr = mi.add(e[l], e[r])
                        v = (v - c[(r, e[l], i)] * c[(k, e[r], j)] + c[(r, e[l], j)] * c[(k, e[r], i)]
                             - A[r][i] * c[(k, lr, j)] + A[r][j] * c[(k, lr, i)])
                    second[(k, l, i, j)] = v
    return first, second


def transport(c: Chi, f: JetMapSection) -> Chi:
    """f_{q+1}^{-1} o chi o j_1(f_q) for chi given over the target of f.

    The source direction d/dx^i is pushed to d_i f^u d/dy^u, chi is
    evaluated there and the resulting jet is pulled back through f_{q+1}.
    """
    if c.coords != f.tgt:
        raise ValueError("chi must be expressed over the target coordinates of f")
    n, q = f.n, c.q
    if f.q < q + 1:
        raise ValueError("transport needs f of order q+1")
    pulled = [section_compose(c.direction(u), f, q) for u in range(n)]
    base = f.base()
    sections = []
    for i, x in enumerate(f.src):
        rhs: Dict[tuple, RatFn] = {}
        for u in range(n):
            w = base[u].derive(x)
            if not w:
                continue
            for key, v in pulled[u].items():
                t = v * w
                rhs[key] = rhs[key] + t if key in rhs else t
        sections.append(leibniz_solve(f, rhs, q))
    return Chi.from_directions(sections)


def dbar_cocycle_residual(f: JetMapSection, g: JetMapSection) -> Chi:
    """Dbar(g o f) - (f^{-1} o Dbar g o j_1(f) + Dbar f)."""
    if g.src != f.tgt or g.q != f.q:
        raise ValueError("g must be an order-matched jet over the target of f")
    return chi(jet_compose(g, f)) - (transport(chi(g), f) + chi(f))


def nl_gauge_transform(c: Chi, f: JetMapSection) -> Chi:
    """chi -> f^{-1} o chi o j_1(f) + Dbar f."""
    return transport(c, f) + chi(f)


# -- variations --------------------------------------------------------------------

def variation_chi(c: Chi, xi: JetSection):
    """Infinitesimal gauge variation of chi_1 along xi_2 (source side).

    Returns ``(delta_chi, delta_alpha)`` with

      delta chi^k_{,i}  = (d_i xi^k - xi^k_i)
                          + xi^r d_r chi^k_{,i} + chi^k_{,r} d_i xi^r - chi^r_{,i} xi^k_r
      delta chi^k_{j,i} = (d_i xi^k_j - xi^k_{ij})
                          + xi^r d_r chi^k_{j,i} + chi^k_{j,r} d_i xi^r + chi^k_{r,i} xi^r_j
                          - chi^r_{j,i} xi^k_r - chi^r_{,i} xi^k_{jr}
      delta alpha_i     = (d_i xi^r_r - xi^r_{ri})
                          + xi^r d_r alpha_i + alpha_r d_i xi^r - chi^s_{,i} xi^r_{rs}
    """
    if c.q != 1 or xi.q != 2:
        raise NotImplementedError("variation_chi is implemented for chi_1 and xi_2 only")
    n, X = c.n, c.coords
    if xi.coords != X or xi.n != n or xi.m != n:
        raise ValueError("xi must be a section of J_2(T) over the coordinates of chi")
    z = mi.zero(n)
    e = [mi.unit(n, i) for i in range(n)]
    x0 = [xi[(r, z)] for r in range(n)]
    dchi = {}
    for k in range(n):
        for i in range(n):
            v = xi[(k, z)].derive(X[i]) - xi[(k, e[i])]
            for r in range(n):
                v = (v + x0[r] * c[(k, z, i)].derive(X[r]) + c[(k, z, r)] * x0[r].derive(X[i])
                     - c[(r, z, i)] * xi[(k, e[r])])
            dchi[(k, z, i)] = v
            for j in range(n):
                ij = mi.add(e[i], e[j])
                v = xi[(k, e[j])].derive(X[i]) - xi[(k, ij)]
                for r in range(n):
                    jr = mi.add(e[j], e[r])
                    v = (v + x0[r] * c[(k, e[j], i)].derive(X[r]) + c[(k, e[j], r)] * x0[r].derive(X[i])
                         + c[(k, e[r], i)] * xi[(r, e[j])] - c[(r, e[j], i)] * xi[(k, e[r])]
                         - c[(r, z, i)] * xi[(k, jr)])
                dchi[(k, e[j], i)] = v
    alpha = c.alpha()
    dalpha = []
    for i in range(n):
        v = ZERO_R
        for r in range(n):
            v = v + xi[(r, e[r])].derive(X[i]) - xi[(r, mi.add(e[r], e[i]))]
            v = v + x0[r] * alpha[i].derive(X[r]) + alpha[r] * x0[r].derive(X[i])
            for s in range(n):
                v = v - c[(s, z, i)] * xi[(r, mi.add(e[r], e[s]))]
        dalpha.append(v)
    return Chi(n, 1, dchi, X), dalpha


def variation_target(f: JetMapSection, xi: JetSection, ginv: Sequence) -> Chi:
    """Target-side variation f^{-1} o D eta_{q+1} o j_1(f_q) at q = 1.

    Here eta_2 = f_3(xi_2 + chi_2(xi)) with chi_2 = Dbar f_3; order 0 of the
    result is g^k_v (d eta^v / d y^u - eta^v_u) d_i f^u.
    """
    if f.q != 3 or xi.q != 2:
        raise NotImplementedError("variation_target expects f_3 and xi_2")
    c2 = chi(f)
    zeta = xi + c2.evaluate_on(xi.order0())
    eta = jet_act(f, zeta, ginv)
    return transport(Chi.from_form(spencer_D(eta)), f.project(2))


# -- connections -------------------------------------------------------------------

def connection_curvature(chi_prime: Sequence[JetSection], system=None) -> Form:
    """kappa'(d_i, d_j) = [chi'(d_i), chi'(d_j)] - chi'([d_i, d_j]) for an R_q-connection.

    ``chi_prime[i]`` is the jet section chi'(d/dx^i); it must have order-0
    part e_i.  When ``system`` is given every value is checked to solve it.
    """
    n = len(chi_prime)
    q = chi_prime[0].q
    coords = chi_prime[0].coords
    z = mi.zero(n)
    for i, s in enumerate(chi_prime):
        for k in range(n):
            if s[(k, z)] != (ONE_R if k == i else ZERO_R):
                raise ValueError("chi' does not project onto the identity of T")
        if system is not None and not system.contains(s):
            raise ValueError(f"chi'(d_{i + 1}) does not lie in the system")
    comps = {}
    for i, j in mi.increasing(n, 2):
        b = differential_bracket(chi_prime[i], chi_prime[j])
        for (k, mu), f in b.comps.items():
            if sum(mu) == 0:
                raise ArithmeticError("curvature escaped the kernel of the projection to T")
            comps[((k, mu), (i, j))] = f
    return Form(ValueSpace.jet(n, n, q), 2, coords, comps)


def killing_connection(gamma, coords) -> List[JetSection]:
    """The R_1 connection (delta^k_i, -gamma^k_{ij})."""
    n = len(coords)
    out = []
    for i in range(n):
        comps = {(i, mi.zero(n)): ONE_R}
        for k in range(n):
            for j in range(n):
                comps[(k, mi.unit(n, j))] = -gamma[k][i][j]
        out.append(JetSection(n, n, 1, comps, coords))
    return out


def curvature_on(kappa: Form, xi: Sequence, eta: Sequence) -> JetSection:
    """kappa(xi, eta) = sum_{i<j} kappa_ij (xi^i eta^j - xi^j eta^i)."""
    n, m, q = kappa.space.dims
    xi = [as_ratfn(a) for a in xi]
    eta = [as_ratfn(a) for a in eta]
    comps: Dict[tuple, RatFn] = {}
    for (v, (i, j)), f in kappa.comps.items():
        t = f * (xi[i] * eta[j] - xi[j] * eta[i])
        if t:
            comps[v] = comps[v] + t if v in comps else t
    return JetSection(n, m, q, comps, kappa.coords)


# -- closed 2-forms ----------------------------------------------------------------

def phi_2form(c: Chi) -> Tuple[Form, Form]:
    """phi_ij = A^s_i chi^r_{rs,j} - A^s_j chi^r_{rs,i}; returns (phi, phi - d alpha)."""
    if c.q != 2:
        raise ValueError("phi_2form needs chi of order 2")
    n, X = c.n, c.coords
    A = c.A()
    e = [mi.unit(n, i) for i in range(n)]
    comps = {}
    for i, j in mi.increasing(n, 2):
        v = ZERO_R
        for s in range(n):
            for r in range(n):
                rs = mi.add(e[r], e[s])
                v = v + A[s][i] * c[(r, rs, j)] - A[s][j] * c[(r, rs, i)]
        comps[(i, j)] = v
    phi = Form.scalar(X, 2, comps)
    alpha = Form.scalar(X, 1, {(i,): a for i, a in enumerate(c.alpha())})
    return phi, phi - ext_d(alpha)


def linear_F_2form(xi: JetSection, gamma) -> dict:
    """Build A_i, B^k_{lj,i} and F_ij from X = D xi_3 and gamma.

    Returns a dict with ``A`` (list), ``B`` (dict), ``F`` (2-form) and
    ``residuals``: the two first-order identities satisfied by X and the
    differences between F and each rewriting of it, down to dA.
    """
    if xi.q != 3:
        raise ValueError("linear_F_2form needs xi of order 3")
    n, X0 = xi.n, xi.coords
    Xf = spencer_D(xi)
    e = [mi.unit(n, i) for i in range(n)]
    z = mi.zero(n)

    def Xc(k, mu, i):
        return Xf[((k, tuple(mu)), (i,))]

    g = [[[as_ratfn(gamma[k][i][j]) for j in range(n)] for i in range(n)] for k in range(n)]
    dg = {(k, i, j, r): g[k][i][j].derive(X0[r])
          for k in range(n) for i in range(n) for j in range(n) for r in range(n)}

    # A^k_{l,i} and its trace
    Akl = {}
    for k in range(n):
        for l in range(n):
            for i in range(n):
                v = Xc(k, e[l], i)
                for s in range(n):
                    v = v + g[k][l][s] * Xc(s, z, i)
                Akl[(k, l, i)] = v
    A = [sum((Akl[(r, r, i)] for r in range(n)), ZERO_R) for i in range(n)]

    B = {}
    for k in range(n):
        for l in range(n):
            for j in range(n):
                for i in range(n):
                    v = Xc(k, mi.add(e[l], e[j]), i)
                    for s in range(n):
                        v = (v + g[k][s][j] * Xc(s, e[l], i) + g[k][l][s] * Xc(s, e[j], i)
                             - g[s][l][j] * Xc(k, e[s], i))
                    for r in range(n):
                        v = v + Xc(r, z, i) * dg[(k, l, j, r)]
                    B[(k, l, j, i)] = v

    F, line1, line2, dA = {}, {}, {}, {}
    trace = [sum((g[r][r][s] for r in range(n)), ZERO_R) for s in range(n)]
    for i, j in mi.increasing(n, 2):
        F[(i, j)] = sum((B[(r, r, i, j)] - B[(r, r, j, i)] for r in range(n)), ZERO_R)
        v1 = ZERO_R
        v2 = ZERO_R
        for r in range(n):
            v1 = v1 + Xc(r, mi.add(e[r], e[i]), j) - Xc(r, mi.add(e[r], e[j]), i)
            v2 = v2 + Xc(r, e[r], j).derive(X0[i]) - Xc(r, e[r], i).derive(X0[j])
            v1 = v1 + trace[r] * (Xc(r, e[i], j) - Xc(r, e[j], i))
            v2 = v2 + trace[r] * (Xc(r, e[i], j) - Xc(r, e[j], i))
            for s in range(n):
                v1 = v1 + Xc(r, z, j) * dg[(s, s, i, r)] - Xc(r, z, i) * dg[(s, s, j, r)]
                v2 = v2 + Xc(r, z, j) * dg[(s, s, r, i)] - Xc(r, z, i) * dg[(s, s, r, j)]
        line1[(i, j)] = v1
        line2[(i, j)] = v2
        dA[(i, j)] = A[j].derive(X0[i]) - A[i].derive(X0[j])

    ident0, ident1 = {}, {}
    for k in range(n):
        for i, j in mi.increasing(n, 2):
            ident0[(k, i, j)] = (Xc(k, z, j).derive(X0[i]) - Xc(k, z, i).derive(X0[j])
                                 + Xc(k, e[j], i) - Xc(k, e[i], j))
            for l in range(n):
                ident1[(k, l, i, j)] = (Xc(k, e[l], j).derive(X0[i]) - Xc(k, e[l], i).derive(X0[j])
                                        + Xc(k, mi.add(e[l], e[j]), i) - Xc(k, mi.add(e[l], e[i]), j))
    residuals = {
        "X_order0_identity": ident0,
        "X_order1_identity": ident1,
        "F_minus_line1": {key: F[key] - line1[key] for key in F},
        "F_minus_line2": {key: F[key] - line2[key] for key in F},
        "F_minus_dA": {key: F[key] - dA[key] for key in F},
    }
    return {"A": A, "B": B, "F": Form.scalar(X0, 2, F), "X": Xf, "residuals": residuals}


def all_zero(*groups) -> bool:
    for g in groups:
        if g is None:
            continue
        vals = g.values() if isinstance(g, dict) else g
        for v in vals:
            if isinstance(v, dict):
                if not all_zero(v):
                    return False
            elif hasattr(v, "is_zero"):
                if not v.is_zero():
                    return False
            elif v:
                return False
    return True


__all__ = [
    "Chi", "chi", "dbar", "chi_cc_residual", "rewritten_cc_residual", "transport",
    "dbar_cocycle_residual", "nl_gauge_transform", "variation_chi", "variation_target",
    "connection_curvature", "killing_connection", "curvature_on", "phi_2form",
    "linear_F_2form", "all_zero",
]
