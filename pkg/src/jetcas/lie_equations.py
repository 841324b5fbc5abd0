"""Linear systems of infinitesimal Lie equations.

A :class:`LinearSystem` is a list of linear forms ``{(k, mu): a(x)}`` in the
jet coordinates xi^k_mu of J_q(E).  Ranks are always taken at rational
points; when several points are used and they disagree a
:class:`RankInstabilityError` is raised instead of picking one.
"""
from __future__ import annotations

import random
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Sequence

from . import multiindex as mi
from .algebra import ONE_R, ZERO_R, PoleError, RatFn, as_ratfn
from .forms import delta_terms
from .jets import JetSection, default_coords, differential_bracket
from .linalg import det, inverse, nullspace, rank, rank_sparse

Equation = Dict[tuple, RatFn]


class RankInstabilityError(ArithmeticError):
    pass


class InconsistentSystemError(ArithmeticError):
    pass


# -- metrics -----------------------------------------------------------------------

class Metric:
    def __init__(self, entries, coords=None, signature: Optional[str] = None):
        self.w = [[as_ratfn(v) for v in row] for row in entries]
        self.n = len(self.w)
        self.coords = tuple(coords) if coords is not None else default_coords(self.n)
        if len(self.coords) != self.n or any(len(r) != self.n for r in self.w):
            raise ValueError("metric must be an n x n matrix on n coordinates")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if self.w[i][j] != self.w[j][i]:
                    raise ValueError("metric is not symmetric")
        if det(self.w, one=ONE_R).is_zero():
            raise ValueError("metric is singular")
        self.inv = inverse(self.w, one=ONE_R, zero=ZERO_R)
        self.signature = signature

    @classmethod
    def diagonal(cls, diag, coords=None, signature=None) -> "Metric":
        n = len(diag)
        return cls([[diag[i] if i == j else 0 for j in range(n)] for i in range(n)], coords, signature)

    @classmethod
    def euclidean(cls, n: int, coords=None) -> "Metric":
        return cls.diagonal([1] * n, coords, "euclidean")

    @classmethod
    def minkowski(cls, n: int, coords=None) -> "Metric":
        return cls.diagonal([1] * (n - 1) + [-1], coords, "minkowski")

    @classmethod
    def named(cls, name: str, n: int, coords=None) -> "Metric":
        if name == "euclidean":
            return cls.euclidean(n, coords)
        if name == "minkowski":
            return cls.minkowski(n, coords)
        raise ValueError(f"unknown metric {name!r}")


class Christoffel:
    """gamma[k][i][j], symmetric in (i, j)."""

    def __init__(self, gamma, coords):
        self.g = [[[as_ratfn(v) for v in row] for row in plane] for plane in gamma]
        self.coords = tuple(coords)
        n = len(self.coords)
        for k in range(n):
            for i in range(n):
                for j in range(i + 1, n):
                    if self.g[k][i][j] != self.g[k][j][i]:
                        raise ValueError("Christoffel symbols not symmetric in the lower indices")

    def __getitem__(self, kij):
        k, i, j = kij
        return self.g[k][i][j]

    def trace_residual(self) -> Dict[tuple, RatFn]:
        """d_i gamma^r_{rj} - d_j gamma^r_{ri}."""
        n, X = len(self.coords), self.coords
        tr = [sum((self.g[r][r][j] for r in range(n)), ZERO_R) for j in range(n)]
        return {(i, j): tr[j].derive(X[i]) - tr[i].derive(X[j]) for i, j in mi.increasing(n, 2)}


def christoffel(metric: Metric) -> Christoffel:
    """Levi-Civita symbols 1/2 w^{kr} (d_i w_rj + d_j w_ri - d_r w_ij)."""
    n, X, w, wi = metric.n, metric.coords, metric.w, metric.inv
    dw = [[[w[a][b].derive(X[c]) for c in range(n)] for b in range(n)] for a in range(n)]  # dw[a][b][c] = d_c w_ab
    half = Fraction(1, 2)
    g = [[[ZERO_R] * n for _ in range(n)] for _ in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                v = ZERO_R
                for r in range(n):
                    if wi[k][r]:
                        t = dw[r][j][i] + dw[r][i][j] - dw[i][j][r]
                        if t:
                            v = v + wi[k][r] * t
                g[k][i][j] = g[k][j][i] = v * half
    return Christoffel(g, X)


# -- linear forms on jet coordinates -----------------------------------------------

def _acc(eq: Equation, key, c):
    if not c:
        return
    v = eq[key] + c if key in eq else c
    if v:
        eq[key] = v
    else:
        del eq[key]


def _combine(*terms) -> Equation:
    out: Equation = {}
    for coeff, eq in terms:
        coeff = as_ratfn(coeff)
        if not coeff:
            continue
        for key, a in eq.items():
            _acc(out, key, a * coeff)
    return out


def jet_keys(n: int, m: int, q: int) -> List[tuple]:
    """Column order: by order, then fiber index, then multi-index."""
    return [(k, mu) for s in range(q + 1) for k in range(m) for mu in mi.of_order(n, s)]


def formal_derivative(eq: Equation, i: int, coords) -> Equation:
    """d_i (a xi^k_mu) = (d_i a) xi^k_mu + a xi^k_{mu+1_i}."""
    out: Equation = {}
    x = coords[i]
    for (k, mu), a in eq.items():
        _acc(out, (k, mu), a.derive(x))
        _acc(out, (k, mi.add_unit(mu, i)), a)
    return out


class LinearSystem:
    def __init__(self, n: int, m: int, q: int, equations: Sequence[Equation], coords=None, label: str = ""):
        self.n, self.m, self.q = n, m, q
        self.coords = tuple(coords) if coords is not None else default_coords(n)
        self.label = label
        eqs, seen = [], set()
        for eq in equations:
            clean = {}
            for (k, mu), a in eq.items():
                mu = tuple(mu)
                if len(mu) != n or sum(mu) > q or not 0 <= k < m:
                    raise ValueError(f"jet coordinate {(k, mu)} outside J_{q}")
                a = as_ratfn(a)
                if a:
                    clean[(k, mu)] = a
            if not clean:
                continue
            sig = frozenset(clean.items())
            if sig in seen:
                continue
            seen.add(sig)
            eqs.append(clean)
        self.equations = eqs

    def __len__(self):
        return len(self.equations)

    def keys(self) -> List[tuple]:
        return jet_keys(self.n, self.m, self.q)

    @property
    def jet_dim(self) -> int:
        return self.m * mi.jet_dim(self.n, self.q)

    def residual(self, section: JetSection) -> List[RatFn]:
        if section.n != self.n or section.m != self.m or section.q < self.q:
            raise ValueError("section does not match the system")
        return [sum((a * section[key] for key, a in eq.items()), ZERO_R) for eq in self.equations]

    def contains(self, section: JetSection) -> bool:
        return all(r.is_zero() for r in self.residual(section))

    def matrix_at(self, point, keys=None) -> List[List[Fraction]]:
        keys = keys or self.keys()
        col = {k: j for j, k in enumerate(keys)}
        rows = []
        for eq in self.equations:
            row = [Fraction(0)] * len(keys)
            for key, a in eq.items():
                if key in col:
                    row[col[key]] = a.evaluate(point)
            rows.append(row)
        return rows

    def rank_at(self, point) -> int:
        return rank(self.matrix_at(point)) if self.equations else 0

    def solution_basis_at(self, point) -> List[List[Fraction]]:
        """Basis of the fiber R_q at a point, in :meth:`keys` order."""
        N = self.jet_dim
        return nullspace(self.matrix_at(point), N) if self.equations else nullspace([], N)

    def point(self, values) -> dict:
        return {x: Fraction(v) for x, v in zip(self.coords, values)}

    def __str__(self):
        return f"LinearSystem({self.label or 'unnamed'}: n={self.n}, m={self.m}, q={self.q}, {len(self)} equations)"

    __repr__ = __str__


# -- the builtin systems -----------------------------------------------------------

def _lie_omega(metric: Metric, i: int, j: int) -> Equation:
    """(L(xi_1) w)_ij = w_rj xi^r_i + w_ir xi^r_j + xi^r d_r w_ij."""
    n, X, w = metric.n, metric.coords, metric.w
    eq: Equation = {}
    for r in range(n):
        _acc(eq, (r, mi.unit(n, i)), w[r][j])
        _acc(eq, (r, mi.unit(n, j)), w[i][r])
        _acc(eq, (r, mi.zero(n)), w[i][j].derive(X[r]))
    return eq


def _lie_gamma(gamma: Christoffel, k: int, i: int, j: int) -> Equation:
    """xi^k_ij + g^k_rj xi^r_i + g^k_ir xi^r_j - g^r_ij xi^k_r + xi^r d_r g^k_ij."""
    n, X, g = len(gamma.coords), gamma.coords, gamma.g
    eq: Equation = {(k, mi.add(mi.unit(n, i), mi.unit(n, j))): ONE_R}
    for r in range(n):
        _acc(eq, (r, mi.unit(n, i)), g[k][r][j])
        _acc(eq, (r, mi.unit(n, j)), g[k][i][r])
        _acc(eq, (k, mi.unit(n, r)), -g[r][i][j])
        _acc(eq, (r, mi.zero(n)), g[k][i][j].derive(X[r]))
    return eq


KINDS = ("killing", "weyl", "conformal")


def build_system(metric: Metric, kind: str, order: int = 2) -> LinearSystem:
    """Killing, Weyl or conformal Killing system of the metric.

    The arbitrary A(x) is removed by keeping the trace-free part of L(xi_1)w;
    the arbitrary A_i is removed by contracting k = i, which gives
    A_j = (1/n)(L gamma)^r_{rj}, and substituting back.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    n, w, wi = metric.n, metric.w, metric.inv
    inv_n = Fraction(1, n)
    L1 = {(i, j): _lie_omega(metric, i, j) for i in range(n) for j in range(i, n)}
    sym = lambda i, j: L1[(min(i, j), max(i, j))]
    eqs: List[Equation] = []
    if kind == "killing":
        eqs.extend(L1.values())
    else:
        trace = _combine(*((wi[r][s], sym(r, s)) for r in range(n) for s in range(n)))
        for (i, j), e in L1.items():
            eqs.append(_combine((ONE_R, e), (-w[i][j] * inv_n, trace)))
    if order == 2:
        gamma = christoffel(metric)
        L2 = {(k, i, j): _lie_gamma(gamma, k, i, j) for k in range(n) for i in range(n) for j in range(i, n)}
        get2 = lambda k, i, j: L2[(k, min(i, j), max(i, j))]
        if kind != "conformal":
            eqs.extend(L2.values())
        else:
            T = [_combine(*((ONE_R, get2(r, r, j)) for r in range(n))) for j in range(n)]
            for (k, i, j), e in L2.items():
                terms = [(ONE_R, e)]
                if k == i:
                    terms.append((-inv_n, T[j]))
                if k == j:
                    terms.append((-inv_n, T[i]))
                for s in range(n):
                    if wi[k][s]:
                        terms.append((w[i][j] * wi[k][s] * inv_n, T[s]))
                eqs.append(_combine(*terms))
    return LinearSystem(n, n, order, eqs, metric.coords, f"{kind}/{metric.signature or 'metric'}")


def system_from_generators(theta: Sequence[Sequence], q: int, coords=None, seed: int = 0) -> LinearSystem:
    """Equations annihilating span{j_q(theta_rho)} over the rational functions."""
    theta = [[as_ratfn(a) for a in th] for th in theta]
    n = len(theta[0])
    coords = tuple(coords) if coords is not None else default_coords(n)
    keys = jet_keys(n, n, q)
    rows = []
    for th in theta:
        js = JetSection.holonomic(th, q, coords)
        rows.append([js[k] for k in keys])
    p = len(rows)
    rng = random.Random(seed)
    for _ in range(10):
        pt = {x: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for x in coords}
        try:
            if rank([[a.evaluate(pt) for a in r] for r in rows]) == p:
                break
        except PoleError:
            continue
    else:
        raise RankInstabilityError("j_q(theta) is rank deficient at every sampled point")
    ann = nullspace(rows, len(keys), one=ONE_R, zero=ZERO_R)
    eqs = [{keys[j]: a for j, a in enumerate(v) if a} for v in ann]
    return LinearSystem(n, n, q, eqs, coords, "generators")


def prolong(S: LinearSystem, r: int = 1) -> LinearSystem:
    """Add d_nu of every equation for 1 <= |nu| <= r."""
    if r < 1:
        raise ValueError("prolongation order must be >= 1")
    out = list(S.equations)
    for eq in S.equations:
        layer = {mi.zero(S.n): eq}
        for _ in range(r):
            nxt = {}
            for nu, e in layer.items():
                for i in range(S.n):
                    nu2 = mi.add_unit(nu, i)
                    if nu2 not in nxt:
                        nxt[nu2] = formal_derivative(e, i, S.coords)
            out.extend(nxt.values())
            layer = nxt
    return LinearSystem(S.n, S.m, S.q + r, out, S.coords, f"{S.label}+{r}")


class Symbol:
    """Top-order part of a system: g_q as the kernel of its symbol matrix."""

    def __init__(self, S: LinearSystem):
        self.system = S
        self.keys = [(k, mu) for k in range(S.m) for mu in mi.of_order(S.n, S.q)]

    def matrix_at(self, point):
        rows = self.system.matrix_at(point, self.keys)
        return [r for r in rows if any(r)]

    def kernel_at(self, point) -> List[List[Fraction]]:
        rows = self.matrix_at(point)
        return nullspace(rows, len(self.keys)) if rows else nullspace([], len(self.keys))

    def dim_at(self, point) -> int:
        rows = self.matrix_at(point)
        return len(self.keys) - (rank(rows) if rows else 0)


def symbol(S: LinearSystem) -> Symbol:
    return Symbol(S)


def fiber_dim(S: LinearSystem, point) -> int:
    return S.jet_dim - S.rank_at(point)


def sample_points(S: LinearSystem, count: int, seed: int = 0) -> List[dict]:
    """Deterministic rational points at which every coefficient is finite."""
    rng = random.Random(seed)
    out = []
    for _ in range(100 * count):
        if len(out) == count:
            break
        pt = {x: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for x in S.coords}
        try:
            for eq in S.equations:
                for a in eq.values():
                    a.evaluate(pt)
        except PoleError:
            continue
        out.append(pt)
    if len(out) < count:
        raise PoleError("could not find regular sample points")
    return out


def _stable(values, what):
    if len(set(values)) != 1:
        raise RankInstabilityError(f"{what} differs across sample points: {values}")
    return values[0]


def _delta_rows(n: int, m: int, q: int, r: int, sources, col):
    """Sparse rows delta(dx^I (x) v) for each increasing (r-1)-tuple I and v in sources.

    ``sources`` are vectors {(k, nu): value} with |nu| = q + 1; ``col`` maps
    (I, (k, mu)) to a column index.
    """
    rows = []
    for I in mi.increasing(n, r - 1):
        for v in sources:
            row: Dict[int, Fraction] = {}
            for (k, nu), val in v.items():
                for sign, key, J in delta_terms(n, k, nu, I):
                    c = col[(J, key)]
                    t = row.get(c, 0) + sign * val
                    if t:
                        row[c] = t
                    else:
                        row.pop(c, None)
            if row:
                rows.append(row)
    return rows


def sequence_dims(S: LinearSystem, points=None, seed: int = 0) -> Dict[int, dict]:
    """dim C_r, F_r and C_r(E) for r = 0..n.

    C_r(E) = wedge^r T* (x) J_q(E) / delta(wedge^{r-1} T* (x) S_{q+1} T* (x) E)
    C_r    = wedge^r T* (x) R_q / delta(wedge^{r-1} T* (x) g_{q+1})
    F_r    = dim C_r(E) - dim C_r

    g_{q+1} is the symbol of the first prolongation.  Each row also carries
    ``F_quotient``, the dimension of wedge^r T* (x) J_q(E) modulo
    wedge^r T* (x) R_q + delta(...), computed on its own.  It equals F_r
    exactly when C_r -> C_r(E) is injective (``injective``); for a
    non-involutive symbol such as the conformal g_2 it can be larger.
    ``meta["euler"]`` holds the alternating sums of the C and C(E) rows.
    """
    n, m, q = S.n, S.m, S.q
    points = points or sample_points(S, 3, seed)
    keys = S.keys()
    N = len(keys)
    top = [(k, nu) for k in range(m) for nu in mi.of_order(n, q + 1)]
    S1 = prolong(S, 1)
    sym1 = Symbol(S1)

    per_point = []
    for pt in points:
        Rq = S.solution_basis_at(pt)
        g1 = sym1.kernel_at(pt)
        per_point.append((len(Rq), Rq, [{top[j]: v for j, v in enumerate(b) if v} for b in g1]))
    dimR = _stable([d for d, _, _ in per_point], "dim R_q")
    dimg = _stable([len(g) for _, _, g in per_point], "dim g_{q+1}")

    full_sources = [{key: Fraction(1)} for key in top]
    out = {}
    for r in range(n + 1):
        cols = [(J, key) for J in mi.increasing(n, r) for key in keys]
        col = {c: j for j, c in enumerate(cols)}
        if r >= 1:
            d_full = _delta_rows(n, m, q, r, full_sources, col)
            rk_full = rank_sparse(d_full)
        else:
            d_full, rk_full = [], 0
        cE = comb(n, r) * N - rk_full
        c_vals, f_vals = [], []
        for _, Rq, g1 in per_point:
            rk_g = rank_sparse(_delta_rows(n, m, q, r, g1, col)) if r >= 1 and g1 else 0
            c_vals.append(comb(n, r) * dimR - rk_g)
            wedge_R = []
            for J in mi.increasing(n, r):
                for b in Rq:
                    row = {col[(J, keys[j])]: v for j, v in enumerate(b) if v}
                    if row:
                        wedge_R.append(row)
            f_vals.append(comb(n, r) * N - rank_sparse(wedge_R + d_full))
        C = _stable(c_vals, f"dim C_{r}")
        Fq = _stable(f_vals, f"dim of the Janet quotient at r={r}")
        F = cE - C
        out[r] = {"C": C, "F": F, "CE": cE, "F_quotient": Fq, "injective": Fq == F,
                  "additive": C + F == cE}
    euler_c = sum((-1) ** r * out[r]["C"] for r in range(n + 1))
    euler_e = sum((-1) ** r * out[r]["CE"] for r in range(n + 1))
    out["meta"] = {"dim_R": dimR, "dim_g_next": dimg, "points": len(points),
                   "euler": (euler_c, euler_e)}
    return out


# -- closure -------------------------------------------------------------------------

def solution_basis(S: LinearSystem) -> List[JetSection]:
    """RatFn basis of the fiber solutions as jet sections."""
    keys = S.keys()
    rows = [[eq.get(k, ZERO_R) for k in keys] for eq in S.equations]
    basis = nullspace(rows, len(keys), one=ONE_R, zero=ZERO_R) if rows else \
        nullspace([], len(keys), one=ONE_R, zero=ZERO_R)
    if not basis:
        raise InconsistentSystemError("system has no nonzero solutions")
    return [JetSection(S.n, S.m, S.q, {keys[j]: v for j, v in enumerate(b) if v}, S.coords) for b in basis]


def is_algebroid(S: LinearSystem) -> dict:
    """Test [R_q, R_q] in R_q on a RatFn basis (zero-filled lifts).

    A RatFn basis suffices: [xi, f eta] = f [xi, eta] + (xi . df) eta.
    """
    if S.m != S.n:
        raise ValueError("closure is defined for systems on the tangent bundle")
    basis = solution_basis(S)
    witnesses = []
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            br = differential_bracket(basis[a], basis[b])
            res = S.residual(br)
            for e, v in enumerate(res):
                if v:
                    witnesses.append({"pair": (a, b), "equation": e, "residual": v})
    return {"closed": not witnesses, "basis": basis, "witnesses": witnesses}


__all__ = [
    "Metric", "Christoffel", "christoffel", "LinearSystem", "build_system", "system_from_generators",
    "prolong", "symbol", "Symbol", "fiber_dim", "sequence_dims", "is_algebroid", "solution_basis",
    "formal_derivative", "jet_keys", "sample_points", "RankInstabilityError",
    "InconsistentSystemError", "KINDS",
]
