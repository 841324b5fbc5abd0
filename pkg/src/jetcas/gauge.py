"""Lie algebra data, Maurer-Cartan forms, gauge potentials and the rigid body.

Sign conventions.  Vector fields bracket as ``[xi,eta]^i = xi^r d_r eta^i -
eta^r d_r xi^i`` and ``[theta_rho, theta_sigma] = c^tau_{rho sigma} theta_tau``.
A matrix basis E_tau represents the same algebra when
``E_rho E_sigma - E_sigma E_rho = -c^tau_{rho sigma} E_tau``; with that
choice a^{-1} da has zero curvature ``dA - [A,A]``.  For the affine group
acting by y = a1 x + a2 both descriptions give c^2_{12} = -1.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import multiindex as mi
from .algebra import ONE_R, ZERO_R, PoleError, RatFn, as_ratfn
from .forms import Form, ValueSpace, ext_d, valued_bracket
from .jets import vf_bracket
from .linalg import SingularMatrixError, det, identity, inverse, matmul, rank, rref, solve, transpose


class GaugeError(ValueError):
    pass


class StructureConstants:
    """c^tau_{rho sigma}, stored sparsely as {(tau, rho, sigma): Fraction}."""

    __slots__ = ("p", "entries")

    def __init__(self, p: int, entries=None):
        self.p = p
        full: Dict[Tuple[int, int, int], Fraction] = {}
        for (t, r, s), v in (entries or {}).items():
            v = Fraction(v)
            if not all(0 <= a < p for a in (t, r, s)):
                raise ValueError(f"index {(t, r, s)} out of range for p={p}")
            if r == s:
                if v:
                    raise ValueError("c^t_{rr} must vanish (skew-symmetry)")
                continue
            for key, val in (((t, r, s), v), ((t, s, r), -v)):
                if key in full and full[key] != val:
                    raise ValueError(f"entries at {key} violate skew-symmetry")
                full[key] = val
        self.entries = {k: v for k, v in full.items() if v}

    @classmethod
    def zero(cls, p: int) -> "StructureConstants":
        return cls(p, {})

    @classmethod
    def from_one_based(cls, p: int, entries) -> "StructureConstants":
        return cls(p, {(t - 1, r - 1, s - 1): v for (t, r, s), v in entries.items()})

    def __call__(self, t: int, r: int, s: int) -> Fraction:
        return self.entries.get((t, r, s), Fraction(0))

    def nonzero(self):
        return sorted(self.entries.items())

    def __eq__(self, other):
        if not isinstance(other, StructureConstants):
            return NotImplemented
        return self.p == other.p and self.entries == other.entries

    def __hash__(self):
        return hash((self.p, frozenset(self.entries.items())))

    def __str__(self):
        parts = [f"c^{t + 1}_{r + 1}{s + 1}={v}" for (t, r, s), v in self.nonzero() if r < s]
        return ", ".join(parts) if parts else "0"

    __repr__ = __str__


def check_lie_algebra(c: StructureConstants) -> dict:
    """Residuals of skew-symmetry and of the Jacobi condition

    c^l_{m r} c^m_{s t} + c^l_{m s} c^m_{t r} + c^l_{m t} c^m_{r s} = 0.
    """
    p = c.p
    skew = {}
    for t in range(p):
        for r in range(p):
            for s in range(p):
                v = c(t, r, s) + c(t, s, r)
                if v:
                    skew[(t, r, s)] = v
    jac = {}
    for l in range(p):
        for r in range(p):
            for s in range(p):
                for t in range(p):
                    v = Fraction(0)
                    for m in range(p):
                        v += c(l, m, r) * c(m, s, t) + c(l, m, s) * c(m, t, r) + c(l, m, t) * c(m, r, s)
                    if v:
                        jac[(l, r, s, t)] = v
    return {"skew": skew, "jacobi": jac, "passed": not skew and not jac}


# -- sampling ------------------------------------------------------------------------

def sample_points(variables: Sequence[str], count: int, rng: random.Random, avoid=()) -> List[dict]:
    """Random rational points at which every expression in ``avoid`` is finite and nonzero."""
    pts = []
    tries = 0
    while len(pts) < count:
        tries += 1
        if tries > 200 * (count + 1):
            raise GaugeError("could not find regular sample points")
        pt = {v: Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for v in variables}
        try:
            if any(not as_ratfn(g).evaluate(pt) for g in avoid):
                continue
        except PoleError:
            continue
        pts.append(pt)
    return pts


def infer_structure_constants(theta: Sequence[Sequence], coords, seed: int = 0) -> StructureConstants:
    """Constant c with [theta_rho, theta_sigma] = c^tau_{rho sigma} theta_tau.

    Independence over the constants and the values of c are found at sampled
    points by exact elimination; the identity is then checked as RatFn.
    """
    theta = [[as_ratfn(a) for a in th] for th in theta]
    p, n = len(theta), len(coords)
    rng = random.Random(seed)
    pts = []
    rows: List[List[Fraction]] = []
    for _ in range(4 * p + 4):
        pt = sample_points(coords, 1, rng)[0]
        try:
            block = [[theta[r][i].evaluate(pt) for r in range(p)] for i in range(n)]
        except PoleError:
            continue
        pts.append(pt)
        rows.extend(block)
        if len(pts) >= p + 2 and rank(rows) == p:
            break
    if rank(rows) < p:
        raise GaugeError("generators are linearly dependent over the constants")
    entries = {}
    for r in range(p):
        for s in range(r + 1, p):
            br = vf_bracket(theta[r], theta[s], coords)
            rhs = [br[i].evaluate(pt) for pt in pts for i in range(n)]
            try:
                cs = solve(rows, rhs)
            except SingularMatrixError:
                raise GaugeError(f"[theta_{r + 1}, theta_{s + 1}] is not a constant combination") from None
            for i in range(n):
                acc = sum((theta[t][i] * cs[t] for t in range(p) if cs[t]), ZERO_R)
                if acc != br[i]:
                    raise GaugeError(f"[theta_{r + 1}, theta_{s + 1}] is not a constant combination")
            for t in range(p):
                if cs[t]:
                    entries[(t, r, s)] = cs[t]
    return StructureConstants(p, entries)


# -- group actions and Maurer-Cartan forms -----------------------------------------

class GroupAction:
    """y = f(x, a) with identity parameter ``e``: f(x, e) = x."""

    def __init__(self, f: Sequence, xvars, avars, e: Sequence):
        self.f = [as_ratfn(g) for g in f]
        self.xvars = tuple(xvars)
        self.avars = tuple(avars)
        self.e = [Fraction(v) for v in e]
        self.n, self.p = len(self.xvars), len(self.avars)
        if len(self.f) != self.n or len(self.e) != self.p:
            raise ValueError("action arity mismatch")
        at_e = dict(zip(self.avars, self.e))
        for i, g in enumerate(self.f):
            if g.partial_eval(at_e) != RatFn.var(self.xvars[i]):
                raise GaugeError("f(x, e) != x: e is not the identity parameter")

    def theta(self) -> List[List[RatFn]]:
        """Infinitesimal generators theta_rho^i(x) = d f^i / d a^rho at a = e."""
        at_e = dict(zip(self.avars, self.e))
        return [[g.derive(a).partial_eval(at_e) for g in self.f] for a in self.avars]


class MCResult:
    def __init__(self, omega, c, residual, theta, avars):
        self.omega = omega
        self.c = c
        self.residual = residual
        self.theta = theta
        self.avars = avars

    @property
    def passed(self) -> bool:
        return all(v.is_zero() for v in self.residual.values())

    def forms(self) -> List[Form]:
        """omega^rho = omega^rho_sigma(a) da^sigma as scalar 1-forms."""
        p = len(self.avars)
        return [Form.scalar(self.avars, 1, {(s,): self.omega[r][s] for s in range(p)}) for r in range(p)]


def mc_forms(action: GroupAction, seed: int = 0) -> MCResult:
    """Solve d f^i(x, a) / d a^sigma = theta^i_rho(f(x, a)) omega^rho_sigma(a)."""
    theta = action.theta()
    c = infer_structure_constants(theta, action.xvars, seed)
    p, n = action.p, action.n
    rng = random.Random(seed)
    rows: List[List[RatFn]] = []
    rhs: List[List[RatFn]] = []
    for _ in range(4 * p + 4):
        x0 = sample_points(action.xvars, 1, rng)[0]
        try:
            fx = [g.partial_eval(x0) for g in action.f]
        except PoleError:
            continue
        sub = dict(zip(action.xvars, fx))
        for i in range(n):
            rows.append([theta[r][i].subs(sub) for r in range(p)])
            rhs.append([fx[i].derive(a) for a in action.avars])
        if len(rows) >= p and rank(rows) == p:
            break
    if rank(rows) < p:
        raise GaugeError("action is not effective at the sampled points")
    omega = [[ZERO_R] * p for _ in range(p)]
    for s in range(p):
        try:
            col = solve(rows, [r[s] for r in rhs], zero=ZERO_R)
        except SingularMatrixError:
            raise GaugeError("inconsistent Maurer-Cartan system") from None
        for r in range(p):
            omega[r][s] = col[r]
    if det(omega, one=ONE_R).is_zero():
        raise GaugeError("omega is degenerate")
    # symbolic confirmation with x kept free
    sub = dict(zip(action.xvars, action.f))
    for i in range(n):
        th = [theta[r][i].subs(sub) for r in range(p)]
        for s, a in enumerate(action.avars):
            lhs = action.f[i].derive(a)
            if lhs != sum((th[r] * omega[r][s] for r in range(p)), ZERO_R):
                raise GaugeError("solved omega fails the defining identity symbolically")
    return MCResult(omega, c, mc_residual(omega, c, action.avars), theta, action.avars)


def mc_residual(omega, c: StructureConstants, avars) -> Dict[tuple, RatFn]:
    """d omega^t_s / d a^r - d omega^t_r / d a^s + c^t_{kl} omega^k_r omega^l_s, r < s."""
    p = c.p
    out = {}
    for t in range(p):
        for r, s in mi.increasing(len(avars), 2):
            v = omega[t][s].derive(avars[r]) - omega[t][r].derive(avars[s])
            for (tt, k, l), cv in c.nonzero():
                if tt == t:
                    v = v + omega[k][r] * omega[l][s] * cv
            out[(t, r, s)] = v
    return out


# -- matrix data -------------------------------------------------------------------

class MatrixMap:
    """Matrix-valued map a(x) with RatFn entries and a checked inverse."""

    def __init__(self, entries, coords, inverse_entries=None):
        self.a = [[as_ratfn(v) for v in row] for row in entries]
        self.coords = tuple(coords)
        self.s = len(self.a)
        if any(len(row) != self.s for row in self.a):
            raise ValueError("matrix map must be square")
        if inverse_entries is not None:
            inv = [[as_ratfn(v) for v in row] for row in inverse_entries]
            if matmul(self.a, inv) != identity(self.s, ONE_R, ZERO_R):
                raise GaugeError("supplied inverse does not invert the matrix")
        else:
            if det(self.a, one=ONE_R).is_zero():
                raise SingularMatrixError("matrix map is not invertible")
            inv = inverse(self.a, one=ONE_R, zero=ZERO_R)
        self.inv = inv

    def d(self, i: int):
        x = self.coords[i]
        return [[v.derive(x) for v in row] for row in self.a]

    def __matmul__(self, other: "MatrixMap") -> "MatrixMap":
        if self.coords != other.coords:
            raise ValueError("matrix maps on different coordinates")
        return MatrixMap(matmul(self.a, other.a), self.coords, matmul(other.inv, self.inv))

    def inverse_map(self) -> "MatrixMap":
        return MatrixMap(self.inv, self.coords, self.a)


def cayley(K, coords) -> MatrixMap:
    """(I - K)^{-1} (I + K) for a skew RatFn matrix K: an orthogonal matrix map."""
    K = [[as_ratfn(v) for v in row] for row in K]
    s = len(K)
    for i in range(s):
        for j in range(s):
            if K[i][j] != -K[j][i]:
                raise GaugeError("Cayley parameter must be skew-symmetric")
    I = identity(s, ONE_R, ZERO_R)
    minus = [[I[i][j] - K[i][j] for j in range(s)] for i in range(s)]
    plus = [[I[i][j] + K[i][j] for j in range(s)] for i in range(s)]
    a = matmul(inverse(minus, one=ONE_R, zero=ZERO_R), plus)
    return MatrixMap(a, coords, transpose(a))


def _madd(A, B):
    return [[x + y for x, y in zip(r, t)] for r, t in zip(A, B)]


def _msub(A, B):
    return [[x - y for x, y in zip(r, t)] for r, t in zip(A, B)]


class MatrixRep:
    """A Lie algebra given by constant basis matrices E_tau."""

    def __init__(self, basis):
        self.basis = [[[Fraction(v) for v in row] for row in E] for E in basis]
        self.p = len(self.basis)
        self.s = len(self.basis[0])
        flat = [[E[u][v] for u in range(self.s) for v in range(self.s)] for E in self.basis]
        # pivot columns: p entry positions on which the basis is invertible
        _, pos = rref(flat)
        if len(pos) != self.p:
            raise ValueError("basis matrices are linearly dependent")
        self._pos = pos
        sub = [[flat[t][q] for t in range(self.p)] for q in pos]
        self._sub_inv = inverse(sub)

    @classmethod
    def gl(cls, s: int) -> "MatrixRep":
        basis = []
        for u in range(s):
            for v in range(s):
                basis.append([[1 if (i, j) == (u, v) else 0 for j in range(s)] for i in range(s)])
        return cls(basis)

    def structure_constants(self) -> StructureConstants:
        entries = {}
        for r in range(self.p):
            for s in range(r + 1, self.p):
                Er, Es = self.basis[r], self.basis[s]
                comm = _msub(matmul(Er, Es), matmul(Es, Er))
                coeffs = self.decompose(comm)
                for t, v in enumerate(coeffs):
                    if v:
                        entries[(t, r, s)] = -v
        return StructureConstants(self.p, entries)

    def to_matrix(self, coeffs):
        s = self.s
        M = [[ZERO_R] * s for _ in range(s)]
        for t, cf in enumerate(coeffs):
            cf = as_ratfn(cf) if not isinstance(cf, Fraction) else cf
            if not cf:
                continue
            E = self.basis[t]
            for u in range(s):
                for v in range(s):
                    if E[u][v]:
                        M[u][v] = M[u][v] + cf * E[u][v]
        return M

    def decompose(self, M):
        s = self.s
        flat = [M[u][v] for u in range(s) for v in range(s)]
        picked = [flat[q] for q in self._pos]
        coeffs = []
        for t in range(self.p):
            acc = ZERO_R if any(isinstance(x, RatFn) for x in picked) else Fraction(0)
            for j, x in enumerate(picked):
                if self._sub_inv[t][j] and x:
                    acc = acc + x * self._sub_inv[t][j]
            coeffs.append(acc)
        back = self.to_matrix(coeffs)
        for u in range(s):
            for v in range(s):
                if as_ratfn(back[u][v]) != as_ratfn(M[u][v]):
                    raise GaugeError("matrix leaves the span of the representation")
        return coeffs


def _form_from_matrices(mats, rep: MatrixRep, coords) -> Form:
    comps = {}
    for i, M in enumerate(mats):
        for t, v in enumerate(rep.decompose(M)):
            comps[(t, (i,))] = v
    return Form(ValueSpace.lie(rep.p), 1, coords, comps)


def form_matrices(A: Form, rep: MatrixRep):
    """The matrices A_i = A^tau_i E_tau of a lie-valued 1-form."""
    return [rep.to_matrix([A[(t, (i,))] for t in range(rep.p)]) for i in range(A.n)]


def gauge_potentials(a: MatrixMap, rep: Optional[MatrixRep] = None) -> Tuple[Form, Form]:
    """A = a^{-1} da and B = da a^{-1}; also confirms B = -a d(a^{-1})."""
    rep = rep or MatrixRep.gl(a.s)
    Am, Bm = [], []
    for i, x in enumerate(a.coords):
        da = a.d(i)
        Am.append(matmul(a.inv, da))
        Bm.append(matmul(da, a.inv))
        dinv = [[v.derive(x) for v in row] for row in a.inv]
        alt = [[-v for v in row] for row in matmul(a.a, dinv)]
        if alt != Bm[-1]:
            raise ArithmeticError("da a^-1 != -a d(a^-1)")
    return _form_from_matrices(Am, rep, a.coords), _form_from_matrices(Bm, rep, a.coords)


def curvature(A: Form, c: StructureConstants) -> Form:
    """F^t_ij = d_i A^t_j - d_j A^t_i - c^t_{rs} A^r_i A^s_j, i.e. F = dA - [A,A]."""
    if A.space.kind != "lie" or A.space.dims[0] != c.p:
        raise ValueError("dimension mismatch between A and c")
    return ext_d(A) - valued_bracket(A, A, c)


def right_curvature(B: Form, c: StructureConstants) -> Form:
    """dB + [B,B], which vanishes for B = da a^{-1}."""
    return ext_d(B) + valued_bracket(B, B, c)


def gauge_transform(A: Form, b: MatrixMap, c: StructureConstants,
                    rep: Optional[MatrixRep] = None) -> Form:
    """A' = b^{-1} A b + b^{-1} db, computed matrixwise."""
    rep = rep or MatrixRep.gl(b.s)
    if rep.structure_constants() != c:
        raise GaugeError("structure constants do not match the matrix representation")
    if A.coords != b.coords:
        raise ValueError("A and b live on different coordinates")
    mats = []
    for i, Ai in enumerate(form_matrices(A, rep)):
        conj = matmul(b.inv, matmul(Ai, b.a))
        mats.append(_madd(conj, matmul(b.inv, b.d(i))))
    return _form_from_matrices(mats, rep, A.coords)


def adjoint_conjugate(F: Form, b: MatrixMap, rep: Optional[MatrixRep] = None) -> Form:
    """b^{-1} F b for a lie-valued form of any degree."""
    rep = rep or MatrixRep.gl(b.s)
    comps = {}
    for I in mi.increasing(F.n, F.degree):
        M = rep.to_matrix([F[(t, I)] for t in range(rep.p)])
        for t, v in enumerate(rep.decompose(matmul(b.inv, matmul(M, b.a)))):
            comps[(t, I)] = v
    return Form(F.space, F.degree, F.coords, comps)


def infinitesimal_variation(A: Form, lam: Form, c: StructureConstants) -> Form:
    """delta A^t_i = d_i lambda^t - c^t_{rs} A^r_i lambda^s."""
    if lam.degree != 0 or lam.space != A.space:
        raise ValueError("lambda must be a lie-valued 0-form matching A")
    out = ext_d(lam)
    comps = dict(out.comps)
    for (t, r, s), cv in c.nonzero():
        ls = lam[(s, ())]
        if not ls:
            continue
        for i in range(A.n):
            ar = A[(r, (i,))]
            if ar:
                key = (t, (i,))
                term = -(ar * ls * cv)
                comps[key] = comps[key] + term if key in comps else term
    return Form(A.space, 1, A.coords, comps)


class Momenta:
    """mom[i][tau] = cal A^i_tau."""

    def __init__(self, entries):
        self.m = [[as_ratfn(v) for v in row] for row in entries]
        self.n = len(self.m)
        self.p = len(self.m[0]) if self.m else 0


def euler_lagrange_residual(mom: Momenta, A: Form, c: StructureConstants,
                            a: Optional[MatrixMap] = None, rep: Optional[MatrixRep] = None) -> dict:
    """d_i cal A^i_t + c^s_{rt} A^r_i cal A^i_s, and optionally the divergence form.

    With a matrix map ``a`` (A expected to be a^{-1} da in ``rep``), set
    cal B_s = cal A_t Ad(a)^t_s where a^{-1} E_s a = Ad(a)^t_s E_t.  Then
    d_i cal B^i_s = EL_t Ad(a)^t_s, reported as ``divergence_residual``.
    """
    n, p = A.n, c.p
    if mom.n != n or mom.p != p:
        raise ValueError("momenta arity mismatch")
    X = A.coords
    res = []
    for t in range(p):
        v = ZERO_R
        for i in range(n):
            v = v + mom.m[i][t].derive(X[i])
        for (s, r, tt), cv in c.nonzero():
            if tt != t:
                continue
            for i in range(n):
                v = v + A[(r, (i,))] * mom.m[i][s] * cv
        res.append(v)
    out = {"residual": res, "divergence": None, "divergence_residual": None}
    if a is not None:
        rep = rep or MatrixRep.gl(a.s)
        Ad = [rep.decompose(matmul(a.inv, matmul(rep.to_matrix([ONE_R if u == s else ZERO_R for u in range(p)]), a.a)))
              for s in range(p)]  # Ad[s][t] = Ad(a)^t_s
        Bm = [[sum((mom.m[i][t] * Ad[s][t] for t in range(p)), ZERO_R) for s in range(p)] for i in range(n)]
        div = [sum((Bm[i][s].derive(X[i]) for i in range(n)), ZERO_R) for s in range(p)]
        out["divergence"] = div
        out["B"] = Bm
        out["divergence_residual"] = [div[s] - sum((res[t] * Ad[s][t] for t in range(p)), ZERO_R)
                                      for s in range(p)]
    return out


# -- rigid body --------------------------------------------------------------------

def axial_vector(W):
    """w with W x = w cross x for a skew 3x3 matrix."""
    return [W[2][1], W[0][2], W[1][0]]


def _is_skew(M) -> bool:
    s = len(M)
    return all(M[i][j] == -M[j][i] for i in range(s) for j in range(s))


def rigid_body(a: MatrixMap, b: Sequence, t: str = "t", xvars=("x1", "x2", "x3")) -> dict:
    """Relative and Eulerian forms of x = a(t) x0 + b(t), with the vortex check."""
    if a.s != 3:
        raise ValueError("rigid body motion needs a 3x3 rotation")
    if matmul(transpose(a.a), a.a) != identity(3, ONE_R, ZERO_R):
        raise GaugeError("a(t) is not orthogonal")
    b = [as_ratfn(v) for v in b]
    ti = a.coords.index(t)
    adot = a.d(ti)
    bdot = [v.derive(t) for v in b]
    rel_rot = matmul(a.inv, adot)
    rel_tr = [sum((a.inv[i][j] * bdot[j] for j in range(3)), ZERO_R) for i in range(3)]
    W = matmul(adot, a.inv)
    eul_tr = [bdot[i] - sum((W[i][j] * b[j] for j in range(3)), ZERO_R) for i in range(3)]
    x = [RatFn.var(v) for v in xvars]
    v = [sum((W[i][j] * x[j] for j in range(3)), ZERO_R) + eul_tr[i] for i in range(3)]
    curl = [v[2].derive(xvars[1]) - v[1].derive(xvars[2]),
            v[0].derive(xvars[2]) - v[2].derive(xvars[0]),
            v[1].derive(xvars[0]) - v[0].derive(xvars[1])]
    w = axial_vector(W)
    vortex_res = [curl[i] - w[i] * 2 for i in range(3)]
    return {
        "relative": (rel_rot, rel_tr),
        "eulerian": (W, eul_tr),
        "velocity": v,
        "curl": curl,
        "vortex": w,
        "relative_skew": _is_skew(rel_rot),
        "eulerian_skew": _is_skew(W),
        "vortex_residual": vortex_res,
        "passed": _is_skew(rel_rot) and _is_skew(W) and all(r.is_zero() for r in vortex_res),
    }


__all__ = [
    "StructureConstants", "check_lie_algebra", "infer_structure_constants", "GroupAction",
    "mc_forms", "mc_residual", "MCResult", "MatrixMap", "MatrixRep", "cayley",
    "gauge_potentials", "curvature", "right_curvature", "gauge_transform", "adjoint_conjugate",
    "infinitesimal_variation", "Momenta", "euler_lagrange_residual", "rigid_body",
    "axial_vector", "form_matrices", "sample_points", "GaugeError",
]
