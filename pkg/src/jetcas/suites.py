"""Named verification suites.

Every suite takes a seed and an optional config dict and returns a list of
:class:`Check` records in a fixed order.  Random instances come from
``random.Random`` seeded per suite, so a seed determines the report.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

from . import config as cfgmod
from . import multiindex as mi
from .adjoint import (DiffOp, OperatorMatrix, dual_spencer_1d, em_invariance_residual,
                      exterior_derivative_matrix, inverse_jacobian_divergence, op_adjoint, op_mul,
                      volume_right_action, witness_check)
from .algebra import ONE_R, ZERO_R, RatFn, parse_expr
from .forms import Form, ValueSpace, ext_d, spencer_delta
from .gauge import (GroupAction, MatrixMap, MatrixRep, Momenta, StructureConstants, adjoint_conjugate,
                    cayley, check_lie_algebra, curvature, euler_lagrange_residual, gauge_potentials,
                    gauge_transform, infinitesimal_variation, mc_forms, right_curvature, rigid_body)
from .jets import (JetMapSection, JetSection, differential_bracket, jet_compose, jet_invert,
                   jet_prolong_map, vf_bracket)
from .lie_equations import (KINDS, LinearSystem, Metric, build_system, christoffel, fiber_dim,
                            is_algebroid, sequence_dims, system_from_generators)
from .randgen import (random_jet_section, random_nonholonomic, random_poly, random_triangular_map,
                      random_vector_field)
from .spencer import (Chi, chi, chi_cc_residual, connection_curvature, dbar_cocycle_residual,
                      killing_connection, linear_F_2form, nl_gauge_transform, phi_2form,
                      rewritten_cc_residual, variation_chi, variation_target)


@dataclass
class Check:
    name: str
    passed: bool
    residual_degree: Optional[int] = None
    detail: str = ""

    def as_dict(self) -> dict:
        d = {"name": self.name, "status": "PASS" if self.passed else "FAIL"}
        if self.residual_degree is not None:
            d["residual_degree"] = self.residual_degree
        if self.detail:
            d["detail"] = self.detail
        return d


def _values(obj):
    if obj is None:
        return
    if isinstance(obj, RatFn):
        yield obj
    elif isinstance(obj, dict):
        for v in obj.values():
            yield from _values(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            yield from _values(v)
    elif isinstance(obj, (Form, Chi, JetSection)):
        yield from obj.comps.values()
    else:
        raise TypeError(f"cannot read residuals from {type(obj).__name__}")


def degree_of(*residuals) -> Optional[int]:
    """Largest numerator degree among nonzero residuals, None if all vanish."""
    best = None
    for r in residuals:
        for v in _values(r):
            if v:
                d = v.num.degree()
                best = d if best is None else max(best, d)
    return best


def zero_check(name: str, *residuals, detail: str = "") -> Check:
    deg = degree_of(*residuals)
    return Check(name, deg is None, deg, detail)


def witness_check_nonzero(name: str, witness, detail: str = "") -> Check:
    """Passes when a deliberately broken instance leaves a nonzero residual."""
    deg = degree_of(witness)
    return Check(name, deg is not None, None, detail or ("nonzero witness found" if deg is not None else "no witness"))


def _rng(seed: int, salt: int) -> random.Random:
    return random.Random(seed * 7919 + salt)


def _many(name: str, items, fn) -> Check:
    """Aggregate identically-zero residuals over a family of instances."""
    worst = None
    count = 0
    for it in items:
        count += 1
        d = degree_of(fn(it))
        if d is not None:
            worst = d if worst is None else max(worst, d)
    return Check(name, worst is None, worst, f"{count} instances")


# -- configurable inputs --------------------------------------------------------------

AFFINE_ACTION = {
    "schema": 1,
    "action": {"x": ["x"], "a": ["a1", "a2"], "f": ["a1*x + a2"], "e": [1, 0]},
    "expect": {"omega": [["1/a1", "0"], ["-a2/a1", "1"]],
               "c": [[2, 1, 2, -1]]},
}

RIGID_BODY = {
    "schema": 1,
    "rigid_body": {"t": "t", "x": ["x1", "x2", "x3"],
                   "K": [["0", "-t", "0"], ["t", "0", "0"], ["0", "0", "0"]],
                   "b": ["t", "t^2", "0"]},
}


def _action_from(cfg) -> tuple:
    sec = cfgmod.section(cfg, "action")
    xs = cfgmod.names(sec.get("x"), "action.x")
    avs = cfgmod.names(sec.get("a"), "action.a")
    fs = sec.get("f")
    if not isinstance(fs, list) or len(fs) != len(xs):
        raise cfgmod.ConfigError("action.f must list one expression per x variable")
    f = [cfgmod.expr(s, xs + avs, f"action.f[{i}]") for i, s in enumerate(fs)]
    e = sec.get("e")
    if not isinstance(e, list) or len(e) != len(avs):
        raise cfgmod.ConfigError("action.e must give one value per parameter")
    e = [cfgmod.fraction(v, f"action.e[{i}]") for i, v in enumerate(e)]
    try:
        act = GroupAction(f, xs, avs, e)
    except ValueError as exc:
        raise cfgmod.ConfigError(f"action: {exc}") from None
    expect = cfg.get("expect") or {}
    omega = None
    if "omega" in expect:
        omega = cfgmod.matrix(expect["omega"], avs, "expect.omega")
    c = None
    if "c" in expect:
        entries = {}
        for j, row in enumerate(expect["c"]):
            if not isinstance(row, list) or len(row) != 4:
                raise cfgmod.ConfigError(f"expect.c[{j}] must be [tau, rho, sigma, value] (1-based)")
            entries[tuple(int(v) for v in row[:3])] = cfgmod.fraction(row[3], f"expect.c[{j}]")
        c = StructureConstants.from_one_based(len(avs), entries)
    return act, omega, c


def suite_mc(seed: int = 0, cfg: Optional[dict] = None) -> List[Check]:
    act, omega_exp, c_exp = _action_from(cfg or AFFINE_ACTION)
    res = mc_forms(act, seed)
    out = [
        zero_check("mc.residual", res.residual),
        Check("mc.lie_algebra", check_lie_algebra(res.c)["passed"], None, str(res.c)),
    ]
    if omega_exp is not None:
        diff = [[res.omega[r][s] - omega_exp[r][s] for s in range(act.p)] for r in range(act.p)]
        out.append(zero_check("mc.expected_omega", diff))
    if c_exp is not None:
        out.append(Check("mc.expected_c", res.c == c_exp, None, str(res.c)))
    trans = mc_forms(GroupAction([parse_expr("x + a")], ["x"], ["a"], [0]), seed)
    out.append(zero_check("mc.translation", trans.residual, [[trans.omega[0][0] - ONE_R]]))
    proj = mc_forms(GroupAction([parse_expr("(a1*x + a2)/(a3*x + 1)")], ["x"], ["a1", "a2", "a3"], [1, 0, 0]), seed)
    out.append(zero_check("mc.projective_residual", proj.residual))
    out.append(Check("mc.projective_lie_algebra", check_lie_algebra(proj.c)["passed"], None, str(proj.c)))
    return out


# -- brackets ---------------------------------------------------------------------------

def _example_bracket_formulas(rng) -> list:
    X = ("x",)
    xi = random_jet_section(rng, 1, 1, 2, X, degree=3, terms=3)
    eta = random_jet_section(rng, 1, 1, 2, X, degree=3, terms=3)
    z, o, t = (0,), (1,), (2,)
    b = differential_bracket(xi, eta)
    d = lambda f: f.derive("x")
    x0, x1, x2 = xi[(0, z)], xi[(0, o)], xi[(0, t)]
    e0, e1, e2 = eta[(0, z)], eta[(0, o)], eta[(0, t)]
    return [
        b[(0, z)] - (x0 * d(e0) - e0 * d(x0)),
        b[(0, o)] - (x0 * d(e1) - e0 * d(x1)),
        b[(0, t)] - (x1 * e2 - e1 * x2 + x0 * d(e2) - e0 * d(x2)),
    ]


def _jacobi(rng):
    n = rng.choice([1, 2])
    X = ("x1", "x2")[:n]
    a, b, c = (random_jet_section(rng, n, n, 2, X) for _ in range(3))
    br = differential_bracket
    return (br(a, br(b, c)) + br(b, br(c, a)) + br(c, br(a, b))).comps


def _lift_independence(rng):
    n = rng.choice([1, 2])
    X = ("x1", "x2")[:n]
    a, b = random_jet_section(rng, n, n, 2, X), random_jet_section(rng, n, n, 2, X)
    top = [(k, mu) for k in range(n) for mu in mi.of_order(n, 3)]
    la = a.lift({key: random_poly(rng, X, 2, 2) for key in top})
    lb = b.lift({key: random_poly(rng, X, 2, 2) for key in top})
    return (differential_bracket(a, b, (la, lb)) - differential_bracket(a, b)).comps


def _holonomic_bracket(rng):
    n = rng.choice([1, 2])
    X = ("x1", "x2")[:n]
    u, v = random_vector_field(rng, X, 3, 3), random_vector_field(rng, X, 3, 3)
    lhs = differential_bracket(JetSection.holonomic(u, 2, X), JetSection.holonomic(v, 2, X))
    return (lhs - JetSection.holonomic(vf_bracket(u, v, X), 2, X)).comps


def perturbed_killing_system() -> LinearSystem:
    """Euclidean n=2 Killing system with the xi^1_2 coefficient in E_12 changed to 1 + x1.

    Found by a build-time search over single-coefficient perturbations; its
    solution basis is not closed under the bracket.
    """
    S = build_system(Metric.euclidean(2), "killing")
    eqs = [dict(e) for e in S.equations]
    key = (0, (0, 1))
    tgt = next(i for i, e in enumerate(eqs) if key in e and (1, (1, 0)) in e)
    eqs[tgt][key] = eqs[tgt][key] + RatFn.var("x1")
    return LinearSystem(2, 2, 2, eqs, S.coords, "killing/perturbed")


def perturbed_affine_system() -> LinearSystem:
    """xi_xx = x xi_x: a 2-dimensional system whose bracket leaves it."""
    return LinearSystem(1, 1, 2, [{(0, (2,)): ONE_R, (0, (1,)): -RatFn.var("x")}], ("x",), "affine/perturbed")


def suite_brackets(seed: int = 0, cfg: Optional[dict] = None) -> List[Check]:
    rng = _rng(seed, 2)
    out = [
        _many("brackets.example_formulas", range(5), lambda _: _example_bracket_formulas(rng)),
        _many("brackets.holonomic", range(10), lambda _: _holonomic_bracket(rng)),
        _many("brackets.jacobi", range(20), lambda _: _jacobi(rng)),
        _many("brackets.lift_independence", range(20), lambda _: _lift_independence(rng)),
    ]
    affine = system_from_generators([[ONE_R], [RatFn.var("x")]], 2, ("x",), seed)
    rep = is_algebroid(affine)
    out.append(Check("brackets.affine_closure", rep["closed"], None, f"{len(rep['basis'])}-dim fiber"))
    rep = is_algebroid(build_system(Metric.euclidean(2), "killing"))
    out.append(Check("brackets.killing_closure", rep["closed"], None, f"{len(rep['basis'])}-dim fiber"))
    for nm, S in (("brackets.perturbed_killing_not_closed", perturbed_killing_system()),
                  ("brackets.perturbed_affine_not_closed", perturbed_affine_system())):
        rep = is_algebroid(S)
        out.append(witness_check_nonzero(nm, [w["residual"] for w in rep["witnesses"]]))
    return out


# -- chi ------------------------------------------------------------------------------------

X2, Y2, Z2 = ("x1", "x2"), ("y1", "y2"), ("z1", "z2")
X1, Y1, Z1 = ("x",), ("y",), ("z",)


def _example_chi():
    h = parse_expr("1 + x^2")
    f = JetMapSection(1, 2, {(0, (0,)): RatFn.var("x"), (0, (1,)): ONE_R, (0, (2,)): h}, X1, Y1)
    c = chi(f)
    return [c[(0, (0,), 0)], c[(0, (1,), 0)] + h]


def perturbed_chi(c: Chi) -> Chi:
    """Change a trace component of chi by x2 (a frozen broken fixture); the
    trace one-form then stops being closed."""
    comps = dict(c.comps)
    key = (1, mi.unit(c.n, 1), 0)
    comps[key] = comps.get(key, ZERO_R) + RatFn.var(c.coords[1])
    return Chi(c.n, c.q, comps, c.coords)


def suite_chi(seed: int = 0, cfg: Optional[dict] = None) -> List[Check]:
    rng = _rng(seed, 3)
    out = [zero_check("chi.example", _example_chi())]
    fmap, _inv = random_triangular_map(rng, X2, Y2, 3, 3)
    out.append(zero_check("chi.holonomic_kernel", chi(jet_prolong_map(fmap, 3, X2, Y2)).comps))

    def cc_first(_):
        f, _inv = random_nonholonomic(rng, 2, 2, X2, Y2)
        c = chi(f)
        return [chi_cc_residual(c)[0], rewritten_cc_residual(c)[0]]

    def cc_second(_):
        f, _inv = random_nonholonomic(rng, 2, 3, X2, Y2)
        c = chi(f)
        return [chi_cc_residual(c), rewritten_cc_residual(c)]

    out.append(_many("chi.cc_first", range(20), cc_first))
    out.append(_many("chi.cc_second", range(10), cc_second))
    f, _inv = random_nonholonomic(rng, 2, 3, X2, Y2)
    out.append(witness_check_nonzero("chi.perturbed_cc_witness", chi_cc_residual(perturbed_chi(chi(f)))))

    def cocycle(k):
        if k % 2:
            f, _a = random_nonholonomic(rng, 1, 2, X1, Y1)
            g, _b = random_nonholonomic(rng, 1, 2, Y1, Z1)
        else:
            f, _a = random_nonholonomic(rng, 2, 2, X2, Y2)
            g, _b = random_nonholonomic(rng, 2, 2, Y2, Z2)
        return dbar_cocycle_residual(f, g).comps

    out.append(_many("chi.cocycle", range(10), cocycle))

    def round_trip(_):
        f, finv = random_nonholonomic(rng, 2, 2, X2, Y2)
        g, _b = random_nonholonomic(rng, 2, 2, Y2, Z2)
        c = chi(g)
        moved = nl_gauge_transform(c, f)
        back = nl_gauge_transform(moved, jet_invert(f, finv))
        return [(moved - chi(jet_compose(g, f))).comps, (back - c).comps, chi_cc_residual(moved)[0]]

    out.append(_many("chi.gauge_round_trip", range(10), round_trip))

    def variation(_):
        f, finv = random_nonholonomic(rng, 1, 3, X1, Y1)
        xi = random_jet_section(rng, 1, 1, 2, X1)
        src, _d = variation_chi(chi(f.project(2)), xi)
        return (src - variation_target(f, xi, finv)).comps

    out.append(_many("chi.variation_target", range(3), variation))
    return out


# -- Proposition: closed 2-forms ---------------------------------------------------------

def suite_prop31(seed: int = 0, cfg: Optional[dict] = None) -> List[Check]:
    rng = _rng(seed, 4)

    def phi(_):
        f, _inv = random_nonholonomic(rng, 2, 3, X2, Y2)
        form, res = phi_2form(chi(f))
        return [res.comps, ext_d(form).comps]

    out = [_many("prop31.phi_exact", range(10), phi)]
    f, _inv = random_nonholonomic(rng, 2, 3, X2, Y2)
    out.append(witness_check_nonzero("prop31.perturbed_phi_witness", phi_2form(perturbed_chi(chi(f)))[1]))

    M = Metric.diagonal([1, parse_expr("x1^2")], X2)
    gamma = christoffel(M)

    def chain(_):
        xi = random_jet_section(rng, 2, 2, 3, X2)
        return linear_F_2form(xi, gamma.g)["residuals"]

    out.append(_many("prop31.linear_chain", range(5), chain))
    X4 = ("x1", "x2", "x3", "x4")
    xi4 = random_jet_section(rng, 4, 4, 3, X4, degree=2, terms=1)
    flat = [[[ZERO_R] * 4 for _ in range(4)] for _ in range(4)]
    out.append(zero_check("prop31.linear_chain_n4", linear_F_2form(xi4, flat)["residuals"]))
    out.append(zero_check("prop31.christoffel_trace", gamma.trace_residual()))
    conn = killing_connection(gamma.g, X2)
    kappa = connection_curvature(conn, build_system(M, "killing", order=1))
    out.append(zero_check("prop31.flat_connection_curvature", kappa.comps,
                          detail="polar form of the flat metric"))
    return out


# -- adjoint -----------------------------------------------------------------------------

def random_diffop(rng, coords, order=3, terms=3, degree=3) -> DiffOp:
    n = len(coords)
    pool = mi.up_to(n, order)
    t = {}
    for _ in range(terms):
        t[rng.choice(pool)] = random_poly(rng, coords, degree, 2)
    return DiffOp(t, coords)


def _coords(n):
    return ("x1", "x2", "x3")[:n]


def suite_adjoint(seed: int = 0, cfg: Optional[dict] = None) -> List[Check]:
    rng = _rng(seed, 5)
    ops = []
    for _ in range(100):
        n = rng.randint(1, 3)
        X = _coords(n)
        ops.append((random_diffop(rng, X), random_diffop(rng, X, order=2)))
    out = [
        Check("adjoint.involution", all(op_adjoint(op_adjoint(P)) == P for P, _ in ops), None, "100 operators"),
        Check("adjoint.contravariance",
              all(op_adjoint(op_mul(P, Q)) == op_mul(op_adjoint(Q), op_adjoint(P)) for P, Q in ops),
              None, "100 pairs"),
    ]
    mats = [OperatorMatrix([[P, Q], [Q, P]], P.coords) for P, Q in ops[:10]]
    out.append(_many("adjoint.witness", [P for P, _ in ops] + mats, lambda D: witness_check(D)))
    ds = dual_spencer_1d(2)
    expected = ["∂_xσ = f", "∂_xμ + σ = m", "∂_xν + μ = j"]
    out.append(Check("adjoint.dual_spencer_equations", ds["equation_strings"] == expected, None,
                     "; ".join(ds["equation_strings"])))
    out.append(Check("adjoint.dual_spencer_witness", ds["witness_string"] == "σξ + μξ_x + νξ_xx", None,
                     ds["witness_string"]))
    out.append(zero_check("adjoint.dual_spencer_identity", witness_check(ds["operator"])))

    def jacobian_divergence(k):
        n = 2 + k % 2
        X = _coords(n)
        Y = ("y1", "y2", "y3")[:n]
        f, g = random_triangular_map(rng, X, Y)
        return inverse_jacobian_divergence(f, g, X, Y)

    out.append(_many("adjoint.jacobian_divergence", range(10), jacobian_divergence))

    def em(k):
        X = _coords(2)
        if k == 0:
            f, g = [RatFn.var(x) for x in X], None
        else:
            f, g = random_triangular_map(rng, X, ("y1", "y2"))
        w = random_poly(rng, X, 3, 3)
        r = em_invariance_residual(f, [[ZERO_R, w], [-w, ZERO_R]], X, g, ("y1", "y2") if g else None)
        return [r["transport"], r["second_derivative"]]

    out.append(_many("adjoint.em_invariance", range(6), em))
    X4 = _coords(3) + ("x4",)
    d1, d2 = exterior_derivative_matrix(4, 1, X4), exterior_derivative_matrix(4, 2, X4)
    out.append(Check("adjoint.exterior_dual", (d2 @ d1).is_zero() and (d1.adjoint() @ d2.adjoint()).is_zero(),
                     None, "n=4, degrees 1 -> 2 -> 3"))

    def volume(_):
        X = _coords(2)
        alpha = Form.scalar(X, 2, {(0, 1): random_poly(rng, X, 3, 3)})
        u, v = random_vector_field(rng, X, 2, 2), random_vector_field(rng, X, 2, 2)
        U, V = DiffOp.vector_field(u, X), DiffOp.vector_field(v, X)
        lhs = volume_right_action(alpha, op_mul(U, V) - op_mul(V, U))
        rhs = volume_right_action(alpha, vf_bracket(u, v, X))
        return (lhs - rhs).comps

    out.append(_many("adjoint.volume_right_action", range(10), volume))
    return out


# -- gauge -------------------------------------------------------------------------------

def _random_cayley(rng, s, X, degree=1, terms=2):
    K = [[ZERO_R] * s for _ in range(s)]
    for i in range(s):
        for j in range(i + 1, s):
            p = random_poly(rng, X, degree, terms)
            K[i][j], K[j][i] = p, -p
    return cayley(K, X)


def _random_unipotent(rng, s, X):
    a = [[ONE_R if i == j else (random_poly(rng, X, 2, 2) if j > i else ZERO_R) for j in range(s)]
         for i in range(s)]
    return MatrixMap(a, X)


def suite_gauge(seed: int = 0, cfg: Optional[dict] = None) -> List[Check]:
    rng = _rng(seed, 6)
    X = ("x1", "x2")
    gl3 = MatrixRep.gl(3)
    c3 = gl3.structure_constants()
    maps = [_random_cayley(rng, 3, X) for _ in range(3)] + [_random_unipotent(rng, 3, X) for _ in range(3)]

    def pure(a):
        A, B = gauge_potentials(a, gl3)
        return [curvature(A, c3).comps, right_curvature(B, c3).comps]

    out = [_many("gauge.pure_gauge_curvature", maps, pure)]
    A_rand = Form.lie_one_form(X, [[random_poly(rng, X, 2, 2) for _ in X] for _ in range(9)])
    out.append(witness_check_nonzero("gauge.non_pure_curvature_witness", curvature(A_rand, c3).comps))

    def d_squared(_):
        lie = Form.lie_one_form(X + ("x3",), [[random_poly(rng, X + ("x3",), 3, 3) for _ in range(3)]
                                              for _ in range(2)])
        return ext_d(ext_d(lie)).comps

    out.append(_many("gauge.d_squared", range(5), d_squared))

    def delta_squared(_):
        n, m, q = 3, 2, 3
        sp = ValueSpace.symbols(n, m, q)
        comps = {((k, mu), (i,)): random_poly(rng, X, 1, 1) for k in range(m) for mu in mi.of_order(n, q)
                 for i in range(n)}
        w = Form(sp, 1, ("x1", "x2", "x3"), comps)
        return spencer_delta(spencer_delta(w)).comps

    out.append(_many("gauge.delta_squared", range(5), delta_squared))

    def action(_):
        # a degree-1 Cayley factor keeps the rational entries small
        a, b, b2 = _random_unipotent(rng, 3, X), _random_unipotent(rng, 3, X), _random_cayley(rng, 3, X, 1, 1)
        A, _B = gauge_potentials(a, gl3)
        A = A + Form.lie_one_form(X, [[random_poly(rng, X, 1, 1) for _ in X] for _ in range(9)])
        two = gauge_transform(gauge_transform(A, b, c3, gl3), b2, c3, gl3)
        one = gauge_transform(A, b @ b2, c3, gl3)
        Fp = curvature(gauge_transform(A, b, c3, gl3), c3)
        return [(two - one).comps, (Fp - adjoint_conjugate(curvature(A, c3), b, gl3)).comps]

    out.append(_many("gauge.transform_right_action", range(3), action))

    caff = StructureConstants.from_one_based(2, {(2, 1, 2): -1})
    A = Form.lie_one_form(("x",), [[ONE_R], [RatFn.var("x")]])
    lam = Form(ValueSpace.lie(2), 0, ("x",), {(1, ()): RatFn.var("x")})
    dA = infinitesimal_variation(A, lam, caff)
    expect = Form(ValueSpace.lie(2), 1, ("x",), {(1, (0,)): parse_expr("1 + x")})
    out.append(zero_check("gauge.variation_example", (dA - expect).comps))

    a = _random_unipotent(rng, 3, X)
    A, _B = gauge_potentials(a, gl3)
    mom = Momenta([[random_poly(rng, X, 2, 2) for _ in range(9)] for _ in X])
    el = euler_lagrange_residual(mom, A, c3, a=a, rep=gl3)
    out.append(zero_check("gauge.divergence_form", el["divergence_residual"]))
    return out


# -- rigid body --------------------------------------------------------------------------

def _rigid_from(cfg):
    sec = cfgmod.section(cfg, "rigid_body")
    t = sec.get("t", "t")
    xs = cfgmod.names(sec.get("x", ["x1", "x2", "x3"]), "rigid_body.x")
    K = cfgmod.matrix(sec.get("K"), (t,), "rigid_body.K")
    b = [cfgmod.expr(v, (t,), f"rigid_body.b[{i}]") for i, v in enumerate(sec.get("b", []))]
    if len(K) != 3 or len(b) != 3:
        raise cfgmod.ConfigError("rigid_body needs a 3x3 K and a 3-vector b")
    coords = (t,) + xs
    try:
        a = cayley(K, coords)
    except ValueError as exc:
        raise cfgmod.ConfigError(f"rigid_body.K: {exc}") from None
    return a, b, t, xs


def suite_rigid_body(seed: int = 0, cfg: Optional[dict] = None) -> List[Check]:
    a, b, t, xs = _rigid_from(cfg or RIGID_BODY)
    rep = rigid_body(a, b, t, xs)
    out = [
        Check("rigid-body.relative_skew", rep["relative_skew"]),
        Check("rigid-body.eulerian_skew", rep["eulerian_skew"]),
        zero_check("rigid-body.vortex_half_curl", rep["vortex_residual"]),
    ]
    ident = MatrixMap([[1, 0, 0], [0, 1, 0], [0, 0, 1]], (t,) + xs)
    tr = rigid_body(ident, [RatFn.var(t), ZERO_R, ZERO_R], t, xs)
    out.append(zero_check("rigid-body.pure_translation", [tr["velocity"][0] - ONE_R] + tr["velocity"][1:],
                          tr["curl"]))
    return out


# -- systems -----------------------------------------------------------------------------

EXPECTED_COUNTS = {"killing": 10, "weyl": 11, "conformal": 15}
REFERENCE_DIAGRAM = {"C": (15, 60, 90, 60, 15), "CE": (60, 160, 180, 96, 20), "F": (45, 100, 90, 36, 5)}


def suite_systems(seed: int = 0, cfg: Optional[dict] = None) -> List[Check]:
    out = []
    for kind in KINDS:
        S = build_system(Metric.minkowski(4), kind)
        dims = sequence_dims(S, seed=seed)
        pt = S.point([1, 2, 3, 5])
        out.append(Check(f"systems.{kind}_fiber_dim", fiber_dim(S, pt) == EXPECTED_COUNTS[kind], None,
                         f"{fiber_dim(S, pt)} parameters"))
        out.append(Check(f"systems.{kind}_additivity", all(dims[r]["additive"] for r in range(5))))
    return out


SUITES: Dict[str, Callable[..., List[Check]]] = {
    "mc": suite_mc,
    "brackets": suite_brackets,
    "chi": suite_chi,
    "prop31": suite_prop31,
    "adjoint": suite_adjoint,
    "rigid-body": suite_rigid_body,
    "gauge": suite_gauge,
    "systems": suite_systems,
}

CONFIG_KEYS = {"mc": "action", "rigid-body": "rigid_body"}


def run_suite(name: str, seed: int = 0, cfg: Optional[dict] = None) -> List[Check]:
    if name == "all":
        out = []
        for nm, fn in SUITES.items():
            key = CONFIG_KEYS.get(nm)
            out.extend(fn(seed, cfg if cfg is not None and key in cfg else None))
        return out
    if name not in SUITES:
        raise KeyError(name)
    key = CONFIG_KEYS.get(name)
    if cfg is not None and key is not None and key not in cfg:
        raise cfgmod.ConfigError(f"suite {name!r} expects a {key!r} section in the config")
    return SUITES[name](seed, cfg)


__all__ = ["Check", "SUITES", "run_suite", "zero_check", "degree_of", "perturbed_killing_system",
           "perturbed_affine_system", "perturbed_chi", "REFERENCE_DIAGRAM", "EXPECTED_COUNTS"]
