from __future__ import annotations

import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from jetcas.adjoint import (DiffOp, OperatorMatrix, adjoint, dual_spencer_1d, em_invariance_residual,
                            exterior_derivative_matrix, inverse_jacobian_divergence, op_adjoint, op_mul, spencer_chain_1d,
                            volume_right_action, witness_check)
from jetcas.algebra import ONE_R, ZERO_R, RatFn, parse_expr
from jetcas.forms import Form
from jetcas.jets import vf_bracket
from jetcas.randgen import random_poly, random_triangular_map, random_vector_field
from jetcas.suites import random_diffop

from conftest import rng, to_sympy

X2 = ("x1", "x2")
seeds = st.integers(0, 10_000)


def test_normal_form_and_rendering():
    P = DiffOp({(1,): parse_expr("x"), (0,): ONE_R}, ("x",))
    assert str(P) == "x*d_x + 1"
    assert op_adjoint(P) == DiffOp({(1,): -parse_expr("x")}, ("x",))
    # d_x composed with multiplication by x is x d_x + 1
    assert op_mul(DiffOp.d(0, ("x",)), DiffOp.mult(parse_expr("x"), ("x",))) == P


def _sympy_apply(P: DiffOp, u):
    xs = sympy.symbols(P.coords)
    out = 0
    for mu, a in P.terms.items():
        d = u
        for x, e in zip(xs, mu):
            d = sympy.diff(d, x, e) if e else d
        out += to_sympy(a) * d
    return out


def _sympy_adjoint_apply(P: DiffOp, v):
    # ad(a d^mu) v = (-1)^|mu| d^mu (a v)
    xs = sympy.symbols(P.coords)
    out = 0
    for mu, a in P.terms.items():
        d = to_sympy(a) * v
        for x, e in zip(xs, mu):
            d = sympy.diff(d, x, e) if e else d
        out += (-1) ** sum(mu) * d
    return out


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_adjoint_against_sympy(seed):
    r = rng(seed)
    P = random_diffop(r, X2, order=3)
    u = to_sympy(random_poly(r, X2, 4, 4))
    ad = op_adjoint(P)
    assert sympy.expand(_sympy_apply(ad, u) - _sympy_adjoint_apply(P, u)) == 0


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(1, 3))
def test_adjoint_algebra(seed, n):
    r = rng(seed)
    X = ("x1", "x2", "x3")[:n]
    P, Q = random_diffop(r, X), random_diffop(r, X, order=2)
    assert op_adjoint(op_adjoint(P)) == P
    assert op_adjoint(op_mul(P, Q)) == op_mul(op_adjoint(Q), op_adjoint(P))
    assert op_adjoint(P + Q) == op_adjoint(P) + op_adjoint(Q)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_composition_matches_application(seed):
    r = rng(seed)
    P, Q = random_diffop(r, X2), random_diffop(r, X2, order=2)
    f = random_poly(r, X2, 4, 4)
    assert op_mul(P, Q).apply(f) == P.apply(Q.apply(f))


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_divergence_witness(seed):
    r = rng(seed)
    P, Q = random_diffop(r, X2), random_diffop(r, X2, order=2)
    D = OperatorMatrix([[P, Q], [Q, P]], X2)
    adD, W = adjoint(D)
    assert adD == D.adjoint()
    assert witness_check(D, adD, W) == {}
    assert witness_check(P) == {}


def test_witness_check_rejects_wrong_adjoint():
    P = DiffOp({(1,): parse_expr("x")}, ("x",))
    wrong = OperatorMatrix([[P]], ("x",))
    assert witness_check(P, wrong) != {}


def test_dual_spencer_sequence_q2():
    ds = dual_spencer_1d(2)
    assert ds["equation_strings"] == ["∂_xσ = f", "∂_xμ + σ = m", "∂_xν + μ = j"]
    assert ds["witness_string"] == "σξ + μξ_x + νξ_xx"
    assert witness_check(ds["operator"]) == {}


def test_dual_spencer_sequence_q1():
    ds = dual_spencer_1d(1)
    assert len(ds["equation_strings"]) == 2
    assert witness_check(ds["operator"]) == {}


def test_spencer_chain_operator():
    D = spencer_chain_1d(2)
    x = RatFn.var("x")
    # the truncated chain drops xi_xxx, so the jet of x^2 is annihilated
    assert D.apply([x * x, x * 2, RatFn.const(2)]) == [ZERO_R, ZERO_R, ZERO_R]
    assert D.apply([x * x * x, x * x * 3, x * 6])[2] == RatFn.const(6)


@settings(max_examples=8, deadline=None)
@given(seeds, st.integers(2, 3))
def test_inverse_jacobian_divergence(seed, n):
    X = ("x1", "x2", "x3")[:n]
    Y = ("y1", "y2", "y3")[:n]
    f, g = random_triangular_map(rng(seed), X, Y)
    assert all(v.is_zero() for v in inverse_jacobian_divergence(f, g, X, Y))


@settings(max_examples=5, deadline=None)
@given(seeds)
def test_field_strength_invariance(seed):
    r = rng(seed)
    f, g = random_triangular_map(r, X2, ("y1", "y2"))
    w = random_poly(r, X2, 3, 3)
    res = em_invariance_residual(f, [[ZERO_R, w], [-w, ZERO_R]], X2, g, ("y1", "y2"))
    assert res["passed"]


def test_field_strength_invariance_identity_map():
    w = parse_expr("x1*x2^2")
    res = em_invariance_residual([RatFn.var("x1"), RatFn.var("x2")], [[ZERO_R, w], [-w, ZERO_R]], X2)
    assert res["passed"]


def test_exterior_derivative_adjoints_compose_to_zero():
    X4 = ("x1", "x2", "x3", "x4")
    d1, d2 = exterior_derivative_matrix(4, 1, X4), exterior_derivative_matrix(4, 2, X4)
    assert (d2 @ d1).is_zero()
    assert (d1.adjoint() @ d2.adjoint()).is_zero()


@settings(max_examples=8, deadline=None)
@given(seeds)
def test_right_action_on_volume_forms(seed):
    r = rng(seed)
    alpha = Form.scalar(X2, 2, {(0, 1): random_poly(r, X2, 3, 3)})
    u, v = random_vector_field(r, X2, 2, 2), random_vector_field(r, X2, 2, 2)
    U, V = DiffOp.vector_field(u, X2), DiffOp.vector_field(v, X2)
    lhs = volume_right_action(alpha, op_mul(U, V) - op_mul(V, U))
    assert (lhs - volume_right_action(alpha, vf_bracket(u, v, X2))).is_zero()
