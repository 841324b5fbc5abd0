from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest
import sympy

from jetcas import multiindex as mi
from jetcas.algebra import ONE_R, RatFn, parse_expr
from jetcas.jets import JetSection
from jetcas.lie_equations import (InconsistentSystemError, LinearSystem, Metric, RankInstabilityError,
                                  build_system, christoffel, fiber_dim, is_algebroid, prolong, sample_points,
                                  sequence_dims, solution_basis, symbol, system_from_generators)
from jetcas.suites import perturbed_affine_system, perturbed_killing_system

from conftest import to_sympy

X4 = ("x1", "x2", "x3", "x4")


def _pt(S):
    return sample_points(S, 1, 0)[0]


def test_christoffel_polar_example():
    g = christoffel(Metric.diagonal([1, parse_expr("x1^2")], ("x1", "x2")))
    assert g[1, 0, 1] == parse_expr("1/x1")
    assert g[0, 1, 1] == parse_expr("-x1")
    assert g[0, 0, 0] == RatFn.const(0)


def test_christoffel_against_sympy():
    coords = ("x1", "x2", "x3")
    entries = [["1 + x2^2", "x1", "0"], ["x1", "2", "x3"], ["0", "x3", "1 + x1^2"]]
    M = Metric([[parse_expr(v) for v in row] for row in entries], coords)
    g = christoffel(M)
    xs = sympy.symbols(coords)
    W = sympy.Matrix([[to_sympy(v) for v in row] for row in M.w])
    Wi = W.inv()
    for k in range(3):
        for i in range(3):
            for j in range(3):
                want = sum(Wi[k, r] * (sympy.diff(W[r, j], xs[i]) + sympy.diff(W[r, i], xs[j])
                                       - sympy.diff(W[i, j], xs[r])) for r in range(3)) / 2
                assert sympy.simplify(to_sympy(g[k, i, j]) - want) == 0


def test_metric_validation():
    with pytest.raises(ValueError):
        Metric([[ONE_R, ONE_R], [RatFn.const(0), ONE_R]])
    with pytest.raises(ValueError):
        Metric([[ONE_R, ONE_R], [ONE_R, ONE_R]])


@pytest.mark.parametrize("sig", ["euclidean", "minkowski"])
@pytest.mark.parametrize("kind,count", [("killing", 10), ("weyl", 11), ("conformal", 15)])
def test_parameter_counts(sig, kind, count):
    S = build_system(Metric.named(sig, 4), kind)
    assert fiber_dim(S, _pt(S)) == count


@pytest.mark.parametrize("n", [2, 3, 5])
def test_killing_counts_in_other_dimensions(n):
    S = build_system(Metric.euclidean(n), "killing")
    assert fiber_dim(S, _pt(S)) == n * (n + 1) // 2


def test_known_vector_fields_solve_the_systems():
    x = [RatFn.var(v) for v in X4]
    eta = Metric.minkowski(4).w
    rotation = [-x[1], x[0], RatFn.const(0), RatFn.const(0)]
    boost = [x[3], RatFn.const(0), RatFn.const(0), x[0]]
    dilation = list(x)
    # special conformal field 2 (b.x) x - (x.x) b for b = e_1
    xx = sum((eta[i][i] * x[i] * x[i] for i in range(4)), RatFn.const(0))
    bx = eta[0][0] * x[0]
    special = [bx * x[i] * 2 - (xx if i == 0 else RatFn.const(0)) for i in range(4)]
    K = build_system(Metric.minkowski(4), "killing")
    W = build_system(Metric.minkowski(4), "weyl")
    C = build_system(Metric.minkowski(4), "conformal")
    for v in (rotation, boost):
        assert K.contains(JetSection.holonomic(v, 2, X4))
    assert not K.contains(JetSection.holonomic(dilation, 2, X4))
    assert W.contains(JetSection.holonomic(dilation, 2, X4))
    assert not W.contains(JetSection.holonomic(special, 2, X4))
    assert C.contains(JetSection.holonomic(special, 2, X4))


def test_symbol_dimensions_of_conformal_system():
    S1 = build_system(Metric.euclidean(4), "conformal", order=1)
    pt = _pt(S1)
    dims = [symbol(S1).dim_at(pt)] + [symbol(prolong(S1, r)).dim_at(pt) for r in (1, 2)]
    assert dims == [7, 4, 0]


def test_killing_second_symbol_vanishes():
    S1 = build_system(Metric.euclidean(4), "killing", order=1)
    assert symbol(prolong(S1, 1)).dim_at(_pt(S1)) == 0


def test_finite_type_prolongation():
    S = build_system(Metric.euclidean(2), "killing")
    assert fiber_dim(prolong(S, 1), _pt(S)) == 3
    assert fiber_dim(prolong(S, 2), _pt(S)) == 3


def _ce_formula(n, m, q, r):
    # exactness of the polynomial Spencer complex gives the rank of delta
    N = m * mi.jet_dim(n, q)
    im = sum((-1) ** j * comb(n, r - 1 - j) * m * mi.sym_dim(n, q + 1 + j) for j in range(r)) if r else 0
    return comb(n, r) * N - im


@pytest.mark.parametrize("kind", ["killing", "weyl", "conformal"])
def test_sequence_dims_structure(kind):
    S = build_system(Metric.euclidean(4), kind)
    d = sequence_dims(S)
    count = d["meta"]["dim_R"]
    for r in range(5):
        assert d[r]["CE"] == _ce_formula(4, 4, 2, r)
        assert d[r]["additive"]
    if kind != "conformal":
        # g_3 = 0 here, so C_r is r-forms with values in R_2
        assert [d[r]["C"] for r in range(5)] == [comb(4, r) * count for r in range(5)]
        assert all(d[r]["injective"] for r in range(5))
    assert d["meta"]["euler"] == (0, 4)


def test_killing_diagram_frozen():
    d = sequence_dims(build_system(Metric.minkowski(4), "killing"))
    assert [d[r]["F"] for r in range(5)] == [50, 120, 120, 56, 10]


def test_conformal_quotient_not_injective():
    d = sequence_dims(build_system(Metric.minkowski(4), "conformal"))
    assert [d[r]["F_quotient"] for r in range(5)] == [45, 100, 90, 45, 9]
    assert [d[r]["injective"] for r in range(5)] == [True, True, True, False, False]


def test_rank_instability_is_reported():
    S = LinearSystem(1, 1, 1, [{(0, (0,)): RatFn.var("x")}], ("x",))
    pts = [{"x": Fraction(0)}, {"x": Fraction(1)}]
    with pytest.raises(RankInstabilityError):
        sequence_dims(S, points=pts)


def test_affine_system_from_generators_is_closed():
    S = system_from_generators([[ONE_R], [RatFn.var("x")]], 2, ("x",))
    assert fiber_dim(S, {"x": Fraction(3)}) == 2
    assert S.contains(JetSection.holonomic([parse_expr("3 - 2*x")], 2, ("x",)))
    assert is_algebroid(S)["closed"]


def test_killing_system_is_closed():
    assert is_algebroid(build_system(Metric.euclidean(2), "killing"))["closed"]


def test_perturbed_systems_are_not_closed():
    for S in (perturbed_killing_system(), perturbed_affine_system()):
        rep = is_algebroid(S)
        assert not rep["closed"]
        assert any(w["residual"] for w in rep["witnesses"])


def test_perturbed_witnesses_frozen():
    got = [(w["pair"], w["equation"], w["residual"]) for w in is_algebroid(perturbed_killing_system())["witnesses"]]
    assert got == [((0, 2), 1, parse_expr("1/(x1 + 1)"))]
    got = [(w["pair"], w["equation"], w["residual"]) for w in is_algebroid(perturbed_affine_system())["witnesses"]]
    assert got == [((0, 1), 0, parse_expr("1/x"))]


def test_inconsistent_system():
    S = LinearSystem(1, 1, 0, [{(0, (0,)): ONE_R}], ("x",))
    with pytest.raises(InconsistentSystemError):
        solution_basis(S)
