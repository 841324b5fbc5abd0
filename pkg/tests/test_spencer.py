from __future__ import annotations

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from jetcas.algebra import ONE_R, RatFn, parse_expr
from jetcas.forms import ext_d
from jetcas.jets import JetMapSection, jet_compose, jet_invert, jet_prolong_map
from jetcas.lie_equations import Metric, christoffel
from jetcas.randgen import random_jet_section, random_nonholonomic, random_poly, random_triangular_map
from jetcas.spencer import (chi, chi_cc_residual, dbar_cocycle_residual, linear_F_2form, nl_gauge_transform,
                            phi_2form, rewritten_cc_residual, variation_chi, variation_target)
from jetcas.suites import perturbed_chi

from conftest import rng, to_sympy

X2, Y2, Z2 = ("x1", "x2"), ("y1", "y2"), ("z1", "z2")
seeds = st.integers(0, 10_000)


def _zero(res) -> bool:
    if isinstance(res, dict):
        return all(_zero(v) for v in res.values())
    if isinstance(res, (list, tuple)):
        return all(_zero(v) for v in res)
    return res.is_zero()


def test_holonomic_jets_have_zero_chi():
    f, _ = random_triangular_map(rng(1), X2, Y2, 3, 3)
    assert chi(jet_prolong_map(f, 3, X2, Y2)).is_zero()


def test_one_dimensional_example():
    h = parse_expr("1 + x^2")
    f = JetMapSection(1, 2, {(0, (0,)): RatFn.var("x"), (0, (1,)): ONE_R, (0, (2,)): h}, ("x",), ("y",))
    c = chi(f)
    assert c[(0, (0,), 0)].is_zero()
    assert c[(0, (1,), 0)] == -h


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_one_dimensional_recursion_against_sympy(seed):
    r = rng(seed)
    X = ("x",)
    f0, f1, f2 = random_poly(r, X, 3, 3), random_poly(r, X, 2, 2) + 7, random_poly(r, X, 3, 3)
    c = chi(JetMapSection(1, 2, {(0, (0,)): f0, (0, (1,)): f1, (0, (2,)): f2}, X, ("y",)))
    x = sympy.Symbol("x")
    F0, F1, F2 = (to_sympy(v) for v in (f0, f1, f2))
    c0 = (sympy.diff(F0, x) - F1) / F1
    c1 = (sympy.diff(F1, x) - F2 - F2 * c0) / F1
    assert sympy.simplify(to_sympy(c[(0, (0,), 0)]) - c0) == 0
    assert sympy.simplify(to_sympy(c[(0, (1,), 0)]) - c1) == 0


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_compatibility_identities(seed):
    f2, _ = random_nonholonomic(rng(seed), 2, 2, X2, Y2)
    c2 = chi(f2)
    assert _zero(chi_cc_residual(c2)[0]) and _zero(rewritten_cc_residual(c2)[0])
    f3, _ = random_nonholonomic(rng(seed + 1), 2, 3, X2, Y2)
    c3 = chi(f3)
    assert _zero(chi_cc_residual(c3)) and _zero(rewritten_cc_residual(c3))


def test_perturbed_chi_breaks_the_identities():
    f, _ = random_nonholonomic(rng(5), 2, 3, X2, Y2)
    bad = perturbed_chi(chi(f))
    assert not _zero(chi_cc_residual(bad))
    assert not phi_2form(bad)[1].is_zero()


@settings(max_examples=6, deadline=None)
@given(seeds)
def test_cocycle_and_gauge_round_trip(seed):
    r = rng(seed)
    f, finv = random_nonholonomic(r, 2, 2, X2, Y2)
    g, _ = random_nonholonomic(r, 2, 2, Y2, Z2)
    assert dbar_cocycle_residual(f, g).is_zero()
    moved = nl_gauge_transform(chi(g), f)
    assert moved == chi(jet_compose(g, f))
    assert nl_gauge_transform(moved, jet_invert(f, finv)) == chi(g)


def test_variation_target_matches():
    r = rng(11)
    f, finv = random_nonholonomic(r, 1, 3, ("x",), ("y",))
    xi = random_jet_section(r, 1, 1, 2, ("x",))
    src, _ = variation_chi(chi(f.project(2)), xi)
    assert (src - variation_target(f, xi, finv)).is_zero()


def test_variation_only_at_first_order():
    f, _ = random_nonholonomic(rng(2), 1, 3, ("x",), ("y",))
    with pytest.raises(NotImplementedError):
        variation_chi(chi(f), random_jet_section(rng(2), 1, 1, 2, ("x",)))


@settings(max_examples=8, deadline=None)
@given(seeds)
def test_phi_is_exact(seed):
    f, _ = random_nonholonomic(rng(seed), 2, 3, X2, Y2)
    phi, res = phi_2form(chi(f))
    assert res.is_zero()
    assert ext_d(phi).is_zero()


@settings(max_examples=5, deadline=None)
@given(seeds)
def test_linear_chain_with_curved_coordinates(seed):
    gamma = christoffel(Metric.diagonal([1, parse_expr("x1^2")], X2))
    xi = random_jet_section(rng(seed), 2, 2, 3, X2)
    out = linear_F_2form(xi, gamma.g)
    assert _zero(out["residuals"])


def test_linear_chain_nontrivial_instance():
    gamma = christoffel(Metric.diagonal([1, parse_expr("x1^2")], X2))
    xi = random_jet_section(rng(4), 2, 2, 3, X2, degree=3, terms=3)
    assert not linear_F_2form(xi, gamma.g)["F"].is_zero()
