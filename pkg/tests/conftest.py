"""Shared helpers: sympy is used only here, as an independent oracle."""
from __future__ import annotations

import random
from fractions import Fraction

import sympy
from hypothesis import strategies as st

from jetcas.algebra import Poly, RatFn

VARS = ("x1", "x2", "x3")


def to_sympy(f) -> sympy.Expr:
    if isinstance(f, RatFn):
        return to_sympy(f.num) / to_sympy(f.den)
    out = sympy.Integer(0)
    for mono, c in f.terms.items():
        t = sympy.Rational(c.numerator, c.denominator)
        for v, e in mono:
            t *= sympy.Symbol(v) ** e
        out += t
    return out


def sympy_equal(f, expr) -> bool:
    return sympy.simplify(to_sympy(f) - expr) == 0


@st.composite
def polys(draw, variables=VARS[:2], max_degree=3, max_terms=4):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = tuple(draw(st.integers(0, max_degree)) for _ in variables)
        c = draw(st.fractions(min_value=-5, max_value=5, max_denominator=4))
        mono = tuple((v, e) for v, e in zip(variables, exps) if e)
        terms[mono] = terms.get(mono, Fraction(0)) + c
    return Poly(terms)


@st.composite
def ratfns(draw, variables=VARS[:2]):
    num = draw(polys(variables))
    den = draw(polys(variables, max_degree=2, max_terms=3).filter(lambda p: not p.is_zero()))
    return RatFn(num, den)


def rng(seed=0) -> random.Random:
    return random.Random(seed)
