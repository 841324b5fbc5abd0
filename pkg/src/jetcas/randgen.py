"""Seeded generators of random polynomial test objects.

Everything draws from a caller-supplied ``random.Random`` so suites are
reproducible from a single seed.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Sequence, Tuple

from . import multiindex as mi
from .algebra import ZERO_R, Poly, RatFn
from .jets import JetMapSection, JetSection, jet_prolong_map


def random_poly(rng: random.Random, variables: Sequence[str], degree: int = 2,
                terms: int = 3, coeff: int = 3) -> RatFn:
    """Random polynomial with small integer coefficients (may be zero)."""
    pool = [mu for mu in mi.up_to(len(variables), degree)]
    out = {}
    for _ in range(terms):
        mu = rng.choice(pool)
        c = rng.randint(-coeff, coeff)
        if c:
            mono = tuple(sorted((v, e) for v, e in zip(variables, mu) if e))
            out[mono] = out.get(mono, 0) + Fraction(c)
    return RatFn(Poly(out), _normal=True)


def random_nonzero_poly(rng, variables, degree=2, terms=3, coeff=3) -> RatFn:
    while True:
        p = random_poly(rng, variables, degree, terms, coeff)
        if p:
            return p


def random_vector_field(rng, coords, degree=3, terms=3) -> List[RatFn]:
    return [random_poly(rng, coords, degree, terms) for _ in coords]


def random_jet_section(rng, n: int, m: int, q: int, coords, degree: int = 2, terms: int = 2) -> JetSection:
    comps = {}
    for k in range(m):
        for mu in mi.up_to(n, q):
            comps[(k, mu)] = random_poly(rng, coords, degree, terms)
    return JetSection(n, m, q, comps, coords)


def random_triangular_map(rng, src, tgt, degree: int = 2, terms: int = 2) -> Tuple[List[RatFn], List[RatFn]]:
    """y^k = x^k + p_k(x^{k+1}, ..., x^n) with its polynomial inverse y -> x."""
    n = len(src)
    f = []
    for k in range(n):
        rest = src[k + 1:]
        p = random_poly(rng, rest, degree, terms) if rest else ZERO_R
        f.append(RatFn.var(src[k]) + p)
    # back substitution: x^n = y^n, x^k = y^k - p_k(x^{k+1..n})
    inv: List[RatFn] = [ZERO_R] * n
    for k in range(n - 1, -1, -1):
        p = f[k] - RatFn.var(src[k])
        sub = {src[j]: inv[j] for j in range(k + 1, n)}
        inv[k] = RatFn.var(tgt[k]) - (p.subs(sub) if sub else p)
    return f, inv


def random_nonholonomic(rng, n: int, q: int, src, tgt, degree: int = 2, terms: int = 2,
                        base_degree: int = 2) -> Tuple[JetMapSection, List[RatFn]]:
    """Polynomial perturbation of j_q(f) for a triangular f.

    Order-1 perturbations touch only the strictly upper block, so the first
    order block stays unipotent triangular and det = 1.
    """
    fmap, inv = random_triangular_map(rng, src, tgt, base_degree)
    jf = jet_prolong_map(fmap, q, src, tgt)
    comps = dict(jf.comps)
    for k in range(n):
        for mu in mi.up_to(n, q):
            s = sum(mu)
            if s == 0:
                continue
            if s == 1 and mi.first_slot(mu) <= k:
                continue
            p = random_poly(rng, src, degree, terms)
            if p:
                comps[(k, mu)] = comps.get((k, mu), ZERO_R) + p
    return JetMapSection(n, q, comps, src, tgt), inv


__all__ = [
    "random_poly", "random_nonzero_poly", "random_vector_field", "random_jet_section",
    "random_triangular_map", "random_nonholonomic",
]
