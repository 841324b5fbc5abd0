"""Sparse multivariate polynomials over the rationals.

A monomial is a tuple of ``(name, exponent)`` pairs sorted by name, with
positive exponents only; the constant monomial is ``()``.  Polynomials map
monomials to nonzero :class:`fractions.Fraction` coefficients.  Variables
are plain strings, so polynomials in different variable sets combine
without any ring bookkeeping.

Printing and leading terms use the graded lexicographic order, with
variables ranked by :func:`var_key` (natural order: ``x2`` before ``x10``).
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Tuple

Monomial = Tuple[Tuple[str, int], ...]

ONE_MONO: Monomial = ()

_NAT = re.compile(r"(\d+)")


@lru_cache(maxsize=None)
def var_key(name: str):
    parts = _NAT.split(name)
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts if p)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_div(a: Monomial, b: Monomial):
    """Return a/b or None when b does not divide a."""
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        r = d.get(v, 0) - e
        if r < 0:
            return None
        if r:
            d[v] = r
        else:
            del d[v]
    return tuple(sorted(d.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_gcd(a: Monomial, b: Monomial) -> Monomial:
    db = dict(b)
    return tuple((v, min(e, db[v])) for v, e in a if v in db)


def _grlex_sortkey(m: Monomial, order: Tuple[str, ...]):
    d = dict(m)
    return (mono_degree(m),) + tuple(d.get(v, 0) for v in order)


class Poly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None, _clean: bool = False):
        if terms is None:
            terms = {}
        if _clean:
            self.terms = terms
        else:
            self.terms = {m: Fraction(c) for m, c in terms.items() if c}
        self._hash = None

    # -- construction -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "Poly":
        c = Fraction(c)
        return cls({ONE_MONO: c}, _clean=True) if c else ZERO

    @classmethod
    def var(cls, name: str, exp: int = 1) -> "Poly":
        if exp == 0:
            return ONE
        return cls({((name, exp),): Fraction(1)}, _clean=True)

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ONE_MONO in self.terms)

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get(ONE_MONO) == 1

    def const_value(self) -> Fraction:
        return self.terms.get(ONE_MONO, Fraction(0))

    def variables(self) -> Tuple[str, ...]:
        vs = {v for m in self.terms for v, _ in m}
        return tuple(sorted(vs, key=var_key))

    def degree(self, v: str | None = None) -> int:
        if not self.terms:
            return -1
        if v is None:
            return max(mono_degree(m) for m in self.terms)
        return max(dict(m).get(v, 0) for m in self.terms)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        t = dict(self.terms)
        for m, c in other.terms.items():
            s = t.get(m)
            if s is None:
                t[m] = c
            else:
                s += c
                if s:
                    t[m] = s
                else:
                    del t[m]
        return Poly(t, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()}, _clean=True)

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly.const(other) - self

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if not c:
            return ZERO
        if c == 1:
            return self
        return Poly({m: v * c for m, v in self.terms.items()}, _clean=True)

    def mul_term(self, mono: Monomial, c: Fraction) -> "Poly":
        if not c:
            return ZERO
        return Poly({mono_mul(m, mono): v * c for m, v in self.terms.items()}, _clean=True)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        a, b = self.terms, other.terms
        if not a or not b:
            return ZERO
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (m, c), = b.items()
            return self.mul_term(m, c) if a is self.terms else other.mul_term(m, c)
        t: Dict[Monomial, Fraction] = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                m = mono_mul(m1, m2)
                s = t.get(m)
                t[m] = c1 * c2 if s is None else s + c1 * c2
        return Poly({m: c for m, c in t.items() if c}, _clean=True)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent on a polynomial")
        result, base = ONE, self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- comparisons ------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({ONE_MONO: Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # -- calculus and evaluation -------------------------------------------
    def derive(self, v: str) -> "Poly":
        t: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            for idx, (w, e) in enumerate(m):
                if w == v:
                    if e == 1:
                        nm = m[:idx] + m[idx + 1:]
                    else:
                        nm = m[:idx] + ((w, e - 1),) + m[idx + 1:]
                    t[nm] = t.get(nm, 0) + c * e
                    break
        return Poly({m: c for m, c in t.items() if c}, _clean=True)

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            val = c
            for v, e in m:
                val *= Fraction(point[v]) ** e
            total += val
        return total

    def partial_eval(self, point: Mapping[str, Fraction]) -> "Poly":
        """Substitute the given variables by rationals; others stay symbolic."""
        t: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            rest = []
            for v, e in m:
                if v in point:
                    c = c * Fraction(point[v]) ** e
                else:
                    rest.append((v, e))
            if c:
                k = tuple(rest)
                t[k] = t.get(k, 0) + c
        return Poly({m: c for m, c in t.items() if c}, _clean=True)

    def subs(self, mapping: Mapping[str, "Poly"]) -> "Poly":
        powers: Dict[Tuple[str, int], Poly] = {}
        result = ZERO
        for m, c in self.terms.items():
            term = Poly({(): c}, _clean=True)
            keep = []
            for v, e in m:
                if v in mapping:
                    key = (v, e)
                    if key not in powers:
                        powers[key] = mapping[v] ** e
                    term = term * powers[key]
                else:
                    keep.append((v, e))
            if keep:
                term = term.mul_term(tuple(keep), Fraction(1))
            result = result + term
        return result

    # -- structure ---------------------------------------------------------
    def coeffs_in(self, v: str) -> Dict[int, "Poly"]:
        """Split as sum_i c_i * v**i with c_i free of v."""
        out: Dict[int, Dict[Monomial, Fraction]] = {}
        for m, c in self.terms.items():
            e = 0
            rest = m
            for idx, (w, ew) in enumerate(m):
                if w == v:
                    e = ew
                    rest = m[:idx] + m[idx + 1:]
                    break
            out.setdefault(e, {})[rest] = c
        return {e: Poly(t, _clean=True) for e, t in out.items()}

    def leading(self, order: Tuple[str, ...] | None = None):
        """Leading (monomial, coefficient) in graded lex order."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        if order is None:
            order = self.variables()
        m = max(self.terms, key=lambda mm: _grlex_sortkey(mm, order))
        return m, self.terms[m]

    def leading_coeff(self) -> Fraction:
        return self.leading()[1]

    def content_q(self) -> Fraction:
        """Positive rational content: gcd of numerators over lcm of denominators."""
        from math import gcd
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den) if num else Fraction(0)

    def monic(self) -> "Poly":
        if not self.terms:
            return self
        return self.scale(1 / self.leading_coeff())

    def sorted_terms(self):
        order = self.variables()
        return sorted(self.terms.items(), key=lambda mc: _grlex_sortkey(mc[0], order), reverse=True)

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in sorted(m, key=lambda ve: var_key(ve[0]))
            )
            if not mono:
                s = _fmt_q(abs(c))
            elif abs(c) == 1:
                s = mono
            else:
                s = f"{_fmt_q(abs(c))}*{mono}"
            parts.append(("-" if c < 0 else "+", s))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, s in parts[1:]:
            out += f" {sign} {s}"
        return out


def _fmt_q(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


ZERO = Poly({}, _clean=True)
ONE = Poly({ONE_MONO: Fraction(1)}, _clean=True)


# -- division and gcd ---------------------------------------------------------

class NotDivisible(ArithmeticError):
    pass


def exact_div(a: Poly, b: Poly) -> Poly:
    """Quotient a/b, raising :class:`NotDivisible` on a nonzero remainder."""
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if a.is_zero():
        return ZERO
    if b.is_const():
        return a.scale(1 / b.const_value())
    if len(b.terms) == 1:
        (bm, bc), = b.terms.items()
        t = {}
        for m, c in a.terms.items():
            q = mono_div(m, bm)
            if q is None:
                raise NotDivisible
            t[q] = c / bc
        return Poly(t, _clean=True)
    order = tuple(sorted(set(a.variables()) | set(b.variables()), key=var_key))
    key = lambda mm: _grlex_sortkey(mm, order)  # noqa: E731
    lm_b = max(b.terms, key=key)
    lc_b = b.terms[lm_b]
    rem = dict(a.terms)
    quot: Dict[Monomial, Fraction] = {}
    while rem:
        lm = max(rem, key=key)
        q = mono_div(lm, lm_b)
        if q is None:
            raise NotDivisible
        qc = rem[lm] / lc_b
        quot[q] = quot.get(q, 0) + qc
        for m, c in b.terms.items():
            mm = mono_mul(m, q)
            s = rem.get(mm, 0) - qc * c
            if s:
                rem[mm] = s
            else:
                rem.pop(mm, None)
    return Poly({m: c for m, c in quot.items() if c}, _clean=True)


def divides(b: Poly, a: Poly) -> bool:
    try:
        exact_div(a, b)
    except NotDivisible:
        return False
    return True


def _pseudo_rem(a: Poly, b: Poly, v: str) -> Poly:
    db = b.degree(v)
    cb = b.coeffs_in(v)
    lc = cb[db]
    tail = b - lc.mul_term(((v, db),), Fraction(1))
    r = a
    while not r.is_zero():
        dr = r.degree(v)
        if dr < db:
            break
        lr = r.coeffs_in(v)[dr]
        shift = ((v, dr - db),) if dr > db else ()
        # r <- lc*r - lr*v^(dr-db)*b, with the top terms cancelling exactly
        r_top_free = r - lr.mul_term(((v, dr),), Fraction(1)) if dr else r - lr
        r = lc * r_top_free - (lr * tail).mul_term(shift, Fraction(1))
    return r


def _int_primitive(a: Poly) -> Poly:
    # scale by a rational so the coefficients are coprime integers; stops
    # coefficient swell in the remainder sequence
    if a.is_zero():
        return a
    den = 1
    for c in a.terms.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    num = 0
    for c in a.terms.values():
        num = math.gcd(num, (c * den).numerator)
    return a.scale(Fraction(den, num))


def _content_in(a: Poly, v: str) -> Poly:
    g = ZERO
    for c in a.coeffs_in(v).values():
        g = gcd(g, c)
        if g.is_one():
            break
    return g


def gcd(a: Poly, b: Poly) -> Poly:
    """Monic greatest common divisor (recursive content / primitive PRS)."""
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    if a.is_const() or b.is_const():
        return ONE
    if len(a.terms) == 1 or len(b.terms) == 1:
        mono, poly = (a, b) if len(a.terms) == 1 else (b, a)
        (m, _), = mono.terms.items()
        for pm in poly.terms:
            m = mono_gcd(m, pm)
            if not m:
                return ONE
        return Poly({m: Fraction(1)}, _clean=True)
    if a == b:
        return a.monic()
    va, vb = set(a.variables()), set(b.variables())
    common = va & vb
    if not common:
        return ONE
    # a variable private to one argument only enters through its content
    for v in sorted(va - vb, key=var_key):
        return gcd(_content_in(a, v), b)
    for v in sorted(vb - va, key=var_key):
        return gcd(a, _content_in(b, v))
    if len(b.terms) <= len(a.terms) and divides(b, a):
        return b.monic()
    if divides(a, b):
        return a.monic()
    v = min(common, key=lambda w: (max(a.degree(w), b.degree(w)), var_key(w)))
    ca, cb = _content_in(a, v), _content_in(b, v)
    c = gcd(ca, cb)
    pa, pb = _int_primitive(exact_div(a, ca)), _int_primitive(exact_div(b, cb))
    if pa.degree(v) < pb.degree(v):
        pa, pb = pb, pa
    while not pb.is_zero():
        if pb.degree(v) == 0:
            return c.monic()
        r = _pseudo_rem(pa, pb, v)
        pa, pb = pb, (_int_primitive(exact_div(r, _content_in(r, v))) if not r.is_zero() else r)
    g = exact_div(pa, _content_in(pa, v))
    return (c * g).monic()


def lcm(a: Poly, b: Poly) -> Poly:
    if a.is_zero() or b.is_zero():
        return ZERO
    return exact_div(a * b, gcd(a, b)).monic()


def poly_from_terms(items: Iterable[Tuple[Mapping[str, int], object]]) -> Poly:
    t: Dict[Monomial, Fraction] = {}
    for exps, c in items:
        m = tuple(sorted((v, e) for v, e in exps.items() if e))
        t[m] = t.get(m, 0) + Fraction(c)
    return Poly(t)
