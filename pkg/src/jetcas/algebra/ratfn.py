"""Exact multivariate rational functions.

A :class:`RatFn` is kept in lowest terms with a monic denominator (leading
coefficient 1 in graded lex order), so structural equality is mathematical
equality.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .poly import ONE, ZERO, Poly, exact_div, gcd


class PoleError(ZeroDivisionError):
    """Raised when a denominator vanishes at an evaluation point."""


class RatFn:
    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly = ONE, _normal: bool = False):
        if not _normal:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def const(cls, c) -> "RatFn":
        return cls(Poly.const(c), ONE, _normal=True)

    @classmethod
    def var(cls, name: str) -> "RatFn":
        return cls(Poly.var(name), ONE, _normal=True)

    @classmethod
    def coerce(cls, x) -> "RatFn":
        if isinstance(x, RatFn):
            return x
        if isinstance(x, Poly):
            return cls(x, ONE, _normal=True)
        if isinstance(x, (int, Fraction)):
            return cls.const(x)
        if isinstance(x, str):
            from .parse import parse_expr
            return parse_expr(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to RatFn")

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.is_one()

    def is_const(self) -> bool:
        return self.den.is_one() and self.num.is_const()

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ValueError(f"{self} is not constant")
        return self.num.const_value()

    def variables(self):
        from .poly import var_key
        return tuple(sorted(set(self.num.variables()) | set(self.den.variables()), key=var_key))

    def degree(self) -> int:
        """Max of numerator and denominator total degrees (a size measure)."""
        return max(self.num.degree(), self.den.degree())

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = _lift(other)
        if other is None:
            return NotImplemented
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den.is_one() and other.den.is_one():
            return RatFn(self.num + other.num, ONE, _normal=True)
        if self.den == other.den:
            return RatFn(self.num + other.num, self.den)
        g = gcd(self.den, other.den)
        d1 = exact_div(self.den, g)
        d2 = exact_div(other.den, g)
        return RatFn(self.num * d2 + other.num * d1, self.den * d2)

    __radd__ = __add__

    def __neg__(self):
        return RatFn(-self.num, self.den, _normal=True)

    def __sub__(self, other):
        other = _lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return ZERO_R
            return RatFn(self.num.scale(other), self.den, _normal=True)
        other = _lift(other)
        if other is None:
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return ZERO_R
        if self.den.is_one() and other.den.is_one():
            return RatFn(self.num * other.num, ONE, _normal=True)
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        g1 = gcd(n1, d2)
        g2 = gcd(n2, d1)
        if not g1.is_one():
            n1, d2 = exact_div(n1, g1), exact_div(d2, g1)
        if not g2.is_one():
            n2, d1 = exact_div(n2, g2), exact_div(d1, g2)
        return _monic_den(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inv(self) -> "RatFn":
        if self.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return _monic_den(self.den, self.num)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return RatFn(self.num.scale(Fraction(1) / Fraction(other)), self.den, _normal=True)
        other = _lift(other)
        if other is None:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        other = _lift(other)
        if other is None:
            return NotImplemented
        return other * self.inv()

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return RatFn(self.num ** e, self.den ** e, _normal=True)

    # -- comparisons ---------------------------------------------------------
    def __eq__(self, other):
        other = _lift(other)
        if other is None:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    # -- calculus -------------------------------------------------------------
    def derive(self, v: str) -> "RatFn":
        dn = self.num.derive(v)
        if self.den.is_one():
            return RatFn(dn, ONE, _normal=True)
        dd = self.den.derive(v)
        if dd.is_zero():
            return RatFn(dn, self.den)
        return RatFn(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        d = self.den.evaluate(point)
        if not d:
            raise PoleError(f"pole of {self} at {dict(point)}")
        return self.num.evaluate(point) / d

    def partial_eval(self, point: Mapping[str, Fraction]) -> "RatFn":
        d = self.den.partial_eval(point)
        if d.is_zero():
            raise PoleError(f"pole of {self} at {dict(point)}")
        return RatFn(self.num.partial_eval(point), d)

    def subs(self, mapping: Mapping[str, "RatFn"]) -> "RatFn":
        """Substitute rational functions for variables."""
        mapping = {v: _lift(f) for v, f in mapping.items()}
        if all(f.den.is_one() for f in mapping.values()):
            pm = {v: f.num for v, f in mapping.items()}
            return RatFn(self.num.subs(pm), ONE) / RatFn(self.den.subs(pm), ONE)
        return _subs_poly(self.num, mapping) / _subs_poly(self.den, mapping)

    # -- printing ---------------------------------------------------------------
    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        n = str(self.num)
        if len(self.num.terms) > 1:
            n = f"({n})"
        d = str(self.den)
        if len(self.den.terms) > 1 or "*" in d or "/" in d:
            d = f"({d})"
        return f"{n}/{d}"

    def __repr__(self):
        return f"RatFn({self})"


def _subs_poly(p: Poly, mapping) -> RatFn:
    result = ZERO_R
    cache = {}
    for m, c in p.terms.items():
        term = RatFn.const(c)
        rest = []
        for v, e in m:
            if v in mapping:
                key = (v, e)
                if key not in cache:
                    cache[key] = mapping[v] ** e
                term = term * cache[key]
            else:
                rest.append((v, e))
        if rest:
            term = term * RatFn(Poly({tuple(rest): Fraction(1)}, _clean=True), ONE, _normal=True)
        result = result + term
    return result


def _lift(x):
    if isinstance(x, RatFn):
        return x
    if isinstance(x, Poly):
        return RatFn(x, ONE, _normal=True)
    if isinstance(x, (int, Fraction)):
        return RatFn.const(x)
    return None


def _monic_den(num: Poly, den: Poly) -> RatFn:
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    lc = den.leading_coeff()
    if lc != 1:
        num, den = num.scale(1 / lc), den.scale(1 / lc)
    return RatFn(num, den, _normal=True)


def _normalize(num: Poly, den: Poly):
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if num.is_zero():
        return ZERO, ONE
    if den.is_const():
        return num.scale(1 / den.const_value()), ONE
    g = gcd(num, den)
    if not g.is_one():
        num, den = exact_div(num, g), exact_div(den, g)
    lc = den.leading_coeff()
    if lc != 1:
        num, den = num.scale(1 / lc), den.scale(1 / lc)
    if den.is_one():
        return num, ONE
    return num, den


ZERO_R = RatFn(ZERO, ONE, _normal=True)
ONE_R = RatFn(ONE, ONE, _normal=True)


def as_ratfn(x) -> RatFn:
    return RatFn.coerce(x)
