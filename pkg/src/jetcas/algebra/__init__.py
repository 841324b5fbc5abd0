from fractions import Fraction as Rat

from .poly import Poly, gcd, exact_div, NotDivisible, var_key
from .ratfn import RatFn, PoleError, ZERO_R, ONE_R, as_ratfn
from .parse import parse_expr, ExprSyntaxError, UnknownVariableError


def derive(f, v: str) -> RatFn:
    """Formal partial derivative of a rational function."""
    return as_ratfn(f).derive(v)


def derive_multi(f, coords, mu) -> RatFn:
    """Apply d^mu, where ``mu`` gives one exponent per coordinate."""
    f = as_ratfn(f)
    for v, e in zip(coords, mu):
        for _ in range(e):
            if f.is_zero():
                return f
            f = f.derive(v)
    return f


def evaluate(f, point) -> Rat:
    return as_ratfn(f).evaluate(point)


def var(name: str) -> RatFn:
    return RatFn.var(name)


def const(c) -> RatFn:
    return RatFn.const(c)


__all__ = [
    "Rat", "Poly", "RatFn", "PoleError", "ZERO_R", "ONE_R", "parse_expr",
    "ExprSyntaxError", "UnknownVariableError", "derive", "derive_multi",
    "evaluate", "var", "const", "gcd", "exact_div", "NotDivisible", "as_ratfn",
    "var_key",
]
