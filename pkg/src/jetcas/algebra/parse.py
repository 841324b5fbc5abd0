"""Recursive-descent parser for rational-function expressions.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = { "+" | "-" } power ;
    power   = atom [ ("^" | "**") exponent ] ;
    exponent= [ "+" | "-" ] integer | "(" [ "+" | "-" ] integer ")" ;
    atom    = number | name | "(" expr ")" ;
    number  = digit { digit } [ "." digit { digit } ] ;
    name    = letter { letter | digit | "_" } ;

Decimal literals are read exactly (``0.25`` is ``1/4``).  Function
application (``sin(x)``) is rejected: only rational functions are allowed.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

from .poly import Poly
from .ratfn import RatFn


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.pos = pos
        self.text = text


class UnknownVariableError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {text[start]!r}", text, start)
        num, name, op = m.groups()
        start = m.start(1) if num else m.start(2) if name else m.start(3)
        if num:
            tokens.append(("num", num, start))
        elif name:
            tokens.append(("name", name, start))
        else:
            tokens.append(("op", op, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, allowed: Optional[set]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.allowed = allowed

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value or kind != "op":
            raise ExprSyntaxError(f"expected {value!r}", self.text, pos)

    def parse(self) -> RatFn:
        if self.peek()[0] == "end":
            raise ExprSyntaxError("empty expression", self.text, 0)
        val = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {v!r}", self.text, pos)
        return val

    def expr(self) -> RatFn:
        val = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self) -> RatFn:
        val = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "*":
                val = val * rhs
            else:
                if rhs.is_zero():
                    raise ZeroDivisionError(f"division by the zero polynomial at position {pos}: {self.text!r}")
                val = val / rhs
        return val

    def unary(self) -> RatFn:
        sign = 1
        while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            if self.take()[1] == "-":
                sign = -sign
        val = self.power()
        return -val if sign < 0 else val

    def power(self) -> RatFn:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] in ("^", "**"):
            self.take()
            e = self.exponent()
            if e < 0 and base.is_zero():
                raise ZeroDivisionError(f"negative power of zero in {self.text!r}")
            return base ** e
        return base

    def exponent(self) -> int:
        paren = False
        if self.peek()[1] == "(":
            self.take()
            paren = True
        sign = 1
        if self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        kind, val, pos = self.take()
        if kind != "num" or "." in val:
            raise ExprSyntaxError("exponent must be an integer", self.text, pos)
        if paren:
            self.expect(")")
        return sign * int(val)

    def atom(self) -> RatFn:
        kind, val, pos = self.take()
        if kind == "num":
            return RatFn.const(Fraction(val))
        if kind == "name":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                raise ExprSyntaxError(f"function application {val}(...) is not a rational expression", self.text, pos)
            if self.allowed is not None and val not in self.allowed:
                raise UnknownVariableError(f"unknown variable {val!r} at position {pos}: {self.text!r}")
            return RatFn(Poly.var(val), _normal=True)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "end":
            raise ExprSyntaxError("unexpected end of expression", self.text, pos)
        raise ExprSyntaxError(f"unexpected token {val!r}", self.text, pos)


def parse_expr(text: str, vars: Optional[Iterable[str]] = None) -> RatFn:
    """Parse ``text`` into a normalized :class:`RatFn`.

    When ``vars`` is given, any other identifier raises
    :class:`UnknownVariableError`.
    """
    allowed = set(vars) if vars is not None else None
    return _Parser(text, allowed).parse()
