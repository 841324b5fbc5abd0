"""Exact linear algebra over a field (Fraction or RatFn entries).

Dense routines work with any field element supporting ``+ - * /`` and
truthiness as the nonzero test.  :func:`rank_sparse` is the workhorse for
large numeric matrices: rows are dicts, elimination is fraction-free over
the integers with primitive-row normalization.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, List, Sequence, Tuple


class SingularMatrixError(ArithmeticError):
    pass


def _size(x) -> int:
    # pivot heuristic: prefer short entries to curb expression swell
    if isinstance(x, Fraction):
        return x.numerator.bit_length() + x.denominator.bit_length()
    num = getattr(x, "num", None)
    if num is not None:
        return len(num.terms) + len(x.den.terms)
    return 0


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form.  Returns (rows, pivot_columns)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0]) if ncols is None else ncols
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        best = None
        for i in range(r, len(m)):
            if m[i][c]:
                s = _size(m[i][c])
                if best is None or s < best[0]:
                    best = (s, i)
        if best is None:
            continue
        i = best[1]
        m[r], m[i] = m[i], m[r]
        piv = m[r][c]
        inv = 1 / piv
        m[r] = [x * inv if x else x for x in m[r]]
        for j in range(len(m)):
            if j != r and m[j][c]:
                f = m[j][c]
                row_r = m[r]
                m[j] = [a - f * b if b else a for a, b in zip(m[j], row_r)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int, one=Fraction(1), zero=Fraction(0)) -> List[list]:
    """Basis of {v : rows . v = 0}, one vector per free column."""
    if not rows:
        return [[one if i == j else zero for i in range(ncols)] for j in range(ncols)]
    red, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(piv)]
    basis = []
    for fc in free:
        v = [zero] * ncols
        v[fc] = one
        for row, pc in zip(red, piv):
            if row[fc]:
                v[pc] = -row[fc]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence], b: Sequence, zero=Fraction(0)):
    """Solve a x = b (a square or overdetermined); raises on inconsistency."""
    n = len(a[0])
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    red, piv = rref(aug, n + 1)
    if n in piv:
        raise SingularMatrixError("inconsistent linear system")
    if len(piv) < n:
        raise SingularMatrixError("underdetermined linear system")
    x = [zero] * n
    for row, pc in zip(red, piv):
        x[pc] = row[n]
    return x


def inverse(a: Sequence[Sequence], one=Fraction(1), zero=Fraction(0)):
    n = len(a)
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(a)]
    red, piv = rref(aug, n)
    if piv != list(range(n)):
        raise SingularMatrixError("matrix is singular")
    return [row[n:] for row in red]


def det(a: Sequence[Sequence], one=Fraction(1)):
    m = [list(r) for r in a]
    n = len(m)
    d = one
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c]), None)
        if p is None:
            return one * 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        piv = m[c][c]
        d = d * piv
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] / piv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


def matmul(a, b):
    return [[_dot(row, col) for col in zip(*b)] for row in a]


def _dot(u, v):
    acc = None
    for x, y in zip(u, v):
        if x and y:
            t = x * y
            acc = t if acc is None else acc + t
    if acc is None:
        return u[0] * 0 if u else 0
    return acc


def identity(n, one=Fraction(1), zero=Fraction(0)):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(c) for c in zip(*a)]


# -- sparse integer rank ------------------------------------------------------

def _primitive(row: Dict[int, int]) -> Dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {k: v // g for k, v in row.items()}
    return row


def _to_int_row(row: Dict[int, Fraction]) -> Dict[int, int]:
    den = 1
    for v in row.values():
        d = Fraction(v).denominator
        den = den * d // gcd(den, d)
    return _primitive({k: int(Fraction(v) * den) for k, v in row.items() if v})


def rank_sparse(rows: List[Dict[int, Fraction]]) -> int:
    """Exact rank of a sparse rational matrix given as {col: value} rows."""
    work = [_to_int_row(r) for r in rows]
    work = [r for r in work if r]
    # column -> (creation index, pivot row).  A pivot row carries no entry in
    # any pivot column created before it, so eliminating in creation order
    # only ever introduces later pivot columns and terminates.
    pivots: Dict[int, Tuple[int, Dict[int, int]]] = {}
    for row in work:
        while row:
            hit = None
            for c in row:
                if c in pivots and (hit is None or pivots[c][0] < pivots[hit][0]):
                    hit = c
            if hit is None:
                c = min(row, key=lambda k: (abs(row[k]), k))
                pivots[c] = (len(pivots), row)
                break
            p = pivots[hit][1]
            a, b = p[hit], row[hit]
            g = gcd(a, b)
            fa, fb = a // g, b // g
            new = {k: v * fa for k, v in row.items()}
            for k, v in p.items():
                t = new.get(k, 0) - v * fb
                if t:
                    new[k] = t
                else:
                    new.pop(k, None)
            row = _primitive(new)
    return len(pivots)


def to_sparse(rows: Sequence[Sequence]) -> List[Dict[int, Fraction]]:
    return [{j: Fraction(v) for j, v in enumerate(r) if v} for r in rows]


__all__ = [
    "rref", "rank", "nullspace", "solve", "inverse", "det", "matmul", "identity",
    "transpose", "rank_sparse", "to_sparse", "SingularMatrixError",
]
