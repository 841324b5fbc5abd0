"""Multi-index bookkeeping shared by the jet and form modules."""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb, factorial
from typing import Iterator, List, Tuple

MultiIndex = Tuple[int, ...]


@lru_cache(maxsize=None)
def of_order(n: int, s: int) -> Tuple[MultiIndex, ...]:
    """All multi-indices of length n and order exactly s, lexicographically descending."""
    if n == 0:
        return ((),) if s == 0 else ()
    if n == 1:
        return ((s,),)
    out = []
    for first in range(s, -1, -1):
        for rest in of_order(n - 1, s - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def up_to(n: int, q: int) -> Tuple[MultiIndex, ...]:
    return tuple(mu for s in range(q + 1) for mu in of_order(n, s))


def zero(n: int) -> MultiIndex:
    return (0,) * n


def unit(n: int, i: int) -> MultiIndex:
    return tuple(1 if j == i else 0 for j in range(n))


def add_unit(mu: MultiIndex, i: int) -> MultiIndex:
    return mu[:i] + (mu[i] + 1,) + mu[i + 1:]


def sub_unit(mu: MultiIndex, i: int) -> MultiIndex:
    if mu[i] == 0:
        raise ValueError(f"cannot lower slot {i} of {mu}")
    return mu[:i] + (mu[i] - 1,) + mu[i + 1:]


def add(mu: MultiIndex, nu: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(mu, nu))


def sub(mu: MultiIndex, nu: MultiIndex) -> MultiIndex:
    return tuple(a - b for a, b in zip(mu, nu))


def order(mu: MultiIndex) -> int:
    return sum(mu)


def mfactorial(mu: MultiIndex) -> int:
    out = 1
    for a in mu:
        out *= factorial(a)
    return out


def leq(lam: MultiIndex, mu: MultiIndex) -> bool:
    return all(a <= b for a, b in zip(lam, mu))


@lru_cache(maxsize=None)
def below(mu: MultiIndex) -> Tuple[MultiIndex, ...]:
    """All lambda <= mu componentwise, by increasing order."""
    ranges = [range(a + 1) for a in mu]
    out: List[MultiIndex] = [()]
    for r in ranges:
        out = [p + (x,) for p in out for x in r]
    return tuple(sorted(out, key=lambda lam: (sum(lam), tuple(-x for x in lam))))


def binom(mu: MultiIndex, lam: MultiIndex) -> int:
    """mu! / (lam! (mu-lam)!)."""
    out = 1
    for a, b in zip(mu, lam):
        out *= comb(a, b)
    return out


def from_indices(n: int, idx) -> MultiIndex:
    """Multi-index counting the repeated slots of an index list, e.g. (0,0,1) -> (2,1)."""
    mu = [0] * n
    for i in idx:
        mu[i] += 1
    return tuple(mu)


def first_slot(mu: MultiIndex) -> int:
    for i, a in enumerate(mu):
        if a:
            return i
    raise ValueError("zero multi-index has no slot")


@lru_cache(maxsize=None)
def increasing(n: int, r: int) -> Tuple[Tuple[int, ...], ...]:
    """Strictly increasing r-tuples from range(n)."""
    return tuple(combinations(range(n), r))


def sym_dim(n: int, q: int) -> int:
    return comb(n + q - 1, q)


def jet_dim(n: int, q: int) -> int:
    return comb(n + q, q)


def label(mu: MultiIndex, coords) -> str:
    """Subscript label such as 'xy' or '1 1 2' for printing."""
    parts = []
    for i, a in enumerate(mu):
        parts.extend([str(coords[i])] * a)
    return "".join(parts) if all(len(str(c)) == 1 for c in coords) else ",".join(parts)


def iter_pairs(mu: MultiIndex) -> Iterator[Tuple[MultiIndex, MultiIndex]]:
    for lam in below(mu):
        yield lam, sub(mu, lam)
