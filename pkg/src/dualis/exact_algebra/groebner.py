"""Buchberger's algorithm for ideals and submodules of free modules.

Everything here works on raw sparse vectors: dicts mapping a term
``(position, exponent_tuple)`` to a nonzero field coefficient.  An ideal
element is a vector living entirely in position 0.  Terms are compared
position-over-term, lower positions being larger, so the first positions
are eliminated first.
"""

from __future__ import annotations

import heapq
from typing import Callable, Iterable, Sequence

from .orders import MonomialKey, add, divides, lcm, sub

Term = tuple  # (pos, exp)
Vec = dict


def term_key(mkey: MonomialKey) -> Callable[[Term], tuple]:
    def key(term: Term) -> tuple:
        return (-term[0], mkey(term[1]))

    return key


def leading_term(f: Vec, key) -> Term:
    return max(f, key=key)


def _scale_shift(f: Vec, coeff, shift: tuple) -> Vec:
    return {(p, add(e, shift)): c * coeff for (p, e), c in f.items()}


def _axpy(target: Vec, f: Vec, coeff, shift: tuple) -> None:
    """target += coeff * x^shift * f, in place."""
    for (p, e), c in f.items():
        t = (p, add(e, shift))
        v = target.get(t)
        v = c * coeff if v is None else v + c * coeff
        if v:
            target[t] = v
        else:
            target.pop(t, None)


class _Elem:
    __slots__ = ("terms", "lt", "lc")

    def __init__(self, terms: Vec, key):
        self.terms = terms
        self.lt = leading_term(terms, key)
        self.lc = terms[self.lt]


def reduce_vector(f: Vec, basis: Sequence[_Elem], key) -> Vec:
    """Full reduction of f modulo basis; returns the remainder."""
    f = dict(f)
    rem: Vec = {}
    while f:
        t = max(f, key=key)
        c = f[t]
        pos, exp = t
        for g in basis:
            gp, ge = g.lt
            if gp == pos and divides(ge, exp):
                _axpy(f, g.terms, -c / g.lc, sub(exp, ge))
                break
        else:
            rem[t] = c
            del f[t]
    return rem


def _spoly(a: _Elem, b: _Elem) -> Vec:
    m = lcm(a.lt[1], b.lt[1])
    out = _scale_shift(a.terms, 1 / a.lc, sub(m, a.lt[1]))
    _axpy(out, b.terms, -1 / b.lc, sub(m, b.lt[1]))
    return out


def _monic(f: Vec, key) -> Vec:
    lt = leading_term(f, key)
    inv = 1 / f[lt]
    return {t: c * inv for t, c in f.items()}


def groebner(gens: Iterable[Vec], mkey: MonomialKey) -> list[Vec]:
    """Reduced Groebner basis (monic, sorted by descending leading term).

    Pairs are processed by the normal strategy: smallest lcm first, with
    insertion order as tie-break, so the output is deterministic.
    """
    key = term_key(mkey)
    basis: list[_Elem] = []
    for f in gens:
        f = {t: c for t, c in f.items() if c}
        if f:
            r = reduce_vector(f, basis, key) if basis else f
            if r:
                basis.append(_Elem(_monic(r, key), key))
    if not basis:
        return []
    ideal = all(p == 0 for g in basis for (p, _) in g.terms)

    heap: list = []
    pending: set = set()
    counter = 0

    def push(i: int, j: int) -> None:
        nonlocal counter
        a, b = basis[i], basis[j]
        if a.lt[0] != b.lt[0]:
            return
        m = lcm(a.lt[1], b.lt[1])
        if ideal and m == add(a.lt[1], b.lt[1]):
            return  # coprime leading monomials
        heapq.heappush(heap, (key((a.lt[0], m)), counter, i, j))
        pending.add((i, j))
        counter += 1

    for j in range(len(basis)):
        for i in range(j):
            push(i, j)

    while heap:
        _, _, i, j = heapq.heappop(heap)
        pending.discard((i, j))
        a, b = basis[i], basis[j]
        m = lcm(a.lt[1], b.lt[1])
        if _chain_redundant(basis, i, j, a.lt[0], m, pending):
            continue
        r = reduce_vector(_spoly(a, b), basis, key)
        if r:
            basis.append(_Elem(_monic(r, key), key))
            n = len(basis) - 1
            for k in range(n):
                push(k, n)
    return _reduce_basis(basis, key)


def _chain_redundant(basis, i, j, pos, m, pending) -> bool:
    for k, g in enumerate(basis):
        if k in (i, j) or g.lt[0] != pos or not divides(g.lt[1], m):
            continue
        if (min(i, k), max(i, k)) not in pending and (min(j, k), max(j, k)) not in pending:
            return True
    return False


def _reduce_basis(basis: list[_Elem], key) -> list[Vec]:
    minimal = []
    for idx, g in enumerate(basis):
        redundant = False
        for jdx, h in enumerate(basis):
            if jdx == idx or h.lt[0] != g.lt[0] or not divides(h.lt[1], g.lt[1]):
                continue
            # equal leading terms: keep the earliest one
            if h.lt != g.lt or jdx < idx:
                redundant = True
                break
        if not redundant:
            minimal.append(g)
    out = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1:]
        lead = {g.lt: g.lc}
        tail = {t: c for t, c in g.terms.items() if t != g.lt}
        r = reduce_vector(tail, others, key)
        r.update(lead)
        out.append(_Elem(_monic(r, key), key))
    out.sort(key=lambda e: key(e.lt), reverse=True)
    return [e.terms for e in out]


def elems(basis: Sequence[Vec], mkey: MonomialKey) -> list[_Elem]:
    key = term_key(mkey)
    return [_Elem(g, key) for g in basis]


def normal_form(f: Vec, basis: Sequence[Vec], mkey: MonomialKey) -> Vec:
    return reduce_vector(f, elems(basis, mkey), term_key(mkey))


def embed(f: Vec, offset: int) -> Vec:
    return {(p + offset, e): c for (p, e), c in f.items()}


def syzygies(rows: Sequence[Vec], extra: Sequence[Vec], nvars: int,
             mkey: MonomialKey, width: int, one) -> list[Vec]:
    """Generators of {a : sum a_i rows_i in span(extra)}.

    ``rows`` live in positions [0, width); ``extra`` are additional
    relations (e.g. the defining ideal times unit vectors) whose
    coefficients are not tracked.  Returned syzygies live in positions
    [0, len(rows)).
    """
    if not rows:
        return []
    zero = (0,) * nvars
    tagged = []
    for i, r in enumerate(rows):
        v = dict(r)
        v[(width + i, zero)] = one
        tagged.append(v)
    gb = groebner(tagged + list(extra), mkey)
    out = []
    for g in gb:
        if all(p >= width for (p, _) in g):
            out.append({(p - width, e): c for (p, e), c in g.items()})
    return out


def lift(f: Vec, rows: Sequence[Vec], extra: Sequence[Vec], nvars: int,
         mkey: MonomialKey, width: int, one) -> list[Vec] | None:
    """Cofactors a with f = sum a_i rows_i modulo span(extra), or None."""
    zero = (0,) * nvars
    tagged = []
    for i, r in enumerate(rows):
        v = dict(r)
        v[(width + i, zero)] = one
        tagged.append(v)
    gb = groebner(tagged + list(extra), mkey)
    rem = normal_form(dict(f), gb, mkey)
    if any(p < width for (p, _) in rem):
        return None
    cof: list[Vec] = [{} for _ in rows]
    for (p, e), c in rem.items():
        cof[p - width][(0, e)] = -c
    return cof
