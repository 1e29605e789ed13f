"""Free modules over a ring presentation: syzygies, lifts, presentations.

Vectors are tuples of `Poly`.  Computations run in the ambient polynomial
ring with the defining relations added on every coordinate, so results are
valid over the quotient.
"""

from __future__ import annotations

from functools import cached_property
from typing import Sequence

from . import groebner as gb
from .orders import divides
from .polynomials import Poly
from .rings import AlgebraError, Ideal, NotFiniteError, RingPresentation

Vector = tuple


def to_raw(vec: Sequence[Poly], offset: int = 0) -> dict:
    out = {}
    for i, p in enumerate(vec):
        for e, c in p.terms.items():
            out[(i + offset, e)] = c
    return out


def from_raw(raw: dict, ring: RingPresentation, width: int) -> Vector:
    acc: list[dict] = [{} for _ in range(width)]
    for (p, e), c in raw.items():
        acc[p][e] = c
    return tuple(ring.poly(t) for t in acc)


def relation_vectors(ring: RingPresentation, width: int, offset: int = 0) -> list[dict]:
    return [{(i + offset, e): c for (_, e), c in g.items()} for i in range(width) for g in ring.gb]


def zero_vector(ring: RingPresentation, n: int) -> Vector:
    return tuple(ring.zero for _ in range(n))


def unit_vector(ring: RingPresentation, n: int, i: int) -> Vector:
    return tuple(ring.one if j == i else ring.zero for j in range(n))


def syzygy_module(rows: Sequence[Sequence[Poly]], ring: RingPresentation | None = None) -> list[Vector]:
    """Generators of the relations among `rows` (all in one free module)."""
    if not rows:
        return []
    ring = ring or rows[0][0].ring
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise AlgebraError("rows live in free modules of different ranks")
    raw = [to_raw(r) for r in rows]
    extra = relation_vectors(ring, width)
    syz = gb.syzygies(raw, extra, ring.nvars, ring.monomial_key, width, ring.field.one)
    out = []
    seen = set()
    for s in syz:
        v = from_raw(s, ring, len(rows))
        if any(not c.is_zero() for c in v) and v not in seen:
            seen.add(v)
            out.append(v)
    return out


def lift(vec: Sequence[Poly], rows: Sequence[Sequence[Poly]],
         ring: RingPresentation | None = None) -> list[Poly] | None:
    """Cofactors a with vec = sum a_i rows_i over the ring, or None."""
    ring = ring or vec[0].ring
    width = len(vec)
    if not rows:
        return [] if all(c.is_zero() for c in vec) else None
    raw = [to_raw(r) for r in rows]
    cof = gb.lift(to_raw(vec), raw, relation_vectors(ring, width), ring.nvars,
                  ring.monomial_key, width, ring.field.one)
    if cof is None:
        return None
    return [ring.poly({e: c for (_, e), c in a.items()}) for a in cof]


def lift_to_ideal(p: Poly, gens: Sequence[Poly]) -> list[Poly] | None:
    return lift((p,), [(g,) for g in gens], p.ring)


def colon_generators(ideal: Ideal, f: Poly) -> list[Poly]:
    ring = ideal.ring
    rows = [(f,)] + [(g,) for g in ideal.generators]
    syz = syzygy_module(rows, ring)
    gens = [s[0] for s in syz if not s[0].is_zero()]
    return gens or [ring.zero]


def matrix_columns(matrix: Sequence[Sequence[Poly]]) -> list[Vector]:
    if not matrix:
        return []
    return [tuple(row[j] for row in matrix) for j in range(len(matrix[0]))]


class ModulePresentation:
    """coker(relations) on `rank` generators, optionally with the generators
    realized as vectors of an ambient free module (a subquotient)."""

    def __init__(self, ring: RingPresentation, rank: int, relations: Sequence[Vector],
                 generators: Sequence[Vector] | None = None):
        self.ring = ring
        self.rank = rank
        self.relations = tuple(tuple(r) for r in relations)
        self.generators = tuple(tuple(g) for g in generators) if generators is not None else None

    @cached_property
    def gb(self) -> list[dict]:
        vecs = [to_raw(r) for r in self.relations] + relation_vectors(self.ring, self.rank)
        return gb.groebner(vecs, self.ring.monomial_key)

    def reduce(self, vec: Sequence[Poly]) -> Vector:
        rem = gb.normal_form(to_raw(vec), self.gb, self.ring.monomial_key)
        return from_raw(rem, self.ring, self.rank)

    def is_zero(self) -> bool:
        leads = {max(g, key=gb.term_key(self.ring.monomial_key)) for g in self.gb}
        zero = (0,) * self.ring.nvars
        return all((i, zero) in leads for i in range(self.rank))

    @cached_property
    def standard_terms(self) -> tuple:
        """k-basis of the module as (position, exponent) pairs."""
        key = gb.term_key(self.ring.monomial_key)
        n = self.ring.nvars
        leads: dict[int, list] = {i: [] for i in range(self.rank)}
        for g in self.gb:
            p, e = max(g, key=key)
            leads[p].append(e)
        out = []
        for pos in range(self.rank):
            L = leads[pos]
            if any(not any(e) for e in L):
                continue
            bound = []
            for i, v in enumerate(self.ring.variables):
                pure = [e[i] for e in L if e[i] > 0 and sum(e) == e[i]]
                if not pure:
                    raise NotFiniteError(
                        f"module is infinite-dimensional: no pure power of {v} at position {pos}")
                bound.append(min(pure))

            def rec(prefix):
                if len(prefix) == n:
                    e = tuple(prefix)
                    if not any(divides(lo, e) for lo in L):
                        out.append((pos, e))
                    return
                for k in range(bound[len(prefix)]):
                    rec(prefix + [k])

            rec([])
        out.sort(key=key, reverse=True)
        return tuple(out)

    def dimension(self) -> int:
        """Dimension over the coefficient field (NotFiniteError if infinite)."""
        return len(self.standard_terms)

    def coordinates(self, vec: Sequence[Poly]) -> list:
        """Field coordinates of the class of `vec` in `standard_terms`."""
        rem = gb.normal_form(to_raw(vec), self.gb, self.ring.monomial_key)
        zero = self.ring.field.zero
        return [rem.get(t, zero) for t in self.standard_terms]

    def class_of(self, element: Sequence[Poly]) -> Vector:
        """Express an ambient element (in the span of the generators) on them."""
        if self.generators is None:
            return tuple(element)
        cof = lift(element, self.generators, self.ring)
        if cof is None:
            raise AlgebraError("element is not in the span of the module generators")
        return tuple(cof)

    def __repr__(self):
        return f"ModulePresentation(rank={self.rank}, relations={len(self.relations)})"
