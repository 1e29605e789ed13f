"""Finitely presented commutative algebras over Q or F_p.

A `RingPresentation` has its own variables and, optionally, a base ring
whose variables come after its own; the monomial order is then the block
order (own block first), which is what makes "free over the base"
certificates possible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import groebner as gb
from .orders import ORDERS, block_key, divides, simple_key
from .polynomials import Poly, add_terms, format_terms, mul_terms, parse_terms
from .scalars import Mod


class AlgebraError(ValueError):
    """Raised when an algebraic precondition fails."""


class NotFiniteError(AlgebraError):
    pass


def _ideal_vec(terms: dict) -> dict:
    return {(0, e): c for e, c in terms.items()}


def _terms_of(vec: dict) -> dict:
    return {e: c for (_, e), c in vec.items()}


class RingPresentation:
    """k[own vars, base vars] / (relations), optionally over a base ring."""

    def __init__(self, field, variables: Sequence[str], relations: Iterable = (),
                 order: str = "degrevlex", base: "RingPresentation | None" = None):
        if order not in ORDERS:
            raise AlgebraError(f"unknown monomial order {order!r}")
        if base is not None and base.field != field:
            raise AlgebraError("ring and base ring have different coefficient fields")
        self.field = field
        self.own = tuple(variables)
        self.base = base
        self.order = order
        self.variables = self.own + (base.variables if base else ())
        if len(set(self.variables)) != len(self.variables):
            raise AlgebraError(f"repeated variable names in {self.variables}")
        for v in self.own:
            if not v.isidentifier() or not v.isascii():
                raise AlgebraError(f"variable {v!r} is not an ASCII identifier")
        self.nvars = len(self.variables)
        blocks = [(len(self.own), simple_key(order))]
        if base is not None:
            blocks.append((base.nvars, base.monomial_key))
        self.monomial_key = block_key(blocks)
        own_rels = [self._raw(r) for r in relations]
        self.own_relations = tuple(t for t in own_rels if t)
        lifted = [self._lift_base(t) for t in base.relation_terms] if base else []
        self.relation_terms = self.own_relations + tuple(lifted)
        self.gb = gb.groebner([_ideal_vec(t) for t in self.relation_terms], self.monomial_key)
        self._gb_elems = gb.elems(self.gb, self.monomial_key)
        self._term_key = gb.term_key(self.monomial_key)

    # -- construction helpers -------------------------------------------------

    def _raw(self, r) -> dict:
        if isinstance(r, str):
            return parse_terms(r, self.variables, self.field)
        if isinstance(r, Poly):
            if r.ring.variables != self.variables:
                raise AlgebraError("relation lives in a different ring")
            return dict(r.terms)
        if isinstance(r, dict):
            return dict(r)
        raise TypeError(f"cannot read a relation from {r!r}")

    def _lift_base(self, terms: dict) -> dict:
        pad = (0,) * len(self.own)
        return {pad + e: c for e, c in terms.items()}

    # -- element construction -------------------------------------------------

    def reduce_terms(self, terms: dict) -> dict:
        if not self.gb or not terms:
            return {e: c for e, c in terms.items() if c}
        return _terms_of(gb.reduce_vector(_ideal_vec(terms), self._gb_elems, self._term_key))

    def __call__(self, x) -> Poly:
        if isinstance(x, Poly):
            if x.ring is self:
                return x
            if x.ring.variables == self.variables and x.ring.field == self.field:
                return Poly(self, dict(x.terms))
            if self.base is not None and x.ring == self.base:
                return self.from_base(x)
            raise AlgebraError("cannot coerce polynomial between these rings")
        if isinstance(x, str):
            return Poly(self, parse_terms(x, self.variables, self.field))
        if isinstance(x, (int, Fraction, Mod)):
            c = self.field(x)
            return Poly(self, {(0,) * self.nvars: c} if c else {}, reduced=True)
        raise TypeError(f"cannot build a polynomial from {x!r}")

    def poly(self, terms: dict) -> Poly:
        return Poly(self, dict(terms))

    def monomial(self, exp: tuple, coeff=1) -> Poly:
        return Poly(self, {tuple(exp): self.field(coeff)})

    @cached_property
    def zero(self) -> Poly:
        return Poly(self, {}, reduced=True)

    @cached_property
    def one(self) -> Poly:
        return self(1)

    def gens(self) -> dict[str, Poly]:
        out = {}
        for i, v in enumerate(self.variables):
            e = [0] * self.nvars
            e[i] = 1
            out[v] = self.monomial(tuple(e))
        return out

    def var(self, name: str) -> Poly:
        return self.gens()[name]

    def from_base(self, p: Poly) -> Poly:
        if self.base is None:
            raise AlgebraError("ring has no base")
        return Poly(self, self._lift_base(p.terms))

    # -- structure --------------------------------------------------------------

    @property
    def is_field(self) -> bool:
        """True for the bare coefficient field (no variables, no relations)."""
        return self.nvars == 0 and not self.gb

    @cached_property
    def ambient(self) -> "RingPresentation":
        """The free polynomial ring on the same variables and order."""
        if not self.gb:
            return self
        base = self.base.ambient if self.base is not None else None
        return RingPresentation(self.field, self.own, (), self.order, base)

    def relations(self) -> list[Poly]:
        amb = self.ambient
        return [Poly(amb, dict(t), reduced=True) for t in self.relation_terms]

    def is_zero_ring(self) -> bool:
        return any(not any(e) for g in self.gb for (_, e) in g)

    def _signature(self):
        return (self.field, self.own, self.order,
                tuple(tuple(sorted(g.items(), key=lambda kv: self._term_key(kv[0]))) for g in self.gb),
                self.base._signature() if self.base is not None else None)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, RingPresentation):
            return NotImplemented
        return self._signature() == other._signature()

    def __hash__(self):
        return hash((self.own, self.order, self.field))

    def format(self, p) -> str:
        terms = p.terms if isinstance(p, Poly) else p
        return format_terms(terms, self.variables, self.monomial_key)

    def __repr__(self):
        rels = ", ".join(format_terms(t, self.variables, self.monomial_key) for t in self.own_relations)
        base = f" over {self.base!r}" if self.base is not None else ""
        vars_ = ",".join(self.own)
        quot = f"/({rels})" if rels else ""
        return f"{self.field.name}[{vars_}]{quot}{base}"

    # -- base coordinates ------------------------------------------------------

    def split_exponent(self, exp: tuple) -> tuple[tuple, tuple]:
        n = len(self.own)
        return exp[:n], exp[n:]

    @cached_property
    def base_ring(self) -> "RingPresentation":
        """The base, or the bare field when there is none."""
        return self.base if self.base is not None else field_ring(self.field)

    @cached_property
    def free_basis(self) -> tuple[tuple, ...]:
        """Standard own-monomials forming a free basis over the base ring.

        Certifies freeness: the block-order Groebner basis must split into
        the base relations plus elements whose leading monomials involve
        own variables only, and every own variable needs a pure power among
        those leading monomials.
        """
        n = len(self.own)
        base = self.base_ring
        own_leads = []
        base_part = []
        for g in self.gb:
            lt = max(g, key=self._term_key)[1]
            lo, lb = lt[:n], lt[n:]
            if any(lo):
                if any(lb):
                    raise NotFiniteError(
                        f"leading monomial of {self.format(_terms_of(g))} mixes base variables; "
                        "no free basis certificate")
                own_leads.append(lo)
            else:
                if any(any(e[:n]) for (_, e) in g):
                    raise NotFiniteError("base-variable leading term with own-variable tail")
                base_part.append({(0, e[n:]): c for (_, e), c in g.items()})
        base_gb = gb.groebner(base_part, base.monomial_key)
        if base_gb != base.gb:
            raise NotFiniteError("relations change the base ring; not free over it")
        for i, v in enumerate(self.own):
            if not any(lo[i] > 0 and sum(lo) == lo[i] for lo in own_leads):
                raise NotFiniteError(
                    f"quotient is not finite over the base: no pure power of {v} "
                    "among the leading terms")
        bound = [0] * n
        for lo in own_leads:
            for i in range(n):
                if lo[i] > 0 and sum(lo) == lo[i]:
                    bound[i] = lo[i] if bound[i] == 0 else min(bound[i], lo[i])
        out = []

        def rec(prefix):
            i = len(prefix)
            if i == n:
                e = tuple(prefix)
                if not any(divides(lo, e) for lo in own_leads):
                    out.append(e)
                return
            for k in range(bound[i]):
                rec(prefix + [k])

        rec([])
        key = simple_key(self.order)
        out.sort(key=key)
        return tuple(out)

    def basis_elements(self) -> list[Poly]:
        pad = (0,) * (self.nvars - len(self.own))
        return [self.monomial(e + pad) for e in self.free_basis]

    def coordinates(self, p: Poly) -> list[Poly]:
        """Coordinates of p in `free_basis`, as elements of the base ring."""
        index = {e: i for i, e in enumerate(self.free_basis)}
        base = self.base_ring
        acc: list[dict] = [{} for _ in index]
        for e, c in p.terms.items():
            lo, lb = self.split_exponent(e)
            acc[index[lo]][lb] = c
        return [Poly(base, t, reduced=True) for t in acc]

    def from_coordinates(self, coords: Sequence[Poly]) -> Poly:
        out = self.zero
        for c, b in zip(coords, self.basis_elements()):
            if c:
                out = out + (self.from_base(c) if self.base is not None else c.constant()) * b
        return out

    # -- invertibility ---------------------------------------------------------

    def is_unit(self, u: Poly) -> bool:
        if u.is_zero():
            return False
        if u.is_constant():
            return True
        return Ideal(self, [u]).is_unit_ideal()

    def inverse(self, u: Poly) -> Poly:
        if u.is_zero():
            raise ZeroDivisionError("zero is not invertible")
        if u.is_constant():
            return self(1 / u.constant())
        from .modules import lift_to_ideal
        cof = lift_to_ideal(self.one, [u])
        if cof is None:
            raise AlgebraError(f"{u} is not a unit in {self!r}")
        return cof[0]


def field_ring(field) -> RingPresentation:
    return RingPresentation(field, ())


def polynomial_ring(field, variables: Sequence[str] | str, order: str = "degrevlex",
                    base: RingPresentation | None = None) -> RingPresentation:
    if isinstance(variables, str):
        variables = [v.strip() for v in variables.split(",") if v.strip()]
    return RingPresentation(field, variables, (), order, base)


def quotient_ring(field, variables, relations, order: str = "degrevlex",
                  base: RingPresentation | None = None) -> RingPresentation:
    if isinstance(variables, str):
        variables = [v.strip() for v in variables.split(",") if v.strip()]
    return RingPresentation(field, variables, relations, order, base)


class Ideal:
    """An ideal of a ring presentation, with its Groebner basis cached.

    The basis is that of (generators + defining relations) in the ambient
    polynomial ring, so normal forms are also normal forms in the quotient.
    """

    def __init__(self, ring: RingPresentation, generators: Iterable):
        self.ring = ring
        self.generators = tuple(ring(g) for g in generators)
        if not self.generators:
            raise AlgebraError("an ideal needs at least one generator")
        vecs = [_ideal_vec(g.terms) for g in self.generators] + list(ring.gb)
        self.gb = gb.groebner(vecs, ring.monomial_key)
        self._elems = gb.elems(self.gb, ring.monomial_key)

    def groebner_basis(self) -> list[Poly]:
        amb = self.ring.ambient
        return [Poly(amb, _terms_of(g), reduced=True) for g in self.gb]

    def normal_form(self, p) -> Poly:
        p = self.ring(p)
        rem = gb.reduce_vector(_ideal_vec(p.terms), self._elems, self.ring._term_key)
        return Poly(self.ring, _terms_of(rem), reduced=True)

    def contains(self, p) -> bool:
        return self.normal_form(p).is_zero()

    __contains__ = contains

    def is_unit_ideal(self) -> bool:
        return any(not any(e) for g in self.gb for (_, e) in g)

    def leading_exponents(self) -> list[tuple]:
        return [max(g, key=self.ring._term_key)[1] for g in self.gb]

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.gb == other.gb

    def __hash__(self):
        return hash(len(self.gb))

    def __add__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.ring, self.generators + other.generators)

    def quotient_ring(self) -> RingPresentation:
        r = self.ring
        return RingPresentation(r.field, r.own, list(r.own_relations) + [g.terms for g in self.generators],
                                r.order, r.base)

    def colon(self, f) -> "Ideal":
        """(I : f) = {a : a f in I}."""
        from .modules import colon_generators
        return Ideal(self.ring, colon_generators(self, self.ring(f)))

    def saturation(self, f, cap: int = 20) -> "Ideal":
        """(I : f^oo), computed by iterated colons; errors past `cap` steps."""
        cur = self
        for _ in range(cap):
            nxt = cur.colon(f)
            if nxt == cur:
                return cur
            cur = nxt
        raise AlgebraError(f"saturation by {f} did not stabilize within {cap} steps")

    def __repr__(self):
        return f"Ideal({', '.join(map(str, self.generators))})"


def zero_ideal(ring: RingPresentation) -> Ideal:
    return Ideal(ring, [ring.zero])


def groebner_basis(ideal: Ideal) -> list[Poly]:
    return ideal.groebner_basis()


def normal_form(p, ideal: Ideal) -> Poly:
    if isinstance(p, Poly) and p.ring.nvars != ideal.ring.nvars:
        raise AlgebraError("arity mismatch between polynomial and ideal")
    return ideal.normal_form(p)


@dataclass(frozen=True)
class RegularityResult:
    regular: bool
    index: int | None = None  # 1-based position of the first failure
    witness: Poly | None = None

    def __bool__(self):
        return self.regular


def colon_and_regularity(t: Sequence, ring: RingPresentation) -> RegularityResult:
    """Check ((t_1..t_{i-1}) : t_i) = (t_1..t_{i-1}) for every i."""
    t = [ring(x) for x in t]
    if not t:
        raise AlgebraError("empty sequence")
    for i, ti in enumerate(t):
        prev = Ideal(ring, t[:i]) if i else zero_ideal(ring)
        col = prev.colon(ti)
        if col != prev:
            for g in col.generators:
                if not prev.contains(g):
                    return RegularityResult(False, i + 1, prev.normal_form(g))
    return RegularityResult(True)


def monomial_basis(ring: RingPresentation) -> list[tuple]:
    return list(ring.free_basis)


class RingMap:
    """A k-algebra map given by the images of the source variables."""

    def __init__(self, source: RingPresentation, target: RingPresentation, images: Sequence):
        if source.field != target.field:
            raise AlgebraError(
                f"no ring map between {source.field.name}-algebra and {target.field.name}-algebra")
        if len(images) != source.nvars:
            raise AlgebraError(f"expected {source.nvars} images, got {len(images)}")
        self.source = source
        self.target = target
        self.images = tuple(target(x) for x in images)
        for rel in source.relation_terms:
            if not self._apply_terms(rel).is_zero():
                raise AlgebraError(
                    f"map does not respect relation {source.format(rel)}")

    def _apply_terms(self, terms: dict) -> Poly:
        out = self.target.zero
        powers: dict = {}
        for e, c in terms.items():
            term = self.target(c)
            for i, k in enumerate(e):
                if k:
                    if (i, k) not in powers:
                        powers[(i, k)] = self.images[i] ** k
                    term = term * powers[(i, k)]
            out = out + term
        return out

    def __call__(self, p) -> Poly:
        if isinstance(p, Poly):
            if p.ring != self.source:
                raise AlgebraError("element is not in the source ring")
            return self._apply_terms(p.terms)
        return self._apply_terms(self.source(p).terms)

    def compose(self, first: "RingMap") -> "RingMap":
        """self o first."""
        return RingMap(first.source, self.target, [self(x) for x in first.images])

    @classmethod
    def identity(cls, ring: RingPresentation) -> "RingMap":
        return cls(ring, ring, list(ring.gens().values()))

    def __repr__(self):
        pairs = ", ".join(f"{v}->{img}" for v, img in zip(self.source.variables, self.images))
        return f"RingMap({pairs})"


def base_change_ring(ring: RingPresentation, g: RingMap) -> tuple[RingPresentation, RingMap]:
    """R' = R (x)_A A' with transported relations, and the induced map R -> R'."""
    if ring.base_ring != g.source:
        raise AlgebraError("base change map does not start at the ring's base")
    n = len(ring.own)
    new_base = None if g.target.is_field else g.target
    proto = RingPresentation(ring.field, ring.own, (), ring.order, new_base)
    own_imgs = [proto.monomial(tuple(1 if j == i else 0 for j in range(proto.nvars)))
                for i in range(n)]
    base_imgs = [proto.from_base(x) if new_base is not None else proto(x.constant())
                 for x in g.images]
    images = own_imgs + base_imgs

    def transport(terms: dict) -> dict:
        out: dict = {}
        for e, c in terms.items():
            term = {(0,) * proto.nvars: c}
            for i, k in enumerate(e):
                for _ in range(k):
                    term = mul_terms(term, images[i].terms)
            out = add_terms(out, term)
        return out

    rels = [transport(t) for t in ring.own_relations]
    target = RingPresentation(ring.field, ring.own, rels, ring.order, new_base)
    induced = RingMap(ring, target, [target(x) for x in images])
    return target, induced
