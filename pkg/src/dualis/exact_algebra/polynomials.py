"""Sparse polynomials over a ring presentation, plus text parsing/printing.

Text syntax: ``3/2*x^2*y - 1``; ASCII identifiers as variables, ``^`` for
powers, exact rationals ``p/q``.  Parsing goes through Python's ``ast``
module after swapping ``^`` for ``**``.
"""

from __future__ import annotations

import ast
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence

from .orders import add
from .scalars import Mod, format_scalar

if TYPE_CHECKING:
    from .rings import RingPresentation


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, column: int | None = None):
        super().__init__(message)
        self.column = column


def parse_terms(text: str, variables: Sequence[str], field) -> dict:
    """Parse `text` into a dict exponent-tuple -> coefficient."""
    src = text.strip()
    if not src:
        raise PolynomialSyntaxError("empty polynomial", 0)
    try:
        tree = ast.parse(src.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        col = (exc.offset or 1) - 1
        raise PolynomialSyntaxError(f"cannot parse polynomial {text!r}", col) from None
    index = {v: i for i, v in enumerate(variables)}
    n = len(variables)
    return _eval(tree.body, index, n, field)


def _const(c, n: int) -> dict:
    return {(0,) * n: c} if c else {}


def _eval(node, index, n, field) -> dict:
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return _const(field(node.value), n)
    if isinstance(node, ast.Name):
        if node.id not in index:
            raise PolynomialSyntaxError(f"unknown variable {node.id!r}", node.col_offset)
        e = [0] * n
        e[index[node.id]] = 1
        return {tuple(e): field(1)}
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _eval(node.operand, index, n, field)
        if isinstance(node.op, ast.UAdd):
            return inner
        return {e: -c for e, c in inner.items()}
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)
                    and node.right.value >= 0):
                raise PolynomialSyntaxError("exponents must be nonnegative integers",
                                            node.right.col_offset)
            base = _eval(node.left, index, n, field)
            out = _const(field(1), n)
            for _ in range(node.right.value):
                out = mul_terms(out, base)
            return out
        left = _eval(node.left, index, n, field)
        right = _eval(node.right, index, n, field)
        if isinstance(node.op, ast.Add):
            return add_terms(left, right)
        if isinstance(node.op, ast.Sub):
            return add_terms(left, {e: -c for e, c in right.items()})
        if isinstance(node.op, ast.Mult):
            return mul_terms(left, right)
        if isinstance(node.op, ast.Div):
            if any(any(e) for e in right) or not right:
                raise PolynomialSyntaxError("can only divide by a nonzero constant",
                                            node.right.col_offset)
            inv = 1 / next(iter(right.values()))
            return {e: c * inv for e, c in left.items()}
    raise PolynomialSyntaxError(f"unsupported syntax {ast.dump(node)[:40]}",
                                getattr(node, "col_offset", None))


def add_terms(a: dict, b: dict) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e)
        v = c if v is None else v + c
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def mul_terms(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = add(ea, eb)
            v = out.get(e)
            v = ca * cb if v is None else v + ca * cb
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def format_terms(terms: dict, variables: Sequence[str], key) -> str:
    if not terms:
        return "0"
    parts = []
    for e in sorted(terms, key=key, reverse=True):
        c = terms[e]
        mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(variables, e) if k)
        neg = _is_negative(c)
        mag = -c if neg else c
        cs = format_scalar(mag)
        if not mono:
            body = cs
        elif cs == "1":
            body = mono
        else:
            body = f"{cs}*{mono}"
        parts.append(("-" if neg else "+", body))
    sign, body = parts[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _is_negative(c) -> bool:
    if isinstance(c, Fraction):
        return c < 0
    return False


class Poly:
    """A ring element, always stored as its normal form."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: "RingPresentation", terms: dict, reduced: bool = False):
        self.ring = ring
        self.terms = terms if reduced else ring.reduce_terms(terms)

    def _other(self, other) -> dict | None:
        if isinstance(other, Poly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ValueError("polynomials from different rings")
            return other.terms
        if isinstance(other, (int, Fraction, Mod)):
            c = self.ring.field(other)
            return {(0,) * self.ring.nvars: c} if c else {}
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return Poly(self.ring, add_terms(self.terms, o), reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {e: -c for e, c in self.terms.items()}, reduced=True)

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return Poly(self.ring, add_terms(self.terms, {e: -c for e, c in o.items()}), reduced=True)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Mod)):
            c = self.ring.field(other)
            if not c:
                return self.ring.zero
            return Poly(self.ring, {e: v * c for e, v in self.terms.items()}, reduced=True)
        o = self._other(other)
        if o is None:
            return NotImplemented
        return Poly(self.ring, mul_terms(self.terms, o))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = self.ring.one
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self.terms == o

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant(self):
        """The coefficient of the monomial 1."""
        return self.terms.get((0,) * self.ring.nvars, self.ring.field.zero)

    def leading_exponent(self) -> tuple:
        return max(self.terms, key=self.ring.monomial_key)

    def scale(self, c) -> "Poly":
        return self * c

    def derivative(self, i: int) -> "Poly":
        """Partial derivative with respect to the i-th variable."""
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                d = list(e)
                d[i] -= 1
                v = c * e[i]
                if v:
                    out[tuple(d)] = v
        return Poly(self.ring, out)

    def shift(self, exp: tuple) -> "Poly":
        return Poly(self.ring, {add(e, exp): c for e, c in self.terms.items()})

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        return format_terms(self.terms, self.ring.variables, self.ring.monomial_key)
