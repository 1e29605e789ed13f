"""Exact coefficient fields: the rationals and prime fields F_p."""

from __future__ import annotations

from fractions import Fraction


class FieldError(ValueError):
    pass


class Mod:
    """An element of F_p, stored as an integer in [0, p)."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, Mod):
            if other.p != self.p:
                raise FieldError(f"mixing F_{self.p} and F_{other.p}")
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o % self.p == 0:
            raise ZeroDivisionError(f"division by zero in F_{self.p}")
        return Mod(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Mod(o, self.p) / self

    def __neg__(self):
        return Mod(-self.v, self.p)

    def __pow__(self, n: int):
        return Mod(pow(self.v, n, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, Mod):
            return self.p == other.p and self.v == other.v
        if isinstance(other, int):
            return (self.v - other) % self.p == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return f"Mod({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


class RationalField:
    """The field Q; elements are `fractions.Fraction`."""

    characteristic = 0
    name = "Q"

    def __call__(self, x) -> Fraction:
        if isinstance(x, Mod):
            raise FieldError("cannot coerce an F_p element into Q")
        return Fraction(x)

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "QQ"

    def describe(self) -> str:
        return "Q"


class PrimeField:
    """The field F_p for a prime p < 2**31."""

    def __init__(self, p: int):
        if p < 2 or p >= 2**31 or not _is_prime(p):
            raise FieldError(f"{p} is not a supported prime")
        self.p = p
        self.characteristic = p
        self.name = f"F{p}"

    def __call__(self, x) -> Mod:
        if isinstance(x, Mod):
            if x.p != self.p:
                raise FieldError(f"cannot coerce F_{x.p} element into F_{self.p}")
            return x
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise FieldError(f"{x} has no image in F_{self.p}")
            return Mod(x.numerator, self.p) / x.denominator
        return Mod(int(x), self.p)

    @property
    def zero(self):
        return Mod(0, self.p)

    @property
    def one(self):
        return Mod(1, self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return f"GF({self.p})"

    def describe(self) -> str:
        return f"Fp {self.p}"


def _is_prime(n: int) -> bool:
    if n < 4:
        return n >= 2
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


QQ = RationalField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def format_scalar(c) -> str:
    """Exact string form: `p/q` for rationals, the residue for F_p."""
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return str(c.numerator)
        return f"{c.numerator}/{c.denominator}"
    return str(c)
