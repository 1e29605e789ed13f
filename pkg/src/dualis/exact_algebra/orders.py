"""Monomial orders as sort keys on exponent tuples (larger key = larger monomial)."""

from __future__ import annotations

from typing import Callable, Sequence

ORDERS = ("lex", "degrevlex")

MonomialKey = Callable[[tuple], tuple]


def lex_key(exp: tuple) -> tuple:
    return exp


def degrevlex_key(exp: tuple) -> tuple:
    return (sum(exp), tuple(-e for e in reversed(exp)))


def simple_key(order: str) -> MonomialKey:
    if order == "lex":
        return lex_key
    if order == "degrevlex":
        return degrevlex_key
    raise ValueError(f"unknown monomial order {order!r}")


def block_key(blocks: Sequence[tuple[int, MonomialKey]]) -> MonomialKey:
    """Product order: compare the first block, then the next, and so on."""
    spans = []
    start = 0
    for size, key in blocks:
        spans.append((start, start + size, key))
        start += size
    if len(spans) == 1:
        return spans[0][2]

    def key(exp: tuple) -> tuple:
        return tuple(k(exp[a:b]) for a, b, k in spans)

    return key


def divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def lcm(a: tuple, b: tuple) -> tuple:
    return tuple(max(x, y) for x, y in zip(a, b))


def sub(a: tuple, b: tuple) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))
