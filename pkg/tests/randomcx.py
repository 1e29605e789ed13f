"""Random bounded free complexes for the sign-convention checks."""

import random

from dualis.complexes import koszul_complex, two_term
from dualis.exact_algebra import QQ, polynomial_ring

RING = polynomial_ring(QQ, "x,y,z")
MONOS = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (2, 0, 0), (1, 1, 0), (0, 1, 1), (0, 0, 2)]


def random_poly(rng, ring=RING, terms=2):
    d = {}
    for _ in range(rng.randint(1, terms)):
        d[rng.choice(MONOS)] = QQ(rng.randint(-3, 3))
    return ring.poly({e: c for e, c in d.items() if c})


def random_complex(rng, ring=RING):
    """Koszul complexes, two-term complexes and shifted direct sums of them."""
    kind = rng.choice(["koszul", "two", "sum"])
    if kind == "koszul":
        r = rng.randint(1, 3)
        return koszul_complex([random_poly(rng, ring) for _ in range(r)], ring).shift(rng.randint(-1, 1))
    if kind == "two":
        m, n = rng.randint(1, 3), rng.randint(1, 3)
        M = [[random_poly(rng, ring) for _ in range(n)] for _ in range(m)]
        return two_term(ring, M, start=rng.randint(-1, 1))
    a = koszul_complex([random_poly(rng, ring) for _ in range(rng.randint(1, 2))], ring)
    b = two_term(ring, [[random_poly(rng, ring)]], start=rng.randint(0, 1))
    return a.direct_sum(b)


def complexes(seed, count):
    rng = random.Random(seed)
    return [random_complex(rng) for _ in range(count)]
