"""Bounded complexes of finite free modules and their sign conventions.

A complex stores a rank per degree and a differential matrix d^n of shape
(rank n+1) x (rank n) acting on column vectors.  The conventions are:

* Hom^n(A, B) = sum over p of Hom(A^p, B^{p+n}), ascending p, each block a
  (rank B^{p+n}) x (rank A^p) matrix flattened row-major, with
  d f = d_B f - (-1)^n f d_A.
* (A (x) B)^n = sum over p of A^p (x) B^{n-p}, ascending p, basis e_i (x) f_j
  ordered i-major, with d = d_A (x) 1 + (-1)^p 1 (x) d_B.
* A[i]^n = A^{n+i} with differential (-1)^i d_A.
* theta_ij : A[i] (x) B[j] -> (A (x) B)[i+j] is (-1)^{pj} on A[i]^p (x) B[j]^q.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Sequence

from .exact_algebra.linalg import identity, is_zero_matrix, matmul, neg, zeros
from .exact_algebra.modules import ModulePresentation, lift, matrix_columns, syzygy_module
from .exact_algebra.polynomials import Poly
from .exact_algebra.rings import AlgebraError, RingPresentation


class ComplexError(AlgebraError):
    pass


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


class Complex:
    """A bounded complex of finite free modules over `ring`."""

    def __init__(self, ring: RingPresentation, ranks: dict, diffs: dict | None = None,
                 check: bool = True):
        self.ring = ring
        self.ranks = {n: r for n, r in ranks.items() if r > 0}
        self.diffs = {}
        for n, M in (diffs or {}).items():
            rows, cols = self.rank(n + 1), self.rank(n)
            if rows == 0 or cols == 0:
                if any(x for row in M for x in row):
                    raise ComplexError(f"nonzero differential d^{n} into or out of a zero module")
                continue
            if len(M) != rows or any(len(row) != cols for row in M):
                raise ComplexError(f"d^{n} should be {rows}x{cols}")
            M = [[ring(x) for x in row] for row in M]
            if not is_zero_matrix(M):
                self.diffs[n] = M
        if check:
            for n in self.diffs:
                if n + 1 in self.diffs and not is_zero_matrix(
                        matmul(self.diffs[n + 1], self.diffs[n], ring)):
                    raise ComplexError(f"d^{n + 1} d^{n} is not zero")

    # -- basic accessors ----------------------------------------------------------

    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def d(self, n: int) -> list:
        if n in self.diffs:
            return self.diffs[n]
        return zeros(self.ring, self.rank(n + 1), self.rank(n))

    @property
    def degrees(self) -> list[int]:
        return sorted(self.ranks)

    @property
    def lo(self) -> int:
        return min(self.ranks) if self.ranks else 0

    @property
    def hi(self) -> int:
        return max(self.ranks) if self.ranks else -1

    def is_zero(self) -> bool:
        return not self.ranks

    def __eq__(self, other):
        if not isinstance(other, Complex):
            return NotImplemented
        if self.ring != other.ring or self.ranks != other.ranks:
            return False
        return all(self.d(n) == other.d(n) for n in self.degrees)

    def __repr__(self):
        ranks = ", ".join(f"{n}:{r}" for n, r in sorted(self.ranks.items()))
        return f"Complex({{{ranks}}})"

    # -- simple transformations -----------------------------------------------

    def negated(self) -> "Complex":
        """Same modules, every differential multiplied by -1."""
        return Complex(self.ring, self.ranks, {n: neg(M) for n, M in self.diffs.items()}, check=False)

    def shift(self, i: int) -> "Complex":
        s = _sign(i)
        diffs = {n - i: (M if s == 1 else neg(M)) for n, M in self.diffs.items()}
        return Complex(self.ring, {n - i: r for n, r in self.ranks.items()}, diffs, check=False)

    def direct_sum(self, other: "Complex") -> "Complex":
        _same_ring(self, other)
        ranks = {n: self.rank(n) + other.rank(n) for n in set(self.ranks) | set(other.ranks)}
        diffs = {}
        for n in ranks:
            a, b = self.d(n), other.d(n)
            rows_a, rows_b = self.rank(n + 1), other.rank(n + 1)
            ca, cb = self.rank(n), other.rank(n)
            M = zeros(self.ring, rows_a + rows_b, ca + cb)
            for i in range(rows_a):
                for j in range(ca):
                    M[i][j] = a[i][j]
            for i in range(rows_b):
                for j in range(cb):
                    M[rows_a + i][ca + j] = b[i][j]
            diffs[n] = M
        return Complex(self.ring, ranks, diffs, check=False)


def module_complex(ring: RingPresentation, rank: int = 1, degree: int = 0) -> Complex:
    """The free module R^rank placed in a single degree."""
    return Complex(ring, {degree: rank})


def two_term(ring: RingPresentation, matrix: Sequence[Sequence], start: int = 0) -> Complex:
    """[R^a -> R^b] in degrees start, start+1."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    return Complex(ring, {start: cols, start + 1: rows}, {start: matrix})


def _same_ring(A: Complex, B: Complex) -> None:
    if A.ring != B.ring:
        raise ComplexError("complexes over different rings")


class ChainMap:
    """Degreewise matrices f^n : source^n -> target^n commuting with d."""

    def __init__(self, source: Complex, target: Complex, maps: dict, check: bool = True):
        _same_ring(source, target)
        self.source = source
        self.target = target
        ring = source.ring
        self.maps = {}
        for n in set(source.ranks) | set(target.ranks):
            M = maps.get(n)
            rows, cols = target.rank(n), source.rank(n)
            if M is None:
                M = zeros(ring, rows, cols)
            if len(M) != rows or any(len(r) != cols for r in M):
                raise ComplexError(f"component {n} should be {rows}x{cols}")
            self.maps[n] = [[ring(x) for x in r] for r in M]
        if check:
            bad = self.failing_degrees()
            if bad:
                raise ComplexError(f"not a chain map in degrees {bad}")

    def component(self, n: int) -> list:
        if n in self.maps:
            return self.maps[n]
        return zeros(self.source.ring, self.target.rank(n), self.source.rank(n))

    def failing_degrees(self) -> list[int]:
        ring = self.source.ring
        bad = []
        degs = sorted(set(self.source.ranks) | set(self.target.ranks))
        for n in degs:
            cols = self.source.rank(n)
            left = matmul(self.target.d(n), self.component(n), ring, cols)
            right = matmul(self.component(n + 1), self.source.d(n), ring, cols)
            if left != right:
                bad.append(n)
        return bad

    def is_isomorphism(self) -> bool:
        from .exact_algebra.linalg import is_invertible
        ring = self.source.ring
        for n in set(self.source.ranks) | set(self.target.ranks):
            if self.source.rank(n) != self.target.rank(n):
                return False
            if self.source.rank(n) and not is_invertible(self.component(n), ring):
                return False
        return True


def identity_map(C: Complex) -> ChainMap:
    return ChainMap(C, C, {n: identity(C.ring, C.rank(n)) for n in C.degrees}, check=False)


# -- Hom and tensor -----------------------------------------------------------------

def hom_blocks(A: Complex, B: Complex, n: int) -> list[tuple[int, int, int, int]]:
    """Blocks (p, rows, cols, offset) of Hom^n(A, B): rows = rank B^{p+n}."""
    out = []
    off = 0
    for p in A.degrees:
        b = B.rank(p + n)
        a = A.rank(p)
        if a and b:
            out.append((p, b, a, off))
            off += a * b
    return out


def hom_complex(A: Complex, B: Complex) -> Complex:
    _same_ring(A, B)
    ring = A.ring
    if A.is_zero() or B.is_zero():
        return Complex(ring, {})
    lo, hi = B.lo - A.hi, B.hi - A.lo
    blocks = {n: hom_blocks(A, B, n) for n in range(lo, hi + 2)}
    ranks = {n: sum(r * c for _, r, c, _ in blocks[n]) for n in range(lo, hi + 1)}
    diffs = {}
    for n in range(lo, hi):
        src = {p: (r, c, o) for p, r, c, o in blocks[n]}
        tgt = {p: (r, c, o) for p, r, c, o in blocks[n + 1]}
        M = zeros(ring, ranks.get(n + 1, 0), ranks.get(n, 0))
        s = _sign(n)
        for p, (b, a, o) in src.items():
            # d_B o f_p lands in block p of degree n+1
            if p in tgt:
                tb, ta, to = tgt[p]
                dB = B.d(p + n)
                for k in range(b):
                    for j in range(a):
                        col = o + k * a + j
                        for i in range(tb):
                            x = dB[i][k]
                            if x:
                                M[to + i * ta + j][col] = M[to + i * ta + j][col] + x
            # -(-1)^n f_p o d_A^{p-1} lands in block p-1 of degree n+1
            if p - 1 in tgt:
                tb, ta, to = tgt[p - 1]
                dA = A.d(p - 1)
                for i in range(b):
                    for k in range(a):
                        col = o + i * a + k
                        for j in range(ta):
                            x = dA[k][j]
                            if x:
                                row = to + i * ta + j
                                M[row][col] = M[row][col] - x * s
        diffs[n] = M
    return Complex(ring, ranks, diffs)


def tensor_blocks(A: Complex, B: Complex, n: int) -> list[tuple[int, int, int, int]]:
    """Blocks (p, rank A^p, rank B^{n-p}, offset) of (A (x) B)^n."""
    out = []
    off = 0
    for p in A.degrees:
        a, b = A.rank(p), B.rank(n - p)
        if a and b:
            out.append((p, a, b, off))
            off += a * b
    return out


def tensor_complex(A: Complex, B: Complex) -> Complex:
    _same_ring(A, B)
    ring = A.ring
    if A.is_zero() or B.is_zero():
        return Complex(ring, {})
    lo, hi = A.lo + B.lo, A.hi + B.hi
    blocks = {n: tensor_blocks(A, B, n) for n in range(lo, hi + 2)}
    ranks = {n: sum(a * b for _, a, b, _ in blocks[n]) for n in range(lo, hi + 1)}
    diffs = {}
    for n in range(lo, hi):
        tgt = {p: (a, b, o) for p, a, b, o in blocks[n + 1]}
        M = zeros(ring, ranks.get(n + 1, 0), ranks.get(n, 0))
        for p, a, b, o in blocks[n]:
            if p + 1 in tgt:
                ta, tb, to = tgt[p + 1]
                dA = A.d(p)
                for i in range(a):
                    for j in range(b):
                        for k in range(ta):
                            x = dA[k][i]
                            if x:
                                M[to + k * tb + j][o + i * b + j] = x
            if p in tgt:
                ta, tb, to = tgt[p]
                dB = B.d(n - p)
                s = _sign(p)
                for i in range(a):
                    for j in range(b):
                        for k in range(tb):
                            x = dB[k][j]
                            if x:
                                M[to + i * tb + k][o + i * b + j] = x * s
        diffs[n] = M
    return Complex(ring, ranks, diffs)


def shift_and_theta(A: Complex, B: Complex, i: int, j: int) -> ChainMap:
    """theta_ij : A[i] (x) B[j] -> (A (x) B)[i+j], verified to be a chain map."""
    source = tensor_complex(A.shift(i), B.shift(j))
    target = tensor_complex(A, B).shift(i + j)
    ring = A.ring
    maps = {}
    for n in source.degrees:
        M = zeros(ring, target.rank(n), source.rank(n))
        for p, a, b, o in tensor_blocks(A.shift(i), B.shift(j), n):
            s = ring.one if _sign(p * j) == 1 else -ring.one
            for k in range(a * b):
                M[o + k][o + k] = s
        maps[n] = M
    return ChainMap(source, target, maps)


def theta_sign(p: int, j: int) -> int:
    """Sign of theta_ij on the component A[i]^p (x) B[j]^q."""
    return _sign(p * j)


def tensor_hom_map(M: Complex, P: Complex) -> ChainMap:
    """M (x) Hom(P, R) -> Hom(P, M), m (x) f -> m f; no auxiliary signs."""
    R0 = module_complex(P.ring)
    source = tensor_complex(M, hom_complex(P, R0))
    target = hom_complex(P, M)
    maps = {n: identity(P.ring, source.rank(n)) for n in source.degrees}
    return ChainMap(source, target, maps)


# -- cohomology ------------------------------------------------------------------------

def kernel_generators(matrix: Sequence[Sequence[Poly]], ring: RingPresentation, ncols: int) -> list[tuple]:
    from .exact_algebra.modules import unit_vector
    if not matrix or is_zero_matrix(matrix):
        return [unit_vector(ring, ncols, i) for i in range(ncols)]
    return syzygy_module(matrix_columns(matrix), ring)


def cohomology(C: Complex, n: int) -> ModulePresentation:
    """H^n(C) = ker d^n / im d^{n-1}, presented on the kernel generators."""
    ring = C.ring
    rank = C.rank(n)
    if rank == 0:
        return ModulePresentation(ring, 0, [], [])
    gens = kernel_generators(C.d(n), ring, rank)
    if not gens:
        return ModulePresentation(ring, 0, [], [])
    relations = list(syzygy_module(gens, ring))
    for col in matrix_columns(C.d(n - 1)):
        if all(x.is_zero() for x in col):
            continue
        cof = lift(col, gens, ring)
        if cof is None:
            raise ComplexError(f"image of d^{n - 1} is not inside ker d^{n}")
        relations.append(tuple(cof))
    return ModulePresentation(ring, len(gens), relations, gens)


# -- Koszul complexes ----------------------------------------------------------------

def wedge_basis(r: int, p: int) -> list[tuple[int, ...]]:
    return list(combinations(range(r), p))


def wedge_sign(i: int, J: Iterable[int]) -> int:
    """Sign of e_i ^ e_J written in sorted order."""
    return _sign(sum(1 for j in J if j < i))


def koszul_complex(t: Sequence[Poly], ring: RingPresentation) -> Complex:
    """Cohomological Koszul complex: K^p = wedge^p R^r, d(e_J) = sum t_i e_i ^ e_J."""
    t = [ring(x) for x in t]
    r = len(t)
    ranks = {p: len(wedge_basis(r, p)) for p in range(r + 1)}
    diffs = {}
    for p in range(r):
        src = wedge_basis(r, p)
        tgt = {J: k for k, J in enumerate(wedge_basis(r, p + 1))}
        M = zeros(ring, len(tgt), len(src))
        for col, J in enumerate(src):
            for i in range(r):
                if i in J:
                    continue
                row = tgt[tuple(sorted(J + (i,)))]
                M[row][col] = t[i] if wedge_sign(i, J) == 1 else -t[i]
        diffs[p] = M
    return Complex(ring, ranks, diffs)


def koszul_resolution(K: Complex) -> Complex:
    """C with Hom(C, R) = K on the nose: the sign-flipped Hom(K, R)."""
    return hom_complex(K, module_complex(K.ring)).negated()


def contraction_homotopy(t: Sequence[Poly], ring: RingPresentation, i: int) -> dict:
    """Homotopy s on the resolution C with d s + s d = t_i * identity.

    Built from contraction with e_i on K, transposed with the sign that
    turns the K-identity into one on C.  Keys are degrees n of C; the
    value maps C^n -> C^{n-1}.
    """
    r = len(t)
    out = {}
    for p in range(1, r + 1):
        src = wedge_basis(r, p)
        tgt = {J: k for k, J in enumerate(wedge_basis(r, p - 1))}
        H = zeros(ring, len(tgt), len(src))
        for col, J in enumerate(src):
            if i in J:
                rest = tuple(j for j in J if j != i)
                H[tgt[rest]][col] = ring(wedge_sign(i, rest))
        # H : K^p -> K^{p-1}; on C it becomes C^{-p+1} -> C^{-p}
        s = _sign(p)
        out[-p + 1] = [[x * s for x in row] for row in zip(*H)]
        out[-p + 1] = [list(row) for row in out[-p + 1]]
    return out
