"""Dense matrices over a field or over a ring presentation.

Matrices are lists of rows.  Over the bare field (a presentation with no
variables) everything goes through Gaussian elimination on scalars; over
other rings determinants and adjugates use Berkowitz's division-free
algorithm, and invertibility means the determinant is a unit.
"""

from __future__ import annotations

from typing import Sequence

from .polynomials import Poly
from .rings import AlgebraError, RingPresentation

Matrix = list


def shape(M: Sequence[Sequence]) -> tuple[int, int]:
    return len(M), (len(M[0]) if M else 0)


def identity(ring: RingPresentation, n: int) -> Matrix:
    return [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]


def zeros(ring: RingPresentation, m: int, n: int) -> Matrix:
    return [[ring.zero for _ in range(n)] for _ in range(m)]


def transpose(M: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*M)] if M else []


def matmul(A: Sequence[Sequence], B: Sequence[Sequence], ring: RingPresentation,
           cols: int | None = None) -> Matrix:
    """A*B; pass `cols` when B may have no rows (inner dimension zero)."""
    m, k = shape(A)
    if m == 0:
        return []
    k2, n = shape(B)
    if k == 0 and (k2 == 0 or not B):
        return zeros(ring, m, cols if cols is not None else n)
    if k != k2:
        raise AlgebraError(f"cannot multiply {m}x{k} by {k2}x{n}")
    out = []
    for i in range(m):
        row = []
        for j in range(n):
            acc = ring.zero
            for t in range(k):
                a = A[i][t]
                if a:
                    b = B[t][j]
                    if b:
                        acc = acc + a * b
            row.append(acc)
        out.append(row)
    return out


def matvec(A: Sequence[Sequence], v: Sequence, ring: RingPresentation) -> list:
    return [sum((a * x for a, x in zip(row, v) if a and x), ring.zero) for row in A]


def scale(M: Sequence[Sequence], c) -> Matrix:
    return [[x * c for x in row] for row in M]


def neg(M: Sequence[Sequence]) -> Matrix:
    return [[-x for x in row] for row in M]


def apply_entrywise(M: Sequence[Sequence], f) -> Matrix:
    return [[f(x) for x in row] for row in M]


def is_zero_matrix(M: Sequence[Sequence]) -> bool:
    return all(not x for row in M for x in row)


# -- scalar Gaussian elimination ------------------------------------------------

def _echelon(M: Sequence[Sequence]) -> tuple[list, list]:
    A = [list(r) for r in M]
    m, n = shape(A)
    pivots = []
    row = 0
    for col in range(n):
        piv = next((i for i in range(row, m) if A[i][col]), None)
        if piv is None:
            continue
        A[row], A[piv] = A[piv], A[row]
        inv = 1 / A[row][col]
        A[row] = [x * inv for x in A[row]]
        for i in range(m):
            if i != row and A[i][col]:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    return A, pivots


def scalar_rank(M: Sequence[Sequence]) -> int:
    if not M or not M[0]:
        return 0
    return len(_echelon(M)[1])


def scalar_det(M: Sequence[Sequence], one):
    A = [list(r) for r in M]
    n = len(A)
    det = one
    for col in range(n):
        piv = next((i for i in range(col, n) if A[i][col]), None)
        if piv is None:
            return one - one
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            det = -det
        p = A[col][col]
        det = det * p
        for i in range(col + 1, n):
            if A[i][col]:
                f = A[i][col] / p
                A[i] = [x - f * y for x, y in zip(A[i], A[col])]
    return det


def scalar_inverse(M: Sequence[Sequence], one) -> Matrix:
    n = len(M)
    zero = one - one
    aug = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(M)]
    E, pivots = _echelon(aug)
    if pivots[:n] != list(range(n)):
        raise AlgebraError("matrix is singular")
    return [row[n:] for row in E[:n]]


def scalar_kernel(M: Sequence[Sequence], one) -> list[list]:
    """Basis of the right kernel."""
    m, n = shape(M)
    zero = one - one
    if m == 0:
        return [[one if i == j else zero for i in range(n)] for j in range(n)]
    E, pivots = _echelon(M)
    free = [c for c in range(n) if c not in pivots]
    out = []
    for f in free:
        v = [zero] * n
        v[f] = one
        for r, p in enumerate(pivots):
            v[p] = -E[r][f]
        out.append(v)
    return out


# -- ring-level operations ----------------------------------------------------------

def _constants(M: Sequence[Sequence[Poly]]) -> list:
    return [[x.constant() for x in row] for row in M]


def charpoly(M: Sequence[Sequence[Poly]], ring: RingPresentation) -> list[Poly]:
    """Coefficients of det(lambda*I - M), highest degree first (Berkowitz)."""
    n = len(M)
    p = [ring.one]
    for i in range(n - 1, -1, -1):
        a = M[i][i]
        R = M[i][i + 1:]
        S = [M[k][i] for k in range(i + 1, n)]
        A1 = [row[i + 1:] for row in M[i + 1:]]
        col = [ring.one, -a]
        v = S
        for _ in range(n - i - 1):
            col.append(-sum((r * x for r, x in zip(R, v) if r and x), ring.zero))
            v = matvec(A1, v, ring)
        newp = []
        for r in range(len(p) + 1):
            acc = ring.zero
            for j in range(min(r, len(p) - 1) + 1):
                if col[r - j] and p[j]:
                    acc = acc + col[r - j] * p[j]
            newp.append(acc)
        p = newp
    return p


def det(M: Sequence[Sequence[Poly]], ring: RingPresentation) -> Poly:
    n = len(M)
    if n == 0:
        return ring.one
    if ring.nvars == 0:
        return ring(scalar_det(_constants(M), ring.field.one))
    c = charpoly(M, ring)[n]
    return c if n % 2 == 0 else -c


def adjugate(M: Sequence[Sequence[Poly]], ring: RingPresentation) -> Matrix:
    n = len(M)
    c = charpoly(M, ring)
    acc = identity(ring, n)
    for k in range(1, n):
        acc = matmul(M, acc, ring)
        for i in range(n):
            acc[i][i] = acc[i][i] + c[k]
    return acc if (n - 1) % 2 == 0 else neg(acc)


def is_invertible(M: Sequence[Sequence[Poly]], ring: RingPresentation) -> bool:
    m, n = shape(M)
    if m != n:
        return False
    return ring.is_unit(det(M, ring))


def inverse(M: Sequence[Sequence[Poly]], ring: RingPresentation) -> Matrix:
    m, n = shape(M)
    if m != n:
        raise AlgebraError("only square matrices can be inverted")
    if ring.nvars == 0:
        inv = scalar_inverse(_constants(M), ring.field.one)
        return [[ring(x) for x in row] for row in inv]
    d = det(M, ring)
    if not ring.is_unit(d):
        raise AlgebraError(f"determinant {d} is not a unit")
    dinv = ring.inverse(d)
    return [[x * dinv for x in row] for row in adjugate(M, ring)]


def regular_representation(M: Sequence[Sequence[Poly]], ring: RingPresentation) -> list[list]:
    """Expand a matrix over a finite-dimensional k-algebra into a k-matrix.

    Each entry a becomes the block of multiplication by a in the algebra's
    monomial basis; invertibility over the algebra is full rank here.
    """
    basis = ring.basis_elements()
    d = len(basis)
    m, n = shape(M)
    out = [[ring.field.zero] * (n * d) for _ in range(m * d)]
    for i in range(m):
        for j in range(n):
            a = M[i][j]
            if not a:
                continue
            for col, b in enumerate(basis):
                coords = ring.coordinates(a * b)
                for row, c in enumerate(coords):
                    out[i * d + row][j * d + col] = c.constant()
    return out
