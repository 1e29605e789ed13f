"""Koszul complexes at finite level, generalized fractions and the Cech sign.

Local cohomology H^r_I(M) of a finite free module M = R^k is never built
as a whole: a class is a generalized fraction [m; alpha], the class of m in
M / t^alpha M, and everything is compared at a common truncation level.

The Cech comparison runs inside an explicit resolution E of M:

    E^q = sum over |S| = q+1 of M_{t_S}   (q < r),     E^r = H^r_I(M),

whose first r terms are the Cech complex and whose last map sends a
fraction m / t^e in M_{t_1...t_r} to [m; e].  Koszul classes are carried
into H^r_I(M) by a zigzag through Hom(C, E), using the contracting
homotopies of C over each localization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .complexes import (
    Complex,
    cohomology,
    contraction_homotopy,
    hom_complex,
    koszul_complex,
    koszul_resolution,
    module_complex,
    shift_and_theta,
    tensor_complex,
)
from .exact_algebra import linalg as la
from .exact_algebra.modules import ModulePresentation
from .exact_algebra.polynomials import Poly
from .exact_algebra.rings import (
    AlgebraError,
    Ideal,
    RegularityResult,
    RingMap,
    RingPresentation,
    base_change_ring,
    colon_and_regularity,
    zero_ideal,
)


class RegularityError(AlgebraError):
    """The sequence is not regular; `result` carries the witness."""

    def __init__(self, message: str, result: RegularityResult):
        super().__init__(message)
        self.result = result


class ZeroDivisorError(AlgebraError):
    pass


def _check_alpha(alpha: Sequence[int], r: int) -> tuple[int, ...]:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != r:
        raise AlgebraError(f"exponent vector {alpha} has length {len(alpha)}, expected {r}")
    if any(a < 1 for a in alpha):
        raise AlgebraError(f"exponents must be positive, got {alpha}")
    return alpha


def powers(t: Sequence[Poly], alpha: Sequence[int]) -> list[Poly]:
    return [ti ** a for ti, a in zip(t, alpha)]


def monomial_in_t(t: Sequence[Poly], exps: Sequence[int], ring: RingPresentation) -> Poly:
    out = ring.one
    for ti, e in zip(t, exps):
        if e:
            out = out * ti ** e
    return out


def require_regular(seq: Sequence[Poly], ring: RingPresentation) -> None:
    res = colon_and_regularity(seq, ring)
    if not res:
        raise RegularityError(
            f"sequence is not regular: element {res.index} is a zero divisor modulo the "
            f"previous ones (witness {res.witness})", res)


# -- Koszul data ---------------------------------------------------------------------

@dataclass
class KoszulData:
    ring: RingPresentation
    t: tuple
    alpha: tuple
    seq: tuple  # t^alpha
    K: Complex
    C: Complex
    B: RingPresentation  # R / t^alpha R

    @property
    def r(self) -> int:
        return len(self.t)


def koszul_pair(t: Sequence, alpha: Sequence[int], ring: RingPresentation,
                verify: bool = True) -> KoszulData:
    """K(t^alpha, R) and the resolution C of B_alpha with Hom(C, R) = K."""
    t = tuple(ring(x) for x in t)
    if not t:
        raise AlgebraError("empty sequence")
    alpha = _check_alpha(alpha, len(t))
    seq = tuple(powers(t, alpha))
    require_regular(seq, ring)
    K = koszul_complex(seq, ring)
    C = koszul_resolution(K)
    B = Ideal(ring, seq).quotient_ring()
    kd = KoszulData(ring, t, alpha, seq, K, C, B)
    if verify:
        verify_resolution(kd)
    return kd


def verify_resolution(kd: KoszulData) -> None:
    """H^n(C) = 0 for n < 0 and H^0(C) = R / t^alpha R."""
    for n in range(-kd.r, 0):
        if not cohomology(kd.C, n).is_zero():
            raise AlgebraError(f"C is not acyclic in degree {n}")
    H0 = cohomology(kd.C, 0)
    rels = [v[0] for v in H0.relations if not v[0].is_zero()]
    if H0.rank != 1 or Ideal(kd.ring, rels or [kd.ring.zero]) != Ideal(kd.ring, kd.seq):
        raise AlgebraError("H^0(C) is not R / t^alpha R")


def alpha_string(t: Sequence[Poly], alpha: Sequence[int]) -> str:
    parts = []
    for ti, a in zip(t, alpha):
        s = str(ti)
        if a == 1:
            parts.append(s)
        else:
            parts.append(f"({s})^{a}" if len(ti.terms) > 1 else f"{s}^{a}")
    return "(" + ", ".join(parts) + ")"


# -- normal classes ---------------------------------------------------------------------

class NormalClass:
    """b * 1/(t^alpha) in N_alpha, the rank-one free B_alpha-module."""

    def __init__(self, kd: KoszulData, coeff):
        self.kd = kd
        self.coeff = kd.B(coeff)

    @classmethod
    def generator(cls, kd: KoszulData) -> "NormalClass":
        return cls(kd, 1)

    def transition(self, alpha2: Sequence[int]) -> "NormalClass":
        """N_alpha -> N_alpha' multiplying by t^(alpha' - alpha)."""
        alpha2 = _check_alpha(alpha2, self.kd.r)
        beta = [b - a for a, b in zip(self.kd.alpha, alpha2)]
        if any(x < 0 for x in beta):
            raise AlgebraError(f"transition needs {self.kd.alpha} <= {alpha2} componentwise")
        kd2 = koszul_pair(self.kd.t, alpha2, self.kd.ring, verify=False)
        lifted = self.kd.ring.poly(self.coeff.terms)
        return NormalClass(kd2, lifted * monomial_in_t(self.kd.t, beta, self.kd.ring))

    def __eq__(self, other):
        if not isinstance(other, NormalClass):
            return NotImplemented
        return self.kd.alpha == other.kd.alpha and self.coeff == other.coeff

    def __str__(self):
        den = alpha_string(self.kd.t, self.kd.alpha)
        return f"{self.coeff}/{den}"

    __repr__ = __str__


@dataclass
class TopKoszulIso:
    """H^r(K) -> N_alpha on the kernel generators of H^r(K)."""
    kd: KoszulData
    H: ModulePresentation
    matrix: list

    def apply(self, vec: Sequence[Poly]) -> NormalClass:
        coeffs = self.H.class_of(vec)
        total = sum((c * m for c, m in zip(coeffs, self.matrix[0])), self.kd.ring.zero)
        return NormalClass(self.kd, total)


def top_koszul_to_normal(kd: KoszulData) -> TopKoszulIso:
    """Sends the class of 1 in K^r = R to the generator 1/(t^alpha).

    Both sides are cyclic with annihilator t^alpha R; this is checked on the
    presentation of H^r(K) before the 1x1 matrix is returned.
    """
    H = cohomology(kd.K, kd.r)
    rels = [v[0] for v in H.relations if not v[0].is_zero()]
    if H.rank != 1 or Ideal(kd.ring, rels or [kd.ring.zero]) != Ideal(kd.ring, kd.seq):
        raise AlgebraError("H^r(K) is not presented as R / t^alpha R")
    return TopKoszulIso(kd, H, [[kd.ring.one]])


# -- generalized fractions ------------------------------------------------------------------

class LocalCohomology:
    """H^r_I(M) for M = R^rank and I generated by the regular sequence t."""

    def __init__(self, ring: RingPresentation, t: Sequence, rank: int = 1, check: bool = True):
        self.ring = ring
        self.t = tuple(ring(x) for x in t)
        if not self.t:
            raise AlgebraError("empty sequence")
        self.rank = rank
        if check:
            require_regular(self.t, ring)
        self._ideals: dict = {}
        self._sat: dict = {}

    @property
    def r(self) -> int:
        return len(self.t)

    def ideal(self, alpha: Sequence[int]) -> Ideal:
        alpha = tuple(alpha)
        if alpha not in self._ideals:
            self._ideals[alpha] = Ideal(self.ring, powers(self.t, alpha))
        return self._ideals[alpha]

    def truncation(self, alpha: Sequence[int]) -> RingPresentation:
        """B_alpha = R / t^alpha R."""
        return self.ideal(_check_alpha(alpha, self.r)).quotient_ring()

    def fraction(self, numerator, alpha: Sequence[int]) -> "GeneralizedFraction":
        if isinstance(numerator, (Poly, str, int)):
            numerator = (numerator,)
        return GeneralizedFraction(self, numerator, alpha)

    def zero(self) -> "GeneralizedFraction":
        return self.fraction(tuple(self.ring.zero for _ in range(self.rank)), (1,) * self.r)

    def same_as(self, other: "LocalCohomology") -> bool:
        return self.ring == other.ring and self.t == other.t and self.rank == other.rank

    def basis(self, alpha: Sequence[int]) -> list["GeneralizedFraction"]:
        """Fractions [b e_i; alpha] for b in the free basis of B_alpha, i-major."""
        B = self.truncation(alpha)
        out = []
        for i in range(self.rank):
            for b in B.basis_elements():
                num = [self.ring.zero] * self.rank
                num[i] = self.ring.poly(b.terms)
                out.append(self.fraction(tuple(num), alpha))
        return out

    def coordinates(self, frac: "GeneralizedFraction", alpha: Sequence[int]) -> list[Poly]:
        """Coordinates over the base ring of `frac` in `basis(alpha)`."""
        f = frac.lift_to(alpha)
        B = self.truncation(alpha)
        out = []
        for p in f.numerator:
            out.extend(B.coordinates(B(p)))
        return out

    def __repr__(self):
        return f"H^{self.r}_({', '.join(map(str, self.t))})(R^{self.rank})"


class GeneralizedFraction:
    """[m; t^alpha], stored with m reduced modulo t^alpha M."""

    __slots__ = ("lc", "numerator", "alpha")

    def __init__(self, lc: LocalCohomology, numerator: Sequence, alpha: Sequence[int]):
        ring = lc.ring
        num = [ring(x) for x in numerator]
        if len(num) != lc.rank:
            raise AlgebraError(f"numerator has {len(num)} components, module has rank {lc.rank}")
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != lc.r:
            raise AlgebraError(f"exponent vector {alpha} has length {len(alpha)}, expected {lc.r}")
        if any(a < 0 for a in alpha):
            raise AlgebraError("negative exponents")
        if any(a == 0 for a in alpha):
            # t^0 = 1 kills everything at that level; move to level >= 1
            bump = [1 if a == 0 else 0 for a in alpha]
            u = monomial_in_t(lc.t, bump, ring)
            num = [x * u for x in num]
            alpha = tuple(max(a, 1) for a in alpha)
        ideal = lc.ideal(alpha)
        self.lc = lc
        self.numerator = tuple(ideal.normal_form(x) for x in num)
        self.alpha = alpha

    def lift_to(self, alpha2: Sequence[int]) -> "GeneralizedFraction":
        """The same class written at the finer level alpha2 >= alpha."""
        alpha2 = tuple(alpha2)
        beta = [b - a for a, b in zip(self.alpha, alpha2)]
        if any(x < 0 for x in beta):
            raise AlgebraError(f"cannot move from level {self.alpha} to {alpha2}")
        u = monomial_in_t(self.lc.t, beta, self.lc.ring)
        return GeneralizedFraction(self.lc, [x * u for x in self.numerator], alpha2)

    transition = lift_to

    def _common(self, other: "GeneralizedFraction"):
        if not self.lc.same_as(other.lc):
            raise AlgebraError("fractions live in different local cohomology modules")
        top = tuple(max(a, b) for a, b in zip(self.alpha, other.alpha))
        return self.lift_to(top), other.lift_to(top)

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.numerator)

    def __eq__(self, other):
        if not isinstance(other, GeneralizedFraction):
            return NotImplemented
        a, b = self._common(other)
        return a.numerator == b.numerator

    def __hash__(self):
        return hash((self.lc.rank, self.lc.r))

    def __add__(self, other):
        a, b = self._common(other)
        return GeneralizedFraction(self.lc, [x + y for x, y in zip(a.numerator, b.numerator)], a.alpha)

    def __neg__(self):
        return GeneralizedFraction(self.lc, [-x for x in self.numerator], self.alpha)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, rho):
        rho = self.lc.ring(rho) if not isinstance(rho, int) else rho
        return GeneralizedFraction(self.lc, [x * rho for x in self.numerator], self.alpha)

    __rmul__ = __mul__

    def __str__(self):
        if self.lc.rank == 1:
            num = str(self.numerator[0])
        else:
            num = "(" + ", ".join(map(str, self.numerator)) + ")"
        return f"[{num}; {alpha_string(self.lc.t, self.alpha)}]"

    __repr__ = __str__


def truncation_iso_check(matrix: list, ring: RingPresentation) -> bool:
    """A square matrix over a base ring with unit determinant."""
    m, n = la.shape(matrix)
    return m == n and (m == 0 or la.is_invertible(matrix, ring))


# -- structural isomorphisms --------------------------------------------------------------

class LCTensorIso:
    """H^r_I(R) (x) R^k -> H^r_I(R^k), [rho; alpha] (x) e_i -> [rho e_i; alpha]."""

    def __init__(self, lc: LocalCohomology, rank: int):
        if lc.rank != 1:
            raise AlgebraError("the source must be local cohomology of R itself")
        if not isinstance(rank, int) or rank < 1:
            raise AlgebraError("only finite free modules R^k (k >= 1) are supported")
        self.source = lc
        self.target = LocalCohomology(lc.ring, lc.t, rank, check=False)
        self.rank = rank

    def __call__(self, frac: GeneralizedFraction, i: int) -> GeneralizedFraction:
        num = [self.source.ring.zero] * self.rank
        num[i] = frac.numerator[0]
        return self.target.fraction(tuple(num), frac.alpha)

    def truncation_matrix(self, alpha: Sequence[int]) -> list:
        """Matrix over the base ring on basis (b (x) e_i), i-major."""
        cols = []
        for i in range(self.rank):
            for f in self.source.basis(alpha):
                cols.append(self.target.coordinates(self(f, i), alpha))
        return la.transpose(cols)

    def is_bijective(self, alpha: Sequence[int]) -> bool:
        return truncation_iso_check(self.truncation_matrix(alpha), self.source.ring.base_ring)


def lc_tensor_iso(lc: LocalCohomology, rank: int) -> LCTensorIso:
    return LCTensorIso(lc, rank)


class LCBaseChange:
    """H^r_I(M) (x)_A A' -> H^r_{IR'}(M (x)_A A'), [m; alpha] -> [g(m); alpha]."""

    def __init__(self, lc: LocalCohomology, g: RingMap):
        ring2, phi = base_change_ring(lc.ring, g)
        t2 = [phi(x) for x in lc.t]
        require_regular(t2, ring2)
        self.source = lc
        self.g = g
        self.phi = phi
        self.target = LocalCohomology(ring2, t2, lc.rank, check=False)

    def __call__(self, frac: GeneralizedFraction) -> GeneralizedFraction:
        if not frac.lc.same_as(self.source):
            raise AlgebraError("fraction does not live in the source module")
        return self.target.fraction(tuple(self.phi(x) for x in frac.numerator), frac.alpha)

    def truncation_matrix(self, alpha: Sequence[int]) -> list:
        """Matrix over A' from the A-basis of M/t^alpha M (pushed along g)."""
        cols = [self.target.coordinates(self(f), alpha) for f in self.source.basis(alpha)]
        return la.transpose(cols)

    def is_bijective(self, alpha: Sequence[int]) -> bool:
        return truncation_iso_check(self.truncation_matrix(alpha), self.target.ring.base_ring)


def lc_base_change(frac: GeneralizedFraction, g: RingMap) -> GeneralizedFraction:
    return LCBaseChange(frac.lc, g)(frac)


# -- lim N_alpha -> H^r_I(R) --------------------------------------------------------------

def theta_rr_sign(r: int, ring: RingPresentation) -> int:
    """Sign of theta_{r,r} on R[r] (x) N[r], read off the chain map itself."""
    R0 = module_complex(ring)
    th = shift_and_theta(R0, R0, r, r)
    c = th.component(-2 * r)[0][0]
    return 1 if c == ring.one else -1


class NLimitIso:
    """N_alpha -> H^r_I(R) at level alpha: b/(t^alpha) -> sign * [b; alpha]."""

    def __init__(self, lc: LocalCohomology):
        if lc.rank != 1:
            raise AlgebraError("N_alpha maps into H^r_I(R) (rank one)")
        self.lc = lc
        self.sign = theta_rr_sign(lc.r, lc.ring)

    def __call__(self, n: NormalClass) -> GeneralizedFraction:
        b = self.lc.ring.poly(n.coeff.terms)
        return self.lc.fraction(b * self.sign, n.kd.alpha)

    def matrix(self, alpha: Sequence[int]) -> list:
        kd = koszul_pair(self.lc.t, alpha, self.lc.ring, verify=False)
        cols = [self.lc.coordinates(self(NormalClass(kd, b)), alpha)
                for b in kd.B.basis_elements()]
        return la.transpose(cols)

    def transition_compatible(self, n: NormalClass, alpha2: Sequence[int]) -> bool:
        return self(n.transition(alpha2)) == self(n)


def n_limit_iso(lc: LocalCohomology) -> NLimitIso:
    return NLimitIso(lc)


# -- Ext via Koszul and the fundamental local isomorphism ---------------------------------

@dataclass
class ExtResult:
    degree: int
    module: ModulePresentation
    flim_matrix: list | None = None  # field matrix, top degree only
    source_dimension: int | None = None

    def is_zero(self) -> bool:
        return self.module.is_zero()

    def flim_is_bijective(self) -> bool:
        if self.flim_matrix is None:
            return False
        m, n = la.shape(self.flim_matrix)
        return m == n == self.source_dimension and la.scalar_rank(self.flim_matrix) == n


def ext_via_koszul(kd: KoszulData, rank: int, i: int) -> ExtResult:
    """Ext^i_R(B_alpha, R^rank) as H^i(Hom(C, R^rank)).

    In degree r also returns the matrix of (M / t^alpha M) (x) N_alpha -> Ext^r,
    m (x) b/(t^alpha) -> class of b m in Hom(C^{-r}, M) = M, in field
    coordinates (the base must be a field so both sides are finite).
    """
    ring = kd.ring
    M = module_complex(ring, rank)
    H = hom_complex(kd.C, M)
    mod = cohomology(H, i)
    if i != kd.r:
        return ExtResult(i, mod)
    if ring.base is not None:
        raise AlgebraError("the flim matrix is computed over a field base only")
    basis_B = [ring.poly(b.terms) for b in kd.B.basis_elements()]
    cols = []
    for l in range(rank):
        for b in basis_B:
            vec = [ring.zero] * rank
            vec[l] = b
            cols.append(mod.coordinates(mod.class_of(tuple(vec))))
    matrix = la.transpose(cols) if cols else []
    return ExtResult(i, mod, matrix, rank * len(basis_B))


def koszul_tensor_cohomology(kd: KoszulData, rank: int, i: int) -> ModulePresentation:
    """H^i(K(t^alpha) (x) R^rank)."""
    return cohomology(tensor_complex(kd.K, module_complex(kd.ring, rank)), i)


# -- Cech complex and the sign square --------------------------------------------------------

class Localized:
    """numerator / prod_{i in S} t_i^{exps_i} in M_{t_S}."""

    __slots__ = ("S", "num", "exps")

    def __init__(self, S: tuple, num: tuple, exps: tuple):
        self.S = S
        self.num = num
        self.exps = exps

    def __repr__(self):
        return f"Localized({self.S}, {[str(x) for x in self.num]}, {self.exps})"


class CechModel:
    """The resolution E of M = R^k used for the excision comparison."""

    def __init__(self, lc: LocalCohomology, cap: int = 20):
        self.lc = lc
        self.ring = lc.ring
        self.r = lc.r
        self.cap = cap
        if self.r > 3:
            raise AlgebraError("Cech comparison is implemented for r <= 3")
        for i, ti in enumerate(lc.t):
            if not zero_ideal(self.ring).colon(ti) == zero_ideal(self.ring):
                raise ZeroDivisorError(f"denominator t_{i + 1} = {ti} is a zero divisor")
        self._sat: dict = {}

    def summands(self, q: int) -> list[tuple]:
        return list(combinations(range(self.r), q + 1))

    # localized arithmetic
    def _t_power(self, exps: dict) -> Poly:
        return monomial_in_t(self.lc.t, [exps.get(i, 0) for i in range(self.r)], self.ring)

    def make(self, S: tuple, num: Sequence, exps: dict | None = None) -> Localized:
        exps = exps or {}
        return Localized(S, tuple(self.ring(x) for x in num), tuple(exps.get(i, 0) for i in S))

    def zero_elem(self, S: tuple) -> Localized:
        return self.make(S, [self.ring.zero] * self.lc.rank)

    def add(self, a: Localized, b: Localized) -> Localized:
        e = tuple(max(x, y) for x, y in zip(a.exps, b.exps))
        ua = self._t_power({i: x - y for i, x, y in zip(a.S, e, a.exps)})
        ub = self._t_power({i: x - y for i, x, y in zip(a.S, e, b.exps)})
        num = tuple(p * ua + q * ub for p, q in zip(a.num, b.num))
        return Localized(a.S, num, e)

    def scale(self, a: Localized, c) -> Localized:
        return Localized(a.S, tuple(p * c for p in a.num), a.exps)

    def divide(self, a: Localized, i: int, k: int) -> Localized:
        exps = tuple(e + k if j == i else e for j, e in zip(a.S, a.exps))
        return Localized(a.S, a.num, exps)

    def restrict(self, a: Localized, T: tuple) -> Localized:
        d = dict(zip(a.S, a.exps))
        return Localized(T, a.num, tuple(d.get(i, 0) for i in T))

    def is_zero(self, a: Localized) -> bool:
        if all(p.is_zero() for p in a.num):
            return True
        sat = self._saturation(a.S)
        return all(sat.contains(p) for p in a.num)

    def _saturation(self, S: tuple) -> Ideal:
        if S not in self._sat:
            f = self._t_power({i: 1 for i in S})
            self._sat[S] = zero_ideal(self.ring).saturation(f, self.cap)
        return self._sat[S]

    def equal(self, a: Localized, b: Localized) -> bool:
        return self.is_zero(self.add(a, self.scale(b, -1)))

    # complexes of localized elements: degree q element is a list over summands(q)
    def augmentation(self, m: Sequence) -> list:
        return [self.make(S, m) for S in self.summands(0)]

    def d(self, q: int, c: list) -> list:
        """Cech differential E^q -> E^{q+1} for q + 1 < r."""
        src = dict(zip(self.summands(q), c))
        out = []
        for T in self.summands(q + 1):
            acc = self.zero_elem(T)
            for k in range(len(T)):
                face = T[:k] + T[k + 1:]
                term = self.restrict(src[face], T)
                if k % 2:
                    term = self.scale(term, -1)
                acc = self.add(acc, term)
            out.append(acc)
        return out

    def to_local_cohomology(self, c: list) -> GeneralizedFraction:
        """E^{r-1} -> E^r: m / t^e -> [m; e]."""
        (a,) = c
        exps = [0] * self.r
        for i, e in zip(a.S, a.exps):
            exps[i] = e
        return self.lc.fraction(a.num, exps)

    def d_any(self, q: int, c: list):
        if q == self.r - 1:
            return self.to_local_cohomology(c)
        return self.d(q, c)

    def zero_cochain(self, q: int) -> list:
        return [self.zero_elem(S) for S in self.summands(q)]

    def cochain_add(self, a: list, b: list) -> list:
        return [self.add(x, y) for x, y in zip(a, b)]

    def cochain_scale(self, a: list, c) -> list:
        return [self.scale(x, c) for x in a]

    def cochain_is_zero(self, a: list) -> bool:
        return all(self.is_zero(x) for x in a)

    # the zigzag Hom(C, M) -> Tot Hom(C, E) <- Hom(B_alpha, E^r)
    def koszul_class_to_local(self, m: Sequence, alpha: Sequence[int]) -> GeneralizedFraction:
        """Image in H^r_I(M) of the Koszul class m in H^r(K(t^alpha) (x) M).

        Solves h_{s+1} d_C^s = (-1)^{r-1} (target_s + d_E h_s) summand by
        summand with the homotopy of t_i^alpha_i, i the smallest index of
        the summand, so that iota(x) + D(h) is concentrated in Hom(C^0, E^r).
        """
        r = self.r
        alpha = _check_alpha(alpha, r)
        kd = koszul_pair(self.lc.t, alpha, self.ring, verify=False)
        C = kd.C
        seq = kd.seq
        homot = {i: contraction_homotopy(seq, self.ring, i) for i in range(r)}
        sign = -1 if (r - 1) % 2 else 1
        h = None  # h_s as list over the basis of C^s of E^{s+r-1} cochains
        for s in range(-r, 0):
            q = s + r  # w_s takes values in E^q
            if s == -r:
                w = [self.cochain_scale(self.augmentation(m), sign)]
            else:
                w = [self.cochain_scale(self.d(q - 1, hb), sign) for hb in h]
            new_h = []
            summ = self.summands(q)
            for b in range(C.rank(s + 1)):
                cochain = []
                for k, S in enumerate(summ):
                    i = S[0]
                    sigma = homot[i][s + 1]  # C^{s+1} -> C^s
                    acc = self.zero_elem(S)
                    for j in range(C.rank(s)):
                        coef = sigma[j][b]
                        if coef:
                            acc = self.add(acc, self.scale(w[j][k], coef))
                    cochain.append(self.divide(acc, i, alpha[i]))
                new_h.append(cochain)
            self._check_step(C, s, new_h, w)
            h = new_h
        (h0,) = h
        return self.to_local_cohomology(h0)

    def _check_step(self, C: Complex, s: int, h_next: list, w: list) -> None:
        dC = C.d(s)
        for j in range(C.rank(s)):
            acc = self.zero_cochain(s + self.r)
            for b in range(C.rank(s + 1)):
                if dC[b][j]:
                    acc = self.cochain_add(acc, self.cochain_scale(h_next[b], dC[b][j]))
            diff = self.cochain_add(acc, self.cochain_scale(w[j], -1))
            if not self.cochain_is_zero(diff):
                raise AlgebraError(f"homotopy step failed at degree {s}")


@dataclass
class CechReport:
    cech_class: str
    connecting: GeneralizedFraction
    via_phi: GeneralizedFraction
    factor: int
    commutes: bool
    detail: dict = field(default_factory=dict)


def phi(cech_num: Sequence, level: Sequence[int]):
    """Cech top class m / t^level -> Koszul class m at that level of K_infinity."""
    return tuple(cech_num), tuple(level)


def cech_comparison(lc: LocalCohomology, numerator, level: Sequence[int],
                    factor: int | None = None, model: CechModel | None = None) -> CechReport:
    """Compare the excision connecting map with factor * (bottom iso o phi).

    `factor` defaults to (-1)^r; pass +1 for the negative control.
    """
    model = model or CechModel(lc)
    r = lc.r
    if factor is None:
        factor = -1 if r % 2 else 1
    if isinstance(numerator, (Poly, str, int)):
        numerator = (numerator,)
    num = tuple(lc.ring(x) for x in numerator)
    level = tuple(int(a) for a in level)
    if len(level) != r or any(a < 0 for a in level):
        raise AlgebraError(f"bad level {level}")
    c = [model.make(tuple(range(r)), num, dict(enumerate(level)))]
    connecting = model.to_local_cohomology(c)
    m, alpha = phi(num, tuple(max(a, 1) for a in level))
    if alpha != level:
        bump = [1 if a == 0 else 0 for a in level]
        u = monomial_in_t(lc.t, bump, lc.ring)
        m = tuple(x * u for x in m)
    via = model.koszul_class_to_local(m, alpha)
    commutes = connecting == via * factor
    label = f"({', '.join(map(str, num))})/t^{list(level)}"
    return CechReport(label, connecting, via, factor, commutes)


def koszul_cech_identification(lc: LocalCohomology, alpha: Sequence[int],
                               model: CechModel | None = None) -> bool:
    """Check delta^p = d^{p-1} on basis elements e_J m of K(t^alpha) (x) M.

    e_J m at level alpha is sent to m / t_J^{alpha_J} in M_{t_J} (and e_empty m
    to m itself, mapped by the augmentation).
    """
    model = model or CechModel(lc)
    r = lc.r
    alpha = _check_alpha(alpha, r)
    kd = koszul_pair(lc.t, alpha, lc.ring, verify=False)
    K = kd.K
    ring = lc.ring

    def embed(p: int, vec: Sequence[Poly], l: int) -> list:
        cochain = []
        for k, J in enumerate(combinations(range(r), p)):
            num = [ring.zero] * lc.rank
            num[l] = vec[k]
            cochain.append(model.make(J, num, {i: alpha[i] for i in J}))
        return cochain

    for l in range(lc.rank):
        for p in range(1, r):
            for j in range(K.rank(p)):
                vec = [ring.one if k == j else ring.zero for k in range(K.rank(p))]
                image = la.matvec(K.d(p), vec, ring)
                lhs = embed(p + 1, image, l)
                rhs = model.d(p - 1, embed(p, vec, l))
                if not model.cochain_is_zero(model.cochain_add(lhs, model.cochain_scale(rhs, -1))):
                    return False
        # degree 0: K^0 (x) M = M maps to E^0 by the augmentation
        num = [ring.zero] * lc.rank
        num[l] = ring.one
        lhs = embed(1, la.matvec(K.d(0), [ring.one], ring), l)
        rhs = model.augmentation(num)
        if r > 0 and not model.cochain_is_zero(model.cochain_add(lhs, model.cochain_scale(rhs, -1))):
            return False
    return True
