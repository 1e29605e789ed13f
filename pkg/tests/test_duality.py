from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from dualis.duality import (
    DualityError,
    FiniteFlatAlgebra,
    ResidueContext,
    local_duality_truncated,
    omega_finite,
    omega_smooth_or_ci,
    r_z_and_integral,
    r_z_sign,
    residue_base_change,
    residue_pair_theta,
    residue_symbol,
    theta_base_change,
    theta_rescale_check,
    theta_transitivity,
    trace_oracle,
    verdier_check,
    verdier_check_etale,
)
from dualis.exact_algebra import GF, QQ, RingMap, field_ring, polynomial_ring, quotient_ring
from dualis.exact_algebra import linalg as la

X, Y = sympy.symbols("x y")
K = field_ring(QQ)


def univariate_residue_oracle(g: str, s: str) -> Fraction:
    """Sum of the residues of g/s: coefficient of x^(n-1) in (g mod s) over lc(s)."""
    gs = sympy.Poly(sympy.sympify(g.replace("^", "**")), X)
    ss = sympy.Poly(sympy.sympify(s.replace("^", "**")), X)
    rem = gs.rem(ss)
    n = ss.degree()
    c = rem.coeff_monomial(X ** (n - 1)) if n >= 1 else 0
    q = sympy.Rational(c) / sympy.Rational(ss.LC())
    return Fraction(int(q.p), int(q.q))


# -- finite free algebras and the trace oracle --------------------------------------------------

def test_trace_examples():
    alg = FiniteFlatAlgebra(quotient_ring(QQ, "x", ["x^2 - 2"]))
    assert [trace_oracle(alg, alg.ring(f"x^{k}")) for k in range(3)] == [K(2), K(0), K(4)]
    nil = FiniteFlatAlgebra(quotient_ring(QQ, "x", ["x^3"]))
    assert trace_oracle(nil, nil.ring("x")) == K(0)
    assert trace_oracle(nil, nil.ring.one) == K(3)


def test_trace_over_itself():
    A = polynomial_ring(QQ, "a")
    alg = FiniteFlatAlgebra(quotient_ring(QQ, "x", ["x - 1"], base=A))
    assert alg.n == 1
    assert trace_oracle(alg, alg.ring("a")) == A("a")


# -- omega_finite --------------------------------------------------------------------------------

def test_omega_finite_dual_numbers():
    alg = FiniteFlatAlgebra(quotient_ring(QQ, "x", ["x^2"]))
    pair = omega_finite(alg)
    assert pair.integral == [K(1), K(0)]
    assert pair.pairing_matrix() == la.identity(K, 2)
    assert pair.is_dualizing()


def test_omega_finite_sqrt_two():
    alg = FiniteFlatAlgebra(quotient_ring(QQ, "x", ["x^2 - 2"]))
    pair = omega_finite(alg)
    # integral(1*) = 1 and integral(x*) = 0 in the dual basis
    assert pair.integral == [K(1), K(0)]
    assert pair.is_dualizing()


def test_omega_finite_trivial_algebra():
    A = polynomial_ring(QQ, "a")
    alg = FiniteFlatAlgebra(quotient_ring(QQ, "x", ["x"], base=A))
    pair = omega_finite(alg)
    assert pair.pairing_matrix() == [[A.one]]


# -- theta ------------------------------------------------------------------------------------------

def test_theta_specialization():
    A = polynomial_ring(QQ, "a")
    alg = FiniteFlatAlgebra(quotient_ring(QQ, "x", ["x^2 - a"], base=A))
    res = theta_base_change(alg, RingMap(A, K, [0]))
    assert res.theta == la.identity(K, 2)
    assert res.ok


def test_theta_identity():
    A = polynomial_ring(QQ, "a")
    alg = FiniteFlatAlgebra(quotient_ring(QQ, "x", ["x^3 - a*x - 1"], base=A))
    res = theta_base_change(alg, RingMap.identity(A))
    assert res.theta == la.identity(A, 3)
    assert res.integral_compatible


def test_theta_transitivity_through_dual_numbers():
    A = polynomial_ring(QQ, "a")
    S = quotient_ring(QQ, "s", ["s^2"])
    alg = FiniteFlatAlgebra(quotient_ring(QQ, "x", ["x^2 - a"], base=A))
    same, direct, chained = theta_transitivity(alg, RingMap(A, S, ["s"]), RingMap(S, K, [0]))
    assert same and direct == chained


def test_theta_of_residue_pairs():
    A = polynomial_ring(QQ, "a")
    R = polynomial_ring(QQ, "x", base=A)
    ctx = ResidueContext(R, ["x^2 - a"], [2])
    assert residue_pair_theta(ctx, RingMap(A, K, [1])).ok


@pytest.mark.parametrize("u", ["x", "1 + x", "3"])
def test_theta_rescale_conjugates(u):
    S = quotient_ring(QQ, "s", ["s^2"])
    alg = FiniteFlatAlgebra(quotient_ring(QQ, "x", ["x^2 - 2"]))
    out = theta_rescale_check(alg, RingMap(K, S, []), u)
    assert out["conjugate"] and out["verdicts_equal"]


def test_rescale_needs_unit():
    alg = FiniteFlatAlgebra(quotient_ring(QQ, "x", ["x^2"]))
    with pytest.raises(DualityError):
        omega_finite(alg).rescaled("x")


# -- relative dualizing modules ----------------------------------------------------------------------

def test_omega_generators():
    assert omega_smooth_or_ci(polynomial_ring(QQ, "x")).generator == "dx"
    cusp = omega_smooth_or_ci(quotient_ring(QQ, "x,y", ["y^2 - x^3"]))
    assert cusp.r == 1
    assert cusp.generator == "den(dx^dy; -x^3 + y^2)"
    point = omega_smooth_or_ci(quotient_ring(QQ, "x", ["x^2"]))
    assert point.r == 0 and point.generator == "den(dx; x^2)"


def test_omega_rejects_non_complete_intersection():
    with pytest.raises(DualityError):
        omega_smooth_or_ci(quotient_ring(QQ, "x,y", ["x*y", "x^2"]))


# -- residues ------------------------------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_residue_monomials(n):
    R = polynomial_ring(QQ, "x")
    ctx = ResidueContext(R, ["x"], [n])
    for k in range(n + 2):
        expected = K(1) if k == n - 1 else K(0)
        assert ctx.residue(R(f"x^{k}")) == expected
        assert ctx.residue(R(f"x^{k}")) == K(univariate_residue_oracle(f"x^{k}", f"x^{n}"))


def test_residue_evaluation_at_section():
    A = polynomial_ring(QQ, "a")
    R = polynomial_ring(QQ, "x", base=A)
    assert residue_symbol(1, R, ["x - a"]) == A.one
    assert residue_symbol("x", R, ["x - a"]) == A("a")


def test_residue_normalization():
    for names in ["x", "x,y", "x,y,z"]:
        R = polynomial_ring(QQ, names)
        assert residue_symbol(1, R, list(R.own)) == K(1)


def test_residue_euler_jacobi_oracle():
    # sum over the four simple zeros of (x^2 + y, y^2 - x) of g / Jacobian
    R = polynomial_ring(QQ, "x,y")
    ctx = ResidueContext(R, ["x^2 + y", "y^2 - x"])
    pts = sympy.solve([X**2 + Y, Y**2 - X], [X, Y], dict=True)
    J = sympy.Matrix([[2 * X, 1], [-1, 2 * Y]]).det()
    for g in ["1", "x", "y", "x*y", "x^3"]:
        expr = sympy.sympify(g.replace("^", "**"))
        total = sympy.nsimplify(sympy.simplify(sum((expr / J).subs(p) for p in pts)))
        assert ctx.residue(R(g)) == K(Fraction(int(total.p), int(total.q)))


def test_residue_rejects_non_polynomial_ring():
    with pytest.raises(DualityError):
        ResidueContext(quotient_ring(QQ, "x", ["x^3"]), ["x"])


@settings(max_examples=25, deadline=None)
@given(coeffs=st.lists(st.integers(-4, 4), min_size=1, max_size=3),
       lead=st.sampled_from([1, 2, -3]), k=st.integers(0, 6), n=st.integers(1, 2))
def test_univariate_residues_match_partial_fractions(coeffs, lead, k, n):
    terms = [f"{c}*x^{i}" for i, c in enumerate(coeffs)]
    s = f"{lead}*x^{len(coeffs)} + " + " + ".join(terms)
    R = polynomial_ring(QQ, "x")
    ctx = ResidueContext(R, [s], [n])
    full = sympy.expand(sympy.sympify(s.replace("^", "**")) ** n)
    want = univariate_residue_oracle(f"x^{k}", str(full))
    assert ctx.residue(R(f"x^{k}")) == K(want)


@settings(max_examples=15, deadline=None)
@given(a=st.integers(-2, 2), b=st.integers(-2, 2), al=st.integers(1, 2), be=st.integers(1, 2))
def test_trace_formula_bivariate(a, b, al, be):
    R = polynomial_ring(QQ, "x,y")
    ctx = ResidueContext(R, [f"x^2 + {a}*y", f"y^2 + {b}*x*y - x"], [al, be])
    J = ctx.jacobian()
    for e in ctx.algebra.basis:
        g = R.poly(e.terms)
        assert ctx.residue(g * J) == trace_oracle(ctx.algebra, ctx.B(g))


# -- pairings and local duality -------------------------------------------------------------------------

def test_pairing_double_point():
    R = polynomial_ring(QQ, "x")
    rep = r_z_and_integral(ResidueContext(R, ["x"], [2]))
    assert rep.matrix == [[K(0), K(1)], [K(1), K(0)]]
    assert rep.determinant == K(-1) and rep.unimodular


def test_pairing_simple_point():
    R = polynomial_ring(QQ, "x")
    assert r_z_and_integral(ResidueContext(R, ["x"])).matrix == [[K(1)]]


def test_pairing_plane():
    R = polynomial_ring(QQ, "x,y")
    rep = r_z_and_integral(ResidueContext(R, ["x^2", "y"]))
    assert len(rep.matrix) == 2 and rep.unimodular


def test_theta_signs_cancel_in_integral():
    R = polynomial_ring(QQ, "x")
    assert [r_z_sign(r, R) for r in range(1, 4)] == [1, 1, 1]


def test_local_duality_examples():
    R = polynomial_ring(QQ, "x")
    rep = local_duality_truncated(ResidueContext(R, ["x"], [2]))
    assert rep.unimodular and len(rep.matrix) == 2
    assert local_duality_truncated(ResidueContext(R, ["x"], [1])).matrix == [[K(1)]]
    S = polynomial_ring(QQ, "x,y")
    rep = local_duality_truncated(ResidueContext(S, ["x", "y"], [2, 2]))
    assert len(rep.matrix) == 4 and rep.unimodular


def test_pairing_over_prime_field():
    F = GF(101)
    R = polynomial_ring(F, "x,y")
    rep = r_z_and_integral(ResidueContext(R, ["x^2 + y^2", "x*y"]))
    assert rep.unimodular


# -- residue base change ---------------------------------------------------------------------------------

def test_residue_base_change_specialization():
    A = polynomial_ring(QQ, "a")
    R = polynomial_ring(QQ, "x", base=A)
    ctx = ResidueContext(R, ["x^2 - a"])
    rep = residue_base_change(ctx, RingMap(A, K, [0]))
    assert rep.equal and rep.lc_bijective
    values = {str(b): (str(l), str(r)) for b, l, r in rep.values}
    assert values["x"] == ("1", "1")


def test_residue_base_change_identity():
    A = polynomial_ring(QQ, "a")
    R = polynomial_ring(QQ, "x", base=A)
    ctx = ResidueContext(R, ["x^3 - a"])
    assert residue_base_change(ctx, RingMap.identity(A)).equal


def test_residue_base_change_dual_numbers():
    R = polynomial_ring(QQ, "x")
    S = quotient_ring(QQ, "s", ["s^2"])
    ctx = ResidueContext(R, ["x^2"])
    rep = residue_base_change(ctx, RingMap(K, S, []))
    assert rep.equal and rep.lc_bijective
    assert [str(r) for _, _, r in rep.values] == ["0", "1"]


# -- Verdier --------------------------------------------------------------------------------------------

def test_verdier_line_any_base_change():
    R = polynomial_ring(QQ, "x")
    rep = verdier_check(R, RingMap.identity(K))
    assert rep.v_f == polynomial_ring(QQ, "x").one
    assert rep.theta == [[R.one]] and rep.pullback == [[R.one]]
    A = polynomial_ring(QQ, "a")
    RA = polynomial_ring(QQ, "x", base=A)
    assert verdier_check(RA, RingMap(A, K, [5])).ok


def test_verdier_plane():
    A = polynomial_ring(QQ, "a")
    R = polynomial_ring(QQ, "x,y", base=A)
    S = quotient_ring(QQ, "s", ["s^2"])
    rep = verdier_check(R, RingMap(A, S, ["s"]))
    assert rep.ok and len(rep.theta) == 1


def test_verdier_etale_trace_form():
    alg = FiniteFlatAlgebra(quotient_ring(QQ, "x", ["x^2 - 2"]))
    T = [[trace_oracle(alg, a * b) for b in alg.basis] for a in alg.basis]
    assert T == [[K(2), K(0)], [K(0), K(4)]]
    assert verdier_check_etale(alg, RingMap.identity(K)).ok
    S = quotient_ring(QQ, "s", ["s^2"])
    assert verdier_check_etale(alg, RingMap(K, S, [])).ok


def test_verdier_etale_rejects_inseparable():
    alg = FiniteFlatAlgebra(quotient_ring(QQ, "x", ["x^2"]))
    with pytest.raises(DualityError):
        verdier_check_etale(alg, RingMap.identity(K))
