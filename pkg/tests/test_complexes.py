import pytest
from hypothesis import given, settings, strategies as st

from dualis.complexes import (
    Complex,
    ComplexError,
    cohomology,
    contraction_homotopy,
    hom_complex,
    koszul_complex,
    koszul_resolution,
    module_complex,
    shift_and_theta,
    tensor_complex,
    tensor_hom_map,
    theta_sign,
    two_term,
)
from dualis.exact_algebra import QQ, polynomial_ring
from dualis.exact_algebra import linalg as la

from randomcx import RING, complexes


def test_d_squared_checked_at_construction():
    R = polynomial_ring(QQ, "x")
    with pytest.raises(ComplexError):
        Complex(R, {0: 1, 1: 1, 2: 1}, {0: [[R("x")]], 1: [[R(1)]]})


def test_hom_of_two_term_into_ring():
    R = polynomial_ring(QQ, "x")
    H = hom_complex(two_term(R, [[R("x")]]), module_complex(R))
    assert H.degrees == [-1, 0]
    assert H.d(-1) == [[R("x")]]


def test_hom_from_ring_is_identity():
    R = polynomial_ring(QQ, "x,y")
    B = koszul_complex([R("x"), R("y")], R)
    assert hom_complex(module_complex(R), B) == B


def test_double_dual_negates():
    R = polynomial_ring(QQ, "x")
    A = two_term(R, [[R("x")]])
    R0 = module_complex(R)
    dd = hom_complex(hom_complex(A, R0), R0)
    assert dd == A.negated()


def test_sign_flipped_dual_is_involutive():
    R = polynomial_ring(QQ, "x,y")
    P = koszul_complex([R("x"), R("y^2")], R)
    R0 = module_complex(R)
    Q = hom_complex(P, R0).negated()
    assert hom_complex(Q, R0) == P


def test_tensor_of_koszul_factors():
    R = polynomial_ring(QQ, "x,y")
    T = tensor_complex(koszul_complex([R("x")], R), koszul_complex([R("y")], R))
    assert [T.rank(n) for n in range(3)] == [1, 2, 1]
    assert T.d(0) == [[R("y")], [R("x")]]
    assert T.d(1) == [[R("x"), -R("y")]]


def test_tensor_unit():
    R = polynomial_ring(QQ, "x,y")
    A = koszul_complex([R("x"), R("y")], R)
    assert tensor_complex(A, module_complex(R)) == A


def test_tensor_hom_without_signs():
    R = polynomial_ring(QQ, "x")
    P = two_term(R, [[R("x")]])
    iso = tensor_hom_map(module_complex(R), P)
    assert iso.is_isomorphism()


def test_theta_signs():
    R = polynomial_ring(QQ, "x")
    R0 = module_complex(R)
    assert shift_and_theta(R0, R0, 1, 1).component(-2) == [[-R.one]]
    assert theta_sign(1, 1) == -1
    assert theta_sign(5, 0) == 1
    for r in range(1, 4):
        c = shift_and_theta(R0, R0, r, r).component(-2 * r)
        assert c == [[R.one if r % 2 == 0 else -R.one]]


def test_cohomology_examples():
    R = polynomial_ring(QQ, "x")
    C = two_term(R, [[R("x")]])
    assert cohomology(C, 0).is_zero()
    assert cohomology(C, 1).dimension() == 1
    S = polynomial_ring(QQ, "x,y")
    K = koszul_complex([S("x"), S("y")], S)
    assert cohomology(K, 0).is_zero()
    assert cohomology(K, 1).is_zero()
    assert cohomology(K, 2).dimension() == 1


def test_koszul_resolution_resolves_quotient():
    R = polynomial_ring(QQ, "x,y")
    K = koszul_complex([R("x"), R("y^2")], R)
    C = koszul_resolution(K)
    assert C.degrees == [-2, -1, 0]
    assert cohomology(C, -1).is_zero() and cohomology(C, -2).is_zero()
    assert cohomology(C, 0).dimension() == 2
    assert hom_complex(C, module_complex(R)) == K


def test_contraction_homotopy():
    R = polynomial_ring(QQ, "x,y,z")
    t = [R("x"), R("y + z^2"), R("z")]
    C = koszul_resolution(koszul_complex(t, R))
    for i in range(3):
        s = contraction_homotopy(t, R, i)
        for n in C.degrees:
            rank = C.rank(n)
            acc = la.zeros(R, rank, rank)
            if n + 1 in s and C.rank(n + 1):
                acc = la.matmul(s[n + 1], C.d(n), R)
            if C.rank(n - 1) and n in s:
                extra = la.matmul(C.d(n - 1), s[n], R)
                acc = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(acc, extra)]
            assert acc == la.scale(la.identity(R, rank), t[i])


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_random_assemblies(seed):
    A, B = complexes(seed, 2)
    R0 = module_complex(RING)
    hom_complex(A, B)  # d^2 = 0 is checked by the constructor
    tensor_complex(A, B)
    assert hom_complex(hom_complex(A, R0), R0) == A.negated()
    assert hom_complex(hom_complex(A, R0).negated(), R0) == A
    assert tensor_hom_map(module_complex(RING, 2), A).is_isomorphism()


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10**6), i=st.integers(-2, 2), j=st.integers(-2, 2))
def test_theta_is_chain_isomorphism(seed, i, j):
    A, B = complexes(seed, 2)
    th = shift_and_theta(A, B, i, j)
    assert th.failing_degrees() == []
    assert th.is_isomorphism()
