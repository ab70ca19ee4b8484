from fractions import Fraction

from hypothesis import given, strategies as st
from sympy import factorint, jacobi_symbol as sym_jacobi, primerange, totient

from torusrtf.arith import (divisors, euler_phi, factor, hilbert_symbol, is_fundamental_discriminant,
                            is_squarefree, kronecker, sigma1, xgcd)

nonzero = st.integers(-500, 500).filter(lambda x: x != 0)


@given(st.integers(1, 10**6))
def test_factor_matches_sympy(n):
    assert factor(n) == factorint(n)


@given(st.integers(1, 5000))
def test_phi_sigma(n):
    assert euler_phi(n) == totient(n)
    assert sigma1(n) == sum(divisors(n))


def test_fundamental_discriminants():
    small = [D for D in range(-40, 0) if is_fundamental_discriminant(D)]
    assert small == [-40, -39, -35, -31, -24, -23, -20, -19, -15, -11, -8, -7, -4, -3]
    assert is_squarefree(105) and not is_squarefree(12)


@given(st.integers(-2000, -3), st.sampled_from(list(primerange(3, 200))))
def test_kronecker_odd_prime_is_legendre(D, p):
    assert kronecker(D, p) == sym_jacobi(D % p, p)


def test_kronecker_at_two():
    # (D/2) is 0 for even D, +1 for D = 1 mod 8 and -1 for D = 5 mod 8
    assert kronecker(-4, 2) == 0
    assert kronecker(-7, 2) == 1
    assert kronecker(-3, 2) == -1


@given(nonzero, nonzero)
def test_hilbert_reciprocity(a, b):
    places = ["inf"] + sorted({p for x in (a, b, 2) for p in factor(abs(x))})
    prod = 1
    for v in places:
        prod *= hilbert_symbol(a, b, v)
    assert prod == 1


@given(nonzero, nonzero, nonzero, st.sampled_from([2, 3, 5, 7]))
def test_hilbert_bimultiplicative(a, b, c, p):
    assert hilbert_symbol(a * c, b, p) == hilbert_symbol(a, b, p) * hilbert_symbol(c, b, p)
    assert hilbert_symbol(a, b, p) == hilbert_symbol(b, a, p)


def test_hilbert_known_values():
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(-1, -1, 3) == 1
    assert hilbert_symbol(-1, -11, 11) == -1
    assert hilbert_symbol(Fraction(3, 4), 5, 5) == hilbert_symbol(3, 5, 5)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_xgcd(a, b):
    g, x, y = xgcd(a, b)
    assert a * x + b * y == g and g >= 0
