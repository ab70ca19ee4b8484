import json
from fractions import Fraction

import numpy as np
import pytest
from sympy import Poly, symbols

from torusrtf.arith import hilbert_symbol, prime_divisors
from torusrtf.quatorder import (ClassSet, build_algebra, class_set_for_level, left_order, mass, maximal_order,
                                right_ideal_classes)

x = symbols("x")


@pytest.mark.parametrize("N", [2, 3, 5, 7, 11, 13, 23, 30, 37, 42, 101, 105])
def test_mass_formula(N):
    cs = class_set_for_level(N)
    assert cs.mass == mass(N)
    assert all(w in (1, 2, 3, 4, 6, 12) for w in cs.weights)


@pytest.mark.parametrize("N", [2, 3, 5, 7, 11, 13, 23, 37, 101, 105, 30])
def test_algebra_ramification(N):
    alg = build_algebra(N)
    assert hilbert_symbol(alg.a, alg.b, "inf") == -1
    for p in [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 101]:
        assert (hilbert_symbol(alg.a, alg.b, p) == -1) == (N % p == 0)


def test_even_number_of_primes_rejected():
    with pytest.raises(ValueError):
        build_algebra(6)
    with pytest.raises(ValueError):
        build_algebra(12)


def test_maximal_order_discriminant():
    for N in (2, 3, 11, 105):
        O = maximal_order(build_algebra(N))
        assert O.discriminant == N and O.is_order


@pytest.mark.parametrize("N,charpoly", [
    (11, (x - 3) * (x + 2)),  # 11a: a_2 = -2
    (23, (x - 3) * (x**2 + x - 1)),  # a_2 = (-1 +- sqrt 5)/2
    (37, (x - 3) * (x + 2) * x),  # 37a, 37b
])
def test_brandt_two_against_known_newforms(N, charpoly):
    B = class_set_for_level(N).brandt_matrix(2)
    got = Poly(np.round(np.poly(B.astype(float))).astype(int).tolist(), x)
    assert got == Poly(charpoly.expand(), x)


@pytest.mark.parametrize("N", [11, 37, 105])
def test_brandt_hecke_relations(N):
    cs = class_set_for_level(N)
    B = cs.brandt_matrices(12)
    h = len(cs)
    w = np.array(cs.weights)
    good = [m for m in range(1, 13) if np.gcd(m, N) == 1]
    for m in good:
        # row sums count the sublattices of index m: sigma(m) for m prime to N
        assert np.all(B[m].sum(axis=1) == sum(d for d in range(1, m + 1) if m % d == 0))
        # self-adjoint for the weighted inner product
        assert np.array_equal(w[None, :] * B[m], (w[None, :] * B[m]).T)
    for m, n in [(2, 3), (2, 5), (3, 4)]:
        if m in good and n in good:
            assert np.array_equal(B[m] @ B[n], B[m * n])
    if 2 in good and 4 in good:
        assert np.array_equal(B[2] @ B[2], B[4] + 2 * np.eye(h, dtype=np.int64))
    assert np.array_equal(B[1], np.eye(h, dtype=np.int64))


def test_left_orders_have_level_discriminant():
    cs = class_set_for_level(37)
    for I in cs.reps:
        assert left_order(I).discriminant == 37


def test_json_round_trip(tmp_path):
    cs = class_set_for_level(37, str(tmp_path))
    again = class_set_for_level(37, str(tmp_path))
    assert again.weights == cs.weights
    assert np.array_equal(again.brandt_matrix(3), cs.brandt_matrix(3))
    data = json.loads(json.dumps(cs.to_json()))
    cs2 = ClassSet.from_json(data)
    assert cs2.mass == Fraction(3, 1)
    assert np.array_equal(cs2.brandt_matrix(2), cs.brandt_matrix(2))


def test_large_prime_level_regression():
    # unit counts of badly conditioned left orders used to be undercounted here
    cs = class_set_for_level(131)
    assert cs.mass == mass(131) and sorted(cs.weights)[-1] == 3
