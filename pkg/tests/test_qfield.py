import itertools
from math import isqrt

import pytest
from hypothesis import given, settings, strategies as st
from sympy import divisors

from torusrtf.arith import is_fundamental_discriminant, kronecker
from torusrtf.qfield import (analytic_class_number, characters, class_group, compose, count_ideals_of_norm,
                             ideals_of_norm, make_field, prime_ideal_class, reduce_form, reduced_forms)

FUND = [D for D in range(-400, 0) if is_fundamental_discriminant(D)]


@pytest.mark.parametrize("D,h,structure", [(-3, 1, ()), (-4, 1, ()), (-23, 3, (3,)), (-47, 5, (5,)),
                                           (-56, 4, (4,)), (-84, 4, (2, 2)), (-71, 7, (7,))])
def test_known_class_groups(D, h, structure):
    G = class_group(make_field(D))
    assert G.h == h
    assert tuple(G.structure) == structure


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FUND))
def test_group_axioms(D):
    G = class_group(make_field(D))
    e = G.identity
    for f in G.elements:
        assert G.mul(f, e) == f
        assert G.mul(f, G.inv(f)) == e
    for f, g, k in itertools.islice(itertools.product(G.elements, repeat=3), 60):
        assert G.mul(G.mul(f, g), k) == G.mul(f, G.mul(g, k))
        assert G.mul(f, g) == G.mul(g, f)


def test_reduce_is_canonical():
    f = (2, 1, 3)  # disc -23
    assert reduce_form(2, 5, 6) == reduce_form(*f)
    assert compose(f, (1, 1, 6)) == f


def reps(form, n):
    a, b, c = form
    D = b * b - 4 * a * c
    count = 0
    for x in range(-4 * isqrt(n) - 4, 4 * isqrt(n) + 5):
        for y in range(-4 * isqrt(n) - 4, 4 * isqrt(n) + 5):
            if a * x * x + b * x * y + c * y * y == n:
                count += 1
    return count


@pytest.mark.parametrize("D", [-4, -23, -47, -84])
def test_ideals_of_norm_by_representation_counts(D):
    fld = make_field(D)
    w = 2 * fld.u
    for n in range(1, 40):
        got = ideals_of_norm(fld, n)
        for f in reduced_forms(D):
            assert got.get(f, 0) == reps(f, n) // w
        assert sum(got.values()) == sum(kronecker(D, d) for d in divisors(n)) == count_ideals_of_norm(fld, n)


@pytest.mark.parametrize("D", [-23, -39, -84, -104])
def test_character_orthogonality(D):
    G = class_group(make_field(D))
    chars = characters(G)
    assert len(chars) == G.h and chars[0].is_trivial
    for a in chars:
        for b in chars:
            s = sum(a(f) * b(f).conjugate() for f in G.elements)
            assert abs(s - (G.h if a.exps == b.exps else 0)) < 1e-12
    for chi in chars:
        for f in G.elements:
            for g in G.elements:
                assert abs(chi(G.mul(f, g)) - chi(f) * chi(g)) < 1e-12


def test_prime_ideal_class_norm():
    fld = make_field(-23)
    a, b, c = prime_ideal_class(fld, 2)
    assert b * b - 4 * a * c == -23 and a in (1, 2)
    with pytest.raises(ValueError):
        prime_ideal_class(fld, 5)


def test_analytic_class_number():
    for D in (-3, -4, -23, -71, -163, -1999):
        assert round(analytic_class_number(D)) == class_group(make_field(D)).h
