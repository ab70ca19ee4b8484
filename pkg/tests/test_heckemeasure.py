from math import cos, pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from torusrtf.heckemeasure import (HeckeElement, fn_hat, fn_hat_poly, i_tilde, i_tilde_coset, i_tilde_integral,
                                   integrate_measure, local_L1_ad, local_L1_eta, plancherel, plancherel_suite,
                                   sato_tate, twisted)

xs = st.floats(-2, 2)


@given(st.integers(0, 12), st.sampled_from([2, 3, 5, 9]), xs)
def test_poly_matches_recursion(n, q, x):
    assert abs(np.polynomial.polynomial.polyval(x, fn_hat_poly(n, q)) - fn_hat(n, q, x)) < 1e-8 * q ** (n / 2)


@given(st.integers(2, 10), st.sampled_from([2, 3, 7]), xs)
def test_hecke_algebra_products(n, q, x):
    # f_1 * f_1 = f_2 + (q + 1) f_0 and f_1 * f_n = f_(n+1) + q f_(n-1) for n >= 2
    assert abs(fn_hat(1, q, x) ** 2 - fn_hat(2, q, x) - (q + 1)) < 1e-9
    lhs = fn_hat(1, q, x) * fn_hat(n, q, x)
    assert abs(lhs - fn_hat(n + 1, q, x) - q * fn_hat(n - 1, q, x)) < 1e-8 * q ** ((n + 1) / 2)


def test_transform_at_satake_parameter():
    # x = q^s + q^-s: f_n^ is the spherical function value, e.g. f_1^ = sqrt(q) x
    q, s = 5, 0.3
    x = q**s + q**-s
    assert abs(fn_hat(1, q, x) - sqrt(q) * x) < 1e-12


@pytest.mark.parametrize("mu", [sato_tate(), plancherel(2), plancherel(9), twisted(3, "split", 1.0),
                                twisted(5, "inert"), twisted(7, "ramified", -1.0), twisted(3, "split", 1j)])
def test_measure_mass_against_scipy(mu):
    if mu.kind == "twisted" and abs(complex(mu.zeta).imag) > 0:
        total = integrate_measure(lambda x: np.ones_like(x), mu)
        assert abs(total - mu.expected_mass) < 1e-10
        return
    ref, _ = quad(lambda x: float(np.real(mu.density(x))), -2, 2, epsabs=1e-13)
    got = integrate_measure(lambda x: np.ones_like(x), mu)
    assert abs(got - ref) < 1e-10
    assert abs(got - mu.expected_mass) < 1e-10


def test_chebyshev_orthonormal_under_sato_tate():
    mu = sato_tate()
    for m in range(6):
        for n in range(6):
            um = lambda x, k=m: np.sin((k + 1) * np.arccos(np.clip(x / 2, -1, 1))) / np.sqrt(np.clip(1 - x * x / 4, 1e-300, None))
            val = integrate_measure(lambda x: um(x, m) * um(x, n), mu)
            assert abs(val - (m == n)) < 1e-10


@pytest.mark.parametrize("q", [2, 3, 5, 7, 9])
def test_plancherel_suite_small(q):
    rows = plancherel_suite(q, 4)
    assert rows and all(r["ok"] for r in rows)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(0, 6), st.sampled_from(["split", "inert", "ramified"]),
       st.sampled_from([1.0, -1.0, 1j]), st.booleans())
def test_i_tilde_routes_agree(q, n, split_type, zeta, ram):
    if split_type != "split" and zeta == 1j:
        zeta = -1.0
    f = HeckeElement.make(q, {0: 1, n: 3}) if n else HeckeElement.identity(q)
    a, b = i_tilde_coset(f, split_type, zeta, ram), i_tilde_integral(f, split_type, zeta, ram)
    assert abs(a - b) < 1e-10


def test_i_tilde_identity_and_order_three():
    z = complex(cos(2 * pi / 3), sqrt(3) / 2)
    f = HeckeElement.basis(2, 1)
    a, b = i_tilde(f, "split", z)
    assert abs(a - (z + 1 / z)) < 1e-12 and abs(a - (-1)) < 1e-12
    assert i_tilde(HeckeElement.identity(3), "inert")[0] == 1


def test_local_factors():
    assert abs(local_L1_eta(3, "inert") - 0.75) < 1e-15
    # x = 0 at q: Ad factor [(1 + 1/q)(1 - 1/q)(1 + 1/q)]^-1 with a = i
    q = 3
    assert abs(local_L1_ad(0.0, q) - 1 / ((1 + 1 / q) ** 2 * (1 - 1 / q))) < 1e-15
