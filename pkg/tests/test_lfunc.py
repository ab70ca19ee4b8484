import os
from math import gcd

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import factorint, primerange

from torusrtf.arith import kronecker
from torusrtf.lfunc import (FormData, afe_value, build_lseries, dirichlet_series, euler_to_dirichlet,
                            fe_residual, nmax_for, parse_eigenform_file, riemann_zeta_series, validate)
from torusrtf.quatorder import class_set_for_level
from torusrtf.spectralside import eigen_decompose


def test_zeta_center():
    v = afe_value(validate(riemann_zeta_series(40)))
    assert abs(v.finite - float(mpmath.zeta(0.5))) < 1e-12


@pytest.mark.parametrize("D", [-3, -4, -23])
def test_dirichlet_values(D):
    L = validate(dirichlet_series(D, 300))
    # mpmath takes the character values on one period
    period = [kronecker(D, r) for r in range(abs(D))]
    ref = mpmath.dirichlet(0.5, period)
    assert abs(afe_value(L).finite - float(ref)) < 1e-10
    # class number formula L(1, chi_D) = 2 pi h / (w sqrt|D|)
    h, w = {-3: (1, 6), -4: (1, 4), -23: (3, 2)}[D]
    assert abs(afe_value(L, 1.0).finite - 2 * np.pi * h / (w * np.sqrt(-D))) < 1e-10


def test_wrong_sign_fails_gate():
    L = dirichlet_series(-4, 300)
    L.sign = -1.0
    with pytest.raises(ArithmeticError):
        validate(L)
    L2 = dirichlet_series(-4, 300)
    L2.conductor = 5
    assert fe_residual(L2) > 1e-3


def test_euler_to_dirichlet():
    assert np.allclose(euler_to_dirichlet(lambda p: [1, -1], 50), np.ones(50))
    # 1/(1 + X) at every prime gives the Liouville function
    lam = euler_to_dirichlet(lambda p: [1, 1], 60)
    for n in range(1, 61):
        assert lam[n - 1] == (-1) ** sum(factorint(n).values())


SERIES = euler_to_dirichlet(lambda p: [1, -(p % 5) / 3, 1], 1600)


@given(st.integers(2, 40), st.integers(2, 40))
def test_multiplicative(m, n):
    if gcd(m, n) == 1:
        assert abs(SERIES[m * n - 1] - SERIES[m - 1] * SERIES[n - 1]) < 1e-9


def test_eta_fixture_matches_brandt(data_dir):
    form = parse_eigenform_file(os.path.join(data_dir, "level11_weight2.txt"), 11, 2, 200)
    ed = eigen_decompose(class_set_for_level(11), (2, 3, 5, 7, 13, 17, 19))
    got = ed.cusp_forms[0].eigenvalues
    for p, a in got.items():
        assert form.a_p[p] == a
    assert form.root_number() == 1


def test_elliptic_curve_central_value(data_dir):
    form = parse_eigenform_file(os.path.join(data_dir, "level11_weight2.txt"), 11, 2)
    L = validate(build_lseries("f", form, nmax_for("f", 11, 2)))
    # L(11a, 1) in the arithmetic normalization
    assert abs(afe_value(L).finite - 0.25384186085591068) < 1e-10


def test_weight_four_root_number(data_dir):
    form = parse_eigenform_file(os.path.join(data_dir, "level5_weight4.txt"), 5, 4)
    assert form.a_p[2] == -4 and form.a_p[5] == -5 and form.root_number() == 1
    L = validate(build_lseries("f", form, nmax_for("f", 5, 4)))
    assert L.gate_residual < 1e-10


def write(tmp_path, text):
    p = tmp_path / "f.txt"
    p.write_text(text)
    return str(p)


def test_parse_errors(tmp_path):
    with pytest.raises(ValueError, match=r":3: expected 'n,a_n'"):
        parse_eigenform_file(write(tmp_path, "level 11 weight 2 label x\n1,1\n2;-2\n"))
    with pytest.raises(ValueError, match="coverage gap.*13"):
        body = "".join(f"{p},0\n" for p in primerange(2, 200) if p != 13)
        parse_eigenform_file(write(tmp_path, "level 11 weight 2 label x\n1,1\n" + body), nmax=200)
    with pytest.raises(ValueError, match="header weight 2 does not match requested 4"):
        parse_eigenform_file(write(tmp_path, "level 11 weight 2 label x\n1,1\n"), 11, 4)
    with pytest.raises(ValueError, match=":1: expected 'level N"):
        parse_eigenform_file(write(tmp_path, "11 2\n"))
    with pytest.raises(ValueError, match="conflicting"):
        parse_eigenform_file(write(tmp_path, "level 11 weight 2 label x\n2,1\n2,-2\n"))


def test_form_data_require():
    f = FormData(11, 2, {2: -2, 3: -1}, "x")
    with pytest.raises(KeyError):
        f.require(10)
