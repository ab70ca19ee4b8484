from fractions import Fraction
from math import sqrt

import numpy as np
import pytest

from torusrtf.heckemeasure import HeckeElement
from torusrtf.qfield import characters, class_group, make_field
from torusrtf.quatorder import class_set_for_level
from torusrtf.spectralside import (classical_lhs, classical_rhs, delta_route, eigen_decompose, hecke_matrix,
                                   l_ratio_factor, measure_constant, spectral_average, waldspurger_constant)
from torusrtf.torusmap import iota_map


def setup(D, N):
    fld = make_field(D)
    G = class_group(fld)
    pd = iota_map(class_set_for_level(N), fld, G)
    return fld, G, pd, eigen_decompose(pd.class_set, (2, 3, 5, 7, 13) if N != 13 else (2, 3, 5, 7, 11))


def test_level_11_eigenvalues():
    _, _, _, ed = setup(-4, 11)
    assert ed.dim_cusp == 1
    assert ed.cusp_forms[0].eigenvalues == {2: -2.0, 3: -1.0, 5: 1.0, 7: -2.0, 13: 4.0}
    assert ed.eisenstein.eigenvalues[2] == 3.0


def test_level_37_two_forms():
    _, _, _, ed = setup(-23, 37)
    pairs = sorted((f.eigenvalues[2], f.eigenvalues[3]) for f in ed.cusp_forms)
    assert pairs == [(-2.0, -3.0), (0.0, 1.0)]


@pytest.mark.parametrize("D,N", [(-4, 11), (-23, 37), (-7, 41), (-3, 5)])
def test_orthonormal_basis(D, N):
    _, _, _, ed = setup(D, N)
    assert np.allclose(ed.gram(), np.eye(ed.dim_cusp + 1), atol=1e-12)


def test_hecke_matrix_of_f2():
    cs = class_set_for_level(37)
    B = cs.brandt_matrices(4)
    assert np.allclose(hecke_matrix(cs, HeckeElement.basis(2, 2)), B[4] - np.eye(len(cs)))
    f = HeckeElement.make(3, {0: 2, 1: -1})
    assert np.allclose(hecke_matrix(cs, f), 2 * np.eye(len(cs)) - cs.brandt_matrix(3))


@pytest.mark.parametrize("D,N", [(-4, 11), (-23, 37), (-23, 5), (-15, 7), (-7, 41)])
def test_routes_agree(D, N):
    fld, G, pd, ed = setup(D, N)
    for chi in characters(G):
        for f in (None, HeckeElement.basis(2, 1), HeckeElement.make(3, {0: 1, 2: 2})):
            rep = spectral_average(ed, pd, chi, f)
            assert rep.route_gap < 1e-10
            assert abs(rep.delta_route_total - delta_route(pd, chi, f)) < 1e-12


def test_classical_closed_forms():
    assert classical_rhs(make_field(-3), 1, 5, True) == 0
    assert classical_rhs(make_field(-4), 1, 11, True) == Fraction(2, 5)
    assert classical_rhs(make_field(-23), 3, 37, False) == 3


@pytest.mark.parametrize("D,N", [(-3, 5), (-4, 11), (-23, 37)])
def test_classical_identity(D, N):
    fld, G, pd, ed = setup(D, N)
    for chi in characters(G):
        rep = spectral_average(ed, pd, chi)
        assert abs(classical_lhs(rep, pd) - float(classical_rhs(fld, G.h, N, chi.is_trivial))) < 1e-12


def test_empty_cusp_space():
    fld, G, pd, ed = setup(-3, 5)
    rep = spectral_average(ed, pd, characters(G)[0])
    assert ed.dim_cusp == 0 and rep.raw_period_sum == 0 and rep.l_average == 0


def test_constants():
    fld = make_field(-23)
    chi = characters(class_group(fld))[0]
    N = 37
    assert abs(l_ratio_factor(N, fld) - 2 * N / sqrt(23)) < 1e-12
    assert abs(measure_constant(N, fld) / waldspurger_constant(N, fld, chi) - 2 * N / sqrt(23)) < 1e-12
    with pytest.raises(ValueError):
        waldspurger_constant(N, fld, chi, 1, 1)
