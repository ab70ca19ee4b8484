import numpy as np
import pytest

from torusrtf.qfield import characters, class_group, make_field, reduce_form
from torusrtf.quatorder import class_set_for_level
from torusrtf.torusmap import alternate_representative, check_admissible, ideal_image, iota_map

CASES = [(-4, 11), (-3, 5), (-23, 37), (-23, 5), (-7, 13), (-15, 37), (-84, 97)]


def data(D, N):
    fld = make_field(D)
    G = class_group(fld)
    return fld, G, iota_map(class_set_for_level(N), fld, G)


@pytest.mark.parametrize("D,N", CASES)
def test_embedding_generates_maximal_order(D, N):
    fld, G, pd = data(D, N)
    e = pd.embedding
    alg = pd.class_set.alg
    assert alg.trd(e.y) == e.t and alg.nrd(e.y) == e.n
    assert e.t * e.t - 4 * e.n == D
    assert pd.class_set.order.lattice.contains(e.y)
    assert alg.nrd(e.sqrt_D) == -D


@pytest.mark.parametrize("D,N", CASES)
def test_iota_independent_of_representative(D, N):
    fld, G, pd = data(D, N)
    for f in G.elements:
        g = alternate_representative(f)
        assert reduce_form(*g) == f and g != f
        I = ideal_image(pd.class_set, pd.embedding, g)
        assert pd.class_set.classify(I) == pd.iota[f]


@pytest.mark.parametrize("D,N", [(-4, 11), (-23, 37), (-7, 13), (-15, 37), (-84, 97)])
def test_weighted_period_norm_in_stable_range(D, N):
    # N >= |D|: no regular terms, so sum_x w_x |P_x|^2 = h u for every Omega
    fld, G, pd = data(D, N)
    w = np.array(pd.class_set.weights)
    for chi in characters(G):
        P = pd.period_vector(chi)
        assert abs(np.sum(w * abs(P) ** 2) - G.h * fld.u) < 1e-9


def test_period_vector_total_mass():
    fld, G, pd = data(-23, 37)
    assert pd.period_vector(characters(G)[0]).sum() == G.h
    assert abs(pd.period_vector(characters(G)[1]).sum()) < 1e-12


def test_inadmissible_level_rejected():
    with pytest.raises(ValueError):
        check_admissible(make_field(-23), 59)
    with pytest.raises(ValueError):
        iota_map(class_set_for_level(5), make_field(-4), class_group(make_field(-4)))
