"""Spectral side of the period average and the large-level identity.

The Brandt eigenforms at level 11 are paired with the period vector of
E = Q(i).  The cuspidal sum of |P(phi)|^2, optionally weighted by a Hecke
transform, is compared with the closed forms.
"""
from torusrtf.geomside import GeomConfig, geometric_total
from torusrtf.heckemeasure import HeckeElement, i_tilde_integral
from torusrtf.geomside import local_data
from torusrtf.qfield import characters, class_group, make_field
from torusrtf.quatorder import class_set_for_level
from torusrtf.spectralside import classical_lhs, classical_rhs, eigen_decompose, large_level_sides, spectral_average
from torusrtf.torusmap import iota_map

fld = make_field(-4)
G = class_group(fld)
pd = iota_map(class_set_for_level(43), fld, G)
ed = eigen_decompose(pd.class_set)
chi = characters(G)[0]
print("cusp forms at level 43:", [f.eigenvalues for f in ed.cusp_forms])

rep = spectral_average(ed, pd, chi)
print("classical average:", classical_lhs(rep, pd), "closed form:", classical_rhs(fld, G.h, 43, True))

for f in (None, HeckeElement.basis(2, 1), HeckeElement.basis(5, 1), HeckeElement.make(3, {0: 1, 2: 1})):
    rep = spectral_average(ed, pd, chi, f)
    cfg = GeomConfig(43, G, chi, 1, 0, f)
    it = 1.0 if f is None else i_tilde_integral(f, *local_data(cfg))
    lhs, rhs = large_level_sides(rep, pd, chi, f, it)
    spec = 4 / (fld.u**2 * fld.d_abs) * rep.eigen_route_total
    print(f"f={f}: spectral {spec:.12f} geometric {geometric_total(cfg).total:.12f}  theorem {lhs:.12f} = {rhs:.12f}")
