"""Central values through the approximate functional equation.

The Brandt eigenvalues at level 11 give the newform 11a; its Rankin-Selberg
L-function with the theta series of Q(i) and the symmetric square (for the
Petersson norm) reproduce the classical average 2/5.
"""
from torusrtf import harness
from torusrtf.lfunc import FormData, afe_value, build_lseries, nmax_for, validate
from torusrtf.qfield import characters, class_group, make_field
from torusrtf.quatorder import class_set_for_level
from torusrtf.spectralside import eigen_decompose
from sympy import primerange

cs = class_set_for_level(11)
ed = eigen_decompose(cs, tuple(primerange(2, 60)))
form = FormData(11, 2, dict(ed.cusp_forms[0].eigenvalues), "11a")
L = validate(build_lseries("f", form, nmax_for("f", 11, 2)))
print(f"L(11a, 1) = {afe_value(L).finite.real:.12f}  (functional equation residual {L.gate_residual:.1e})")

G = class_group(make_field(-4))
print("classical average through the AFE:", harness.afe_classical(-4, 11, characters(G)[0], G, eigen_decompose(cs)))
print("closed form h (1 - 12 h / (u phi(N))) = 2/5")
