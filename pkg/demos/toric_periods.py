"""The optimal embedding of O_E and the toric period vector.

Each ideal class of E = Q(sqrt(-23)) maps to a right ideal class of the maximal
order of level 37.  The period of a function against a class group character
Omega is P(phi) = sum_x phi(x) P_x.
"""
import numpy as np

from torusrtf.qfield import characters, class_group, make_field
from torusrtf.quatorder import class_set_for_level
from torusrtf.torusmap import iota_map

fld = make_field(-23)
G = class_group(fld)
pd = iota_map(class_set_for_level(37), fld, G)
e = pd.embedding
print("y =", [str(c) for c in e.y], "with trace", e.t, "and norm", e.n)
print("iota:", pd.iota, "injective:", pd.injective)

w = np.array(pd.class_set.weights)
for chi in characters(G):
    P = pd.period_vector(chi)
    print(f"Omega {chi.exps}: P = {np.round(P, 6)}, sum w|P|^2 = {np.sum(w * abs(P) ** 2):.12f} (h u = {G.h * fld.u})")
