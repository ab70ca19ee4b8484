"""Geometric side below the stability range.

For E = Q(sqrt(-23)) at level 5 the regular orbital terms are nonzero.  Each
term is listed with its n and xi, and the total is compared with the weighted
period norm computed from the quaternion side.
"""
import numpy as np

from torusrtf.geomside import GeomConfig, geometric_total, period_norm_prediction, regular_sum
from torusrtf.qfield import characters, class_group, make_field
from torusrtf.quatorder import class_set_for_level
from torusrtf.torusmap import iota_map

fld = make_field(-23)
G = class_group(fld)
pd = iota_map(class_set_for_level(5), fld, G)
w = np.array(pd.class_set.weights)
for chi in characters(G):
    cfg = GeomConfig(5, G, chi)
    print(f"Omega {chi.exps}: stable={cfg.stable}")
    for n, t in regular_sum(cfg):
        print(f"   n={n:4d}  term={t}")
    rep = geometric_total(cfg)
    got = np.sum(w * abs(pd.period_vector(chi)) ** 2)
    print(f"   irregular {rep.irregular:.6f}  total {rep.total:.12f}")
    print(f"   predicted sum w|P|^2 = {complex(period_norm_prediction(cfg)).real:.12f}, computed {got:.12f}")
