"""Weighted distribution of a_3 / sqrt 3 over [0, 2] for E = Q(i) and growing prime level N.

Runs the equidist experiment on a short level list and prints the finite-N
values next to the limit 3/8.
"""
from torusrtf import harness

rows = harness.run_experiment("equidist", {"D": -4, "p": 3, "J": [0, 2], "N_max": 140}, jobs=4)
for r in rows[:-1]:
    print(f"N={r['N']:4d}  forms={r['cusp_dim']:3d}  in J={r['in_J']:3d}  value={r['value']:.4f}  limit={r['limit']:.4f}")
t = rows[-1]
print(f"{t['shrinking_steps']} of {t['steps']} steps move closer to the limit")
