"""Local spherical Hecke algebra: transforms, Plancherel measure and the twisted measures.

Checks a handful of the Plancherel identities and evaluates the irregular local
factor I~ by its coset sum and by integration against mu_(p,E,Omega).
"""
from math import cos, pi, sin

from torusrtf.heckemeasure import HeckeElement, i_tilde_coset, i_tilde_integral, plancherel_suite

rows = plancherel_suite(3, 4)
print(f"{len(rows)} Plancherel identities at q=3, worst error {max(r['err'] for r in rows):.2e}")
for r in rows[:6]:
    print("  ", r["identity"], r["n"], r["m"], r["lhs"], r["rhs"])

z3 = complex(cos(2 * pi / 3), sin(2 * pi / 3))
for split_type, zeta in (("inert", 1.0), ("split", 1.0), ("split", z3), ("ramified", -1.0)):
    for n in range(4):
        f = HeckeElement.basis(2, n)
        a, b = i_tilde_coset(f, split_type, zeta), i_tilde_integral(f, split_type, zeta)
        print(f"{split_type:8s} zeta={zeta!s:28s} f_{n}: coset {a!s:24s} measure {b}")
