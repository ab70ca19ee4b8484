"""Right ideal classes of a maximal order in the definite algebra of discriminant N.

For each level the classes are found by the neighbor method, weighted by their
unit groups, and the mass sum 1/w_x is compared with (N-1)/12.  The Brandt
matrix B(2) then gives the Hecke eigenvalues of the weight-2 newforms.
"""
import numpy as np

from torusrtf.quatorder import class_set_for_level, mass

for N in (11, 23, 37, 101, 105):
    cs = class_set_for_level(N)
    print(f"N={N}: algebra ({cs.alg.a},{cs.alg.b}), {len(cs)} classes, weights {cs.weights}, "
          f"mass {cs.mass} (expected {mass(N)})")

cs = class_set_for_level(37)
B2 = cs.brandt_matrix(2)
print("\nB(2) at level 37:\n", B2)
print("eigenvalues:", np.round(np.linalg.eigvals(B2.astype(float)).real, 10))
print("3 is the Eisenstein eigenvalue; -2 and 0 are a_2 of the two newforms of level 37")
