"""Per-form bounds from positivity, compared with the shape N^(1+eps) c^eps + N^eps c^(1/2+eps).

Each term of the period average is nonnegative, so every L(1/2)/L(1, Ad) is at
most the average.  The scan fits one constant C over the grid.
"""
from torusrtf import harness

cfg = {"configs": [{"D": D, "N": N, "omega": "all"} for D, N in ((-4, 11), (-4, 43), (-23, 37), (-23, 53), (-7, 41))]}
rows = harness.run_experiment("subconvexity", cfg, jobs=2)
for r in rows:
    print(f"D={r['D']:4d} N={r['N']:3d} Omega={r['omega']:5s} A/N={r['average_over_N']:.4f} "
          f"max L_fin={r['max_L_fin']:.4f} bound={r['bound']:.4f} ratio={r['ratio']:.4f}")
print("fitted C =", rows[0]["C"], " holdout C =", rows[0]["C_holdout"])
