"""Ingest a coefficient file for the weight-4 newform of level 5 and check the classical average.

The file was produced by tools/make_eta_fixture.py from eta(z)^4 eta(5z)^4.  For
E = Q(sqrt(-3)) the average of L(2, f x theta)/(f, f) times the classical
constant equals h = 1.
"""
import os

from torusrtf import harness

path = os.path.join(os.path.dirname(__file__), "..", "tests", "data", "level5_weight4.txt")
rows = harness.run_experiment("ingest", {"path": path, "level": 5, "weight": 4, "D": -3})
r = rows[0]
print(f"{r['label']}: level {r['level']} weight {r['weight']}, {r['primes']} primes, root number {r['root_number']}")
print(f"L_fin = {r['L_fin']:.12f}, (f, f) = {r['petersson']:.6e}")
print(f"classical average {r['afe']:.12f} against h = {r['reference']}")
