"""The twelve acceptance criteria, each at its stated tolerance.

Every test records a PASS/FAIL/SKIPPED line that is repeated in the terminal
summary.  The full experiment suite is run once through the CLI with one worker
and once with eight; criteria 2-4 and 10-12 read those runs.
"""
import csv
import json
import os
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import DATA, record
from torusrtf import cli, harness
from torusrtf.qfield import characters, class_group, make_field
from torusrtf.quatorder import class_set_for_level, mass
from torusrtf.spectralside import classical_lhs, classical_rhs, eigen_decompose, period, spectral_average
from torusrtf.torusmap import iota_map

WEIGHT4 = os.path.join(DATA, "level5_weight4.txt")
SUITE = ["classgroup", "classset", "measure-check", "verify-average", "geometric", "equidist", "subconvexity",
         "ingest"]


def run_suite(out, jobs):
    times = {}
    ingest_cfg = os.path.join(out, "ingest_config.json")
    os.makedirs(out, exist_ok=True)
    with open(ingest_cfg, "w") as fh:
        json.dump({"path": WEIGHT4, "level": 5, "weight": 4, "D": -3, "tol": 1e-3}, fh)
    for name in SUITE:
        args = [name, "--out", out, "--jobs", str(jobs)]
        if name == "ingest":
            args += ["--config", ingest_cfg]
        t0 = time.perf_counter()
        cli.main(args)
        times[name] = time.perf_counter() - t0
    return times


@pytest.fixture(scope="module")
def suite(tmp_path_factory):
    root = tmp_path_factory.mktemp("suite")
    one, eight = str(root / "jobs1"), str(root / "jobs8")
    times = run_suite(one, 1)
    run_suite(eight, 8)

    def rows(name):
        with open(os.path.join(one, name.replace("-", "_") + ".json")) as fh:
            return json.load(fh)["rows"]
    return {"one": one, "eight": eight, "times": times, "rows": rows}


def test_criterion_01_mass_formula():
    t0 = time.perf_counter()
    bad = []
    for N in [2, 3, 5, 7, 11, 13, 23, 37, 101, 3 * 5 * 7]:
        cs = class_set_for_level(N)
        expected = Fraction(1, 12)
        for p in (2, 3, 5, 7, 11, 13, 23, 37, 101):
            if N % p == 0:
                expected *= p - 1
        if sum(Fraction(1, w) for w in cs.weights) != expected or mass(N) != expected:
            bad.append(N)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 10
    record(1, ok, f"bad={bad} time={dt:.1f}s")
    assert ok


def test_criterion_02_class_numbers(suite):
    rows = suite["rows"]("classgroup")
    Ds = {r["D"] for r in rows}
    expected = {D for D in range(-2000, 0) if harness.is_fundamental_discriminant(D)}
    bad = [r["D"] for r in rows if not r["passed"]]
    dt = suite["times"]["classgroup"]
    ok = Ds == expected and not bad and dt < 30
    record(2, ok, f"{len(rows)} discriminants, mismatches={bad[:5]} time={dt:.1f}s")
    assert ok


def test_criterion_03_plancherel(suite):
    rows = [r for r in suite["rows"]("measure-check") if r["part"] == "plancherel"]
    worst = max(r["abs_dev"] for r in rows)
    qs = sorted({r["q"] for r in rows})
    dt = suite["times"]["measure-check"]
    ok = qs == [2, 3, 5, 7, 9] and all(r["passed"] for r in rows) and worst <= 1e-10 and dt < 20
    record(3, ok, f"{len(rows)} identities, worst error {worst:.2e}, time={dt:.1f}s")
    assert ok


def test_criterion_04_i_tilde_two_routes(suite):
    rows = [r for r in suite["rows"]("measure-check") if r["part"] == "itilde"]
    kinds = {(r["identity"].split("/")[0], r["identity"].endswith("True")) for r in rows}
    worst = max(r["abs_dev"] for r in rows)
    dt = suite["times"]["measure-check"]
    full = kinds == {(s, ram) for s in ("split", "inert", "ramified") for ram in (False, True)}
    ok = full and max(r["n"] for r in rows) == 6 and worst <= 1e-10 and dt < 20
    record(4, ok, f"{len(rows)} evaluations over {len(kinds)} local types, worst error {worst:.2e}")
    assert ok


def test_criterion_05_basis_independence():
    worst, count = 0.0, 0
    for D in [D for D in range(-40, 0) if harness.is_fundamental_discriminant(D)]:
        fld = make_field(D)
        G = class_group(fld)
        for N in range(2, 61):
            if harness.admissible(D, N):
                continue
            pd = iota_map(class_set_for_level(N), fld, G)
            ed = eigen_decompose(pd.class_set)
            w = np.array(pd.class_set.weights, dtype=float)
            for chi in characters(G):
                P = pd.period_vector(chi)
                eigen = sum(abs(period(f, P)) ** 2 for f in [ed.eisenstein] + ed.cusp_forms)
                delta = float(np.sum(w * abs(P) ** 2))
                worst = max(worst, abs(eigen - delta) / delta)
                count += 1
    ok = count > 0 and worst <= 1e-10
    record(5, ok, f"{count} (D, N, Omega) triples, worst relative gap {worst:.2e}")
    assert ok


def test_criterion_06_large_level_identity(suite):
    rows = [r for r in suite["rows"]("verify-average") if r.get("mode") == "stable"]
    configs = {(r["D"], r["N"], r["omega"], r["hecke"]) for r in rows}
    has_11 = any(r["D"] == -4 and r["N"] == 11 for r in rows)
    has_order3 = any(r["D"] == -23 and r["N"] == 37 and r["omega_order"] == 3 for r in rows)
    hecke_ok = all(r["N"] >= abs(r["D"]) * int(r["hecke"][2:].split(":")[0]) for r in rows if r["hecke"] != "identity")
    worst = max(max(r["rel_dev"], r["theorem_dev"]) if abs(r["theorem_rhs"]) > 1e-8 else 0.0 for r in rows)
    worst_abs = max(abs(r["theorem_lhs"] - r["theorem_rhs"]) for r in rows)
    ok = len(configs) >= 10 and has_11 and has_order3 and hecke_ok and all(r["passed"] for r in rows) \
        and worst <= 1e-8 and worst_abs <= 1e-8
    record(6, ok, f"{len(configs)} configurations, worst relative deviation {worst:.2e}")
    assert ok


def test_criterion_07_below_stability(suite):
    rows = [r for r in suite["rows"]("verify-average") if r.get("mode") == "regular"]
    pairs = {(r["D"], r["N"]) for r in rows}
    nonzero = [r for r in rows if abs(r["geometric"]) > 1e-8]
    worst = max(r["rel_dev"] for r in nonzero)
    worst_zero = max((r["abs_dev"] for r in rows if abs(r["geometric"]) <= 1e-8), default=0.0)
    ok = len(pairs) >= 3 and all(r["passed"] for r in rows) and worst <= 1e-8 and worst_zero <= 1e-8
    record(7, ok, f"{len(pairs)} (D, N) pairs below stability, worst relative deviation {worst:.2e}")
    assert ok


def test_criterion_08_classical_three_way():
    t0 = time.perf_counter()
    # (a) D = -3, N = 5: empty cusp space and 1 - 12/(3*4) = 0
    fld = make_field(-3)
    G = class_group(fld)
    pd = iota_map(class_set_for_level(5), fld, G)
    rep = spectral_average(eigen_decompose(pd.class_set), pd, characters(G)[0])
    a_ok = classical_lhs(rep, pd) == 0 and classical_rhs(fld, G.h, 5, True) == 0
    # (b) D = -4, N = 11: period route and AFE route against 2/5
    fld = make_field(-4)
    G = class_group(fld)
    chi = characters(G)[0]
    pd = iota_map(class_set_for_level(11), fld, G)
    ed = eigen_decompose(pd.class_set)
    period_route = classical_lhs(spectral_average(ed, pd, chi), pd)
    ref = classical_rhs(fld, G.h, 11, True)
    afe = harness.afe_classical(-4, 11, chi, G, ed)
    dt = time.perf_counter() - t0
    b_ok = ref == Fraction(2, 5) and abs(period_route - 0.4) <= 1e-6 and abs(afe - 0.4) / 0.4 <= 1e-3
    ok = a_ok and b_ok and dt < 300
    record(8, ok, f"(a) {a_ok}; period route {period_route!r}, AFE route {afe!r}, time={dt:.1f}s")
    assert ok


def test_criterion_09_weight_four(suite):
    if not os.path.exists(WEIGHT4):
        record(9, None, "no coefficient file supplied")
        pytest.skip("no weight-4 coefficient file")
    row = suite["rows"]("ingest")[0]
    ok = row["status"] == "ok" and row["weight"] == 4 and row["rel_dev"] <= 1e-3
    record(9, ok, f"level {row['level']} weight {row['weight']} D={row['D']}: AFE {row['afe']!r} vs h = {row['reference']}")
    assert ok


def test_criterion_10_equidistribution_trend(suite):
    rows = suite["rows"]("equidist")
    trend = rows[-1]
    levels = [r["N"] for r in rows[:-1]]
    ok = trend["passed"] and levels == sorted(levels) and max(levels) <= 300
    record(10, ok, f"{trend['shrinking_steps']}/{trend['steps']} steps shrink (need 2/3); mean deviation "
                   f"{trend['early_mean_dev']:.3f} -> {trend['late_mean_dev']:.3f}; limit 3/8")
    assert ok


def test_criterion_11_subconvexity(suite):
    rows = suite["rows"]("subconvexity")
    stable = {(D, N) for D, N, _ in harness.STABLE_GRID}
    below = set(harness.BELOW_GRID)
    pairs = {(r["D"], r["N"]) for r in rows}
    fails = [(r["D"], r["N"], r["omega"]) for r in rows if not r["passed"]]
    C = rows[0]["C"]
    ok = pairs == stable | below and not fails
    record(11, ok, f"{len(rows)} (D, N, Omega) rows, C = {C:.4f}, violations={fails[:5]}")
    assert ok


def test_criterion_12_determinism(suite):
    diffs = []
    for name in SUITE:
        f = name.replace("-", "_") + ".csv"
        with open(os.path.join(suite["one"], f), "rb") as a, open(os.path.join(suite["eight"], f), "rb") as b:
            if a.read() != b.read():
                diffs.append(name)
    ok = not diffs
    record(12, ok, f"{len(SUITE)} CSV files compared, differing={diffs}")
    assert ok
