"""Write q-expansion coefficients of an eta product newform in the ingestion format.

    python tools/make_eta_fixture.py 5 4 4 500 tests/data/level5_weight4.txt

gives eta(z)^4 eta(5z)^4, the newform of level 5 and weight 4.
"""
import sys

import numpy as np


def eta_product(level: int, e1: int, e2: int, nmax: int) -> list:
    """Coefficients a_1..a_nmax of q * prod (1 - q^n)^e1 (1 - q^(level n))^e2 (needs e1 + level e2 = 24)."""
    if e1 + level * e2 != 24:
        raise ValueError("the q-power must be exactly 1")
    ser = np.zeros(nmax, dtype=object)
    ser[0] = 1  # exponent shifted by the leading q
    for step, e in ((1, e1), (level, e2)):
        for n in range(step, nmax, step):
            for _ in range(e):
                # multiply by (1 - q^n)
                ser[n:] = ser[n:] - ser[: nmax - n]
    return [int(x) for x in ser]


def main(argv):
    level, e1, e2, nmax, path = int(argv[0]), int(argv[1]), int(argv[2]), int(argv[3]), argv[4]
    weight = (e1 + e2) // 2
    a = eta_product(level, e1, e2, nmax)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# eta(z)^{e1} eta({level}z)^{e2}\n")
        fh.write(f"level {level} weight {weight} label eta{e1}_{level}_{e2}\n")
        for n, c in enumerate(a, 1):
            fh.write(f"{n},{c}\n")


if __name__ == "__main__":
    main(sys.argv[1:])
