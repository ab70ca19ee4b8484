"""Integer lattice utilities: Hermite normal form, LLL on Gram matrices, short vectors.

Everything here is exact except the Fincke-Pohst pruning, which uses floats only to
bound the search box; every emitted vector carries its exact integer norm.
"""
from __future__ import annotations

from fractions import Fraction
from math import floor, ceil, sqrt

import numpy as np


def hnf(rows) -> list:
    """Row-style Hermite normal form of the Z-span of integer rows (zero rows dropped)."""
    A = [list(map(int, r)) for r in rows if any(r)]
    if not A:
        return []
    n = len(A[0])
    basis = []
    for col in range(n):
        nz = [r for r in A if r[col] != 0]
        rest = [r for r in A if r[col] == 0]
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            new = [p]
            for r in nz[1:]:
                q = r[col] // p[col]
                r2 = [x - q * y for x, y in zip(r, p)]
                if r2[col] != 0:
                    new.append(r2)
                elif any(r2):
                    rest.append(r2)
            nz = new
        if nz:
            p = nz[0]
            if p[col] < 0:
                p = [-x for x in p]
            basis.append((col, p))
        A = rest
    out = [p for _, p in basis]
    for i, (col, p) in enumerate(basis):
        for j in range(i):
            q = out[j][col] // p[col]
            if q:
                out[j] = [x - q * y for x, y in zip(out[j], p)]
    return out


def rational_hnf(vectors) -> tuple:
    """HNF basis of the Z-span of rational vectors, returned as (integer rows, denominator)."""
    den = 1
    for v in vectors:
        for x in v:
            x = Fraction(x)
            den = den * x.denominator // np.gcd(den, x.denominator)
    rows = [[int(Fraction(x) * den) for x in v] for v in vectors]
    return hnf(rows), den


def lll_gram(G, delta=Fraction(3, 4)):
    """LLL-reduce a positive definite Gram matrix exactly.

    Returns (U, G') with U unimodular integer rows and G' = U G U^T.  Integer input
    stays integer; the Gram matrix is updated in place for each basis operation.
    """
    n = len(G)
    integral = all(Fraction(x).denominator == 1 for row in G for x in row)
    conv = int if integral else Fraction
    G = [[conv(G[i][j]) for j in range(n)] for i in range(n)]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        B = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                s = G[i][j] - sum(mu[j][k] * mu[i][k] * B[k] for k in range(j))
                mu[i][j] = Fraction(s) / B[j]
            B[i] = G[i][i] - sum(mu[i][k] ** 2 * B[k] for k in range(i))
        return mu, B

    def sub(k, j, q):
        # b_k <- b_k - q b_j
        U[k] = [a - q * b for a, b in zip(U[k], U[j])]
        gkk = G[k][k] - 2 * q * G[k][j] + q * q * G[j][j]
        for i in range(n):
            G[k][i] -= q * G[j][i]
        for i in range(n):
            G[i][k] = G[k][i]
        G[k][k] = gkk

    def swap(k):
        U[k], U[k - 1] = U[k - 1], U[k]
        G[k], G[k - 1] = G[k - 1], G[k]
        for row in G:
            row[k], row[k - 1] = row[k - 1], row[k]

    k = 1
    mu, B = gso()
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                sub(k, j, q)
                mu, B = gso()
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            swap(k)
            mu, B = gso()
            k = max(k - 1, 1)
    return U, G


def short_vectors(G, bound, exact=False, lower=0, reduce=True):
    """All integer x with lower <= x^T G x <= bound (or == bound if exact).

    G is an integer (or Fraction) positive definite Gram matrix.  Returns a list of
    (x tuple, norm) with exact norms.  Both x and -x are included.  The search runs
    on an LLL-reduced Gram matrix: on badly conditioned input the float bounds of
    the enumeration can otherwise lose vectors.
    """
    n = len(G)
    if reduce and n > 1:
        U, Gr = lll_gram(G)
        found = short_vectors(Gr, bound, exact, lower, reduce=False)
        return [(tuple(sum(y[i] * U[i][j] for i in range(n)) for j in range(n)), nrm) for y, nrm in found]
    Gf = np.array([[float(G[i][j]) for j in range(n)] for i in range(n)])
    # Fincke-Pohst quadratic form decomposition
    Q = Gf.copy()
    for i in range(n):
        for j in range(i + 1, n):
            Q[j][i] = Q[i][j]
            Q[i][j] = Q[i][j] / Q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                Q[k][l] -= Q[k][i] * Q[i][l]
    Gi = [[G[i][j] for j in range(n)] for i in range(n)]
    eps = 1e-9 * max(1.0, float(bound))
    out = []
    x = [0] * n
    b = float(bound) + eps

    def rec(i, remaining):
        c = -sum(Q[i][j] * x[j] for j in range(i + 1, n))
        r = sqrt(max(remaining, 0.0) / Q[i][i])
        lo, hi = ceil(c - r - 1e-12), floor(c + r + 1e-12)
        for xi in range(lo, hi + 1):
            x[i] = xi
            t = remaining - Q[i][i] * (xi - c) ** 2
            if t < -eps:
                continue
            if i == 0:
                nrm = 0
                for a in range(n):
                    if x[a]:
                        row = Gi[a]
                        nrm += x[a] * sum(row[bb] * x[bb] for bb in range(n))
                if nrm <= bound and nrm >= lower and (not exact or nrm == bound):
                    out.append((tuple(x), nrm))
            else:
                rec(i - 1, t)
        x[i] = 0

    rec(n - 1, b)
    return out


def theta_counts(G, nmax):
    """Counts c[t] = #{x : x^T G x = t} for t = 0..nmax (integer Gram)."""
    counts = [0] * (int(nmax) + 1)
    for _, nrm in short_vectors(G, nmax):
        counts[int(nrm)] += 1
    return counts


def gram_det(G) -> Fraction:
    from sympy import Matrix

    return Fraction(str(Matrix([[Fraction(v) for v in row] for row in G]).det()))
