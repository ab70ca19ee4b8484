"""Definite quaternion algebras over Q, maximal orders, right-ideal classes, Brandt matrices.

Quaternions are 4-tuples of Fractions in the basis 1, i, j, k with i^2 = a, j^2 = b,
k = ij.  Lattices are stored in Hermite normal form as integer rows over a common
denominator.  Right ideals I and J are equivalent when J = alpha I; this is decided
by looking for a vector of normalized norm 1 in J * conj(I).
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, isqrt

import numpy as np
from sympy import primerange

from .arith import factor, hilbert_symbol, is_squarefree, prime_divisors, sigma1
from .lattice import hnf, lll_gram, short_vectors


# ---------------------------------------------------------------- algebra

@dataclass(frozen=True)
class QuaternionAlgebra:
    a: int
    b: int
    ram_finite: tuple

    @property
    def N(self) -> int:
        out = 1
        for p in self.ram_finite:
            out *= p
        return out

    def mul(self, x, y) -> tuple:
        a, b = self.a, self.b
        x0, x1, x2, x3 = x
        y0, y1, y2, y3 = y
        return (
            x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
            x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
            x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        )

    @staticmethod
    def conj(x) -> tuple:
        return (x[0], -x[1], -x[2], -x[3])

    def nrd(self, x):
        return x[0] * x[0] - self.a * x[1] * x[1] - self.b * x[2] * x[2] + self.a * self.b * x[3] * x[3]

    @staticmethod
    def trd(x):
        return 2 * x[0]

    @property
    def trace_diag(self) -> tuple:
        """Diagonal of the form trd(x conj(y)) in the standard basis."""
        return (2, -2 * self.a, -2 * self.b, 2 * self.a * self.b)


def ramified_primes(a: int, b: int) -> tuple:
    primes = set(prime_divisors(2 * a * b))
    return tuple(sorted(p for p in primes if hilbert_symbol(a, b, p) == -1))


def _presentation_candidates(N: int):
    small = [1, 2] + list(primerange(3, 400))
    for bmul in [1] + list(primerange(2, 60)):
        bb = -N * bmul
        for q in small:
            yield -q, bb


def build_algebra(N: int) -> QuaternionAlgebra:
    """Definite algebra ramified exactly at the primes of N (and infinity)."""
    N = int(N)
    if N < 1 or not is_squarefree(N):
        raise ValueError(f"level {N} must be a squarefree positive integer")
    primes = tuple(prime_divisors(N))
    if len(primes) % 2 == 0:
        raise ValueError(f"level {N} has an even number of prime factors; no definite algebra has this discriminant")
    for a, b in _presentation_candidates(N):
        if hilbert_symbol(a, b, "inf") != -1:
            continue
        if ramified_primes(a, b) == primes:
            return QuaternionAlgebra(a, b, primes)
    raise RuntimeError(f"no presentation found for N={N}")


# ---------------------------------------------------------------- lattices

def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass(frozen=True)
class Lattice:
    """Z-lattice of rank 4 in B: basis rows/den in the standard coordinates."""
    alg: QuaternionAlgebra = field(repr=False, compare=False, hash=False)
    rows: tuple
    den: int

    @classmethod
    def from_vectors(cls, alg, vectors) -> "Lattice":
        den = 1
        for v in vectors:
            for x in v:
                den = _lcm(den, Fraction(x).denominator)
        rows = hnf([[int(Fraction(x) * den) for x in v] for v in vectors])
        if len(rows) != 4:
            raise ValueError("vectors do not span a rank-4 lattice")
        g = 0
        for r in rows:
            for x in r:
                g = gcd(g, x)
        g = gcd(g, den)
        if g > 1:
            rows = hnf([[x // g for x in r] for r in rows])
            den //= g
        return cls(alg, tuple(tuple(r) for r in rows), den)

    @cached_property
    def basis(self) -> tuple:
        return tuple(tuple(Fraction(x, self.den) for x in r) for r in self.rows)

    @property
    def key(self) -> tuple:
        return (self.rows, self.den)

    @cached_property
    def det(self) -> Fraction:
        """Determinant of the basis matrix (positive: HNF is upper triangular)."""
        out = Fraction(1)
        for i in range(4):
            out *= Fraction(self.rows[i][i], self.den)
        return abs(out)

    def contains(self, x) -> bool:
        # solve upper triangular system
        v = [Fraction(t) * self.den for t in x]
        for i in range(4):
            piv = self.rows[i][i]
            c = v[i] / piv
            if c.denominator != 1:
                return False
            for t in range(4):
                v[t] -= c * self.rows[i][t]
        return all(t == 0 for t in v)

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(x) for x in other.basis)

    def mul(self, other: "Lattice") -> "Lattice":
        m = self.alg.mul
        return Lattice.from_vectors(self.alg, [m(x, y) for x in self.basis for y in other.basis])

    def conj(self) -> "Lattice":
        return Lattice.from_vectors(self.alg, [self.alg.conj(x) for x in self.basis])

    def scale(self, c) -> "Lattice":
        c = Fraction(c)
        return Lattice.from_vectors(self.alg, [tuple(c * t for t in x) for x in self.basis])

    def trace_gram(self, scale=1) -> list:
        """Gram matrix of trd(x conj(y)) / scale on the basis."""
        d = self.alg.trace_diag
        B = self.basis
        s = Fraction(scale)
        return [[sum(d[t] * B[r][t] * B[c][t] for t in range(4)) / s for c in range(4)] for r in range(4)]

    def norm_values_integral(self) -> bool:
        nrd = self.alg.nrd
        B = self.basis
        if any(Fraction(nrd(x)).denominator != 1 for x in B):
            return False
        T = self.trace_gram()
        return all(T[r][c].denominator == 1 for r in range(4) for c in range(4)) and all(
            Fraction(self.alg.trd(x)).denominator == 1 for x in B
        )


def integral_gram(L: Lattice, scale) -> list:
    T = L.trace_gram(scale)
    for row in T:
        for x in row:
            if x.denominator != 1:
                raise ValueError("normalized trace form is not integral")
    return [[int(x) for x in row] for row in T]


def reduced_gram(L: Lattice, scale) -> list:
    T = integral_gram(L, scale)
    _, Tr = lll_gram(T)
    return [[int(x) for x in row] for row in Tr]


# ---------------------------------------------------------------- orders

@dataclass(frozen=True)
class Order:
    lattice: Lattice

    @property
    def alg(self) -> QuaternionAlgebra:
        return self.lattice.alg

    @property
    def basis(self) -> tuple:
        return self.lattice.basis

    @cached_property
    def gram(self) -> list:
        """Trace-form Gram matrix trd(x conj y) on the basis."""
        return self.lattice.trace_gram()

    @cached_property
    def discriminant(self) -> int:
        from .lattice import gram_det

        d2 = abs(gram_det(self.gram))
        r = isqrt(int(d2))
        if r * r != d2:
            raise ValueError("trace pairing determinant is not a square")
        return r

    def is_order(self) -> bool:
        L = self.lattice
        if not L.contains((1, 0, 0, 0)):
            return False
        m = self.alg.mul
        return all(L.contains(m(x, y)) for x in L.basis for y in L.basis) and L.norm_values_integral()


def _ring_generated(alg, basis, extra) -> Lattice | None:
    L = Lattice.from_vectors(alg, list(basis) + [extra])
    for _ in range(8):
        prods = [alg.mul(x, y) for x in L.basis for y in L.basis]
        L2 = Lattice.from_vectors(alg, list(L.basis) + prods)
        if L2.key == L.key:
            return L
        L = L2
        if not L.norm_values_integral():
            return None
    return None


def _enlarge_at(order: Order, p: int) -> Order | None:
    alg = order.alg
    B = order.basis
    T = order.gram
    den = 1
    for row in T:
        for x in row:
            den = _lcm(den, x.denominator)
    Ti = np.array([[int(x * den) for x in row] for row in T], dtype=object)
    tr = [alg.trd(x) for x in B]
    grid = np.array(np.meshgrid(*[np.arange(p)] * 4, indexing="ij")).reshape(4, -1).T
    grid = grid[1:]
    # conditions on y = x/p: trd(y) integral, nrd(y) integral
    trv = grid.astype(object) @ np.array(tr, dtype=object)
    ok_tr = np.array([Fraction(t) % p == 0 for t in trv])
    cand = grid[ok_tr]
    if len(cand) == 0:
        return None
    q = np.einsum("ni,ij,nj->n", cand.astype(object), Ti, cand.astype(object))
    # x^T T x = 2 nrd(x) * den ; need nrd(x) = 0 mod p^2
    ok = np.array([(Fraction(int(v), 2 * den)) % (p * p) == 0 for v in q])
    for c in cand[ok]:
        y = tuple(sum(Fraction(int(c[r]), p) * B[r][t] for r in range(4)) for t in range(4))
        L = _ring_generated(alg, B, y)
        if L is not None and L.key != order.lattice.key:
            O2 = Order(L)
            if O2.is_order():
                return O2
    return None


def maximal_order(alg: QuaternionAlgebra) -> Order:
    one = (Fraction(1), Fraction(0), Fraction(0), Fraction(0))
    std = [tuple(Fraction(int(r == c)) for c in range(4)) for r in range(4)]
    O = Order(Lattice.from_vectors(alg, std))
    target = alg.N
    while O.discriminant != target:
        excess = O.discriminant // target
        if O.discriminant % target:
            raise RuntimeError("order discriminant not divisible by the level")
        for p in prime_divisors(excess):
            O2 = _enlarge_at(O, p)
            if O2 is not None:
                O = O2
                break
        else:
            raise RuntimeError(f"could not enlarge order of discriminant {O.discriminant}")
    assert O.lattice.contains(one)
    return O


# ---------------------------------------------------------------- ideals

@dataclass(frozen=True)
class RightIdeal:
    lattice: Lattice
    norm: Fraction  # reduced norm nrd(I)

    @property
    def alg(self):
        return self.lattice.alg


def ideal_norm(L: Lattice, O: Order) -> Fraction:
    """nrd(I) = sqrt(covol(I)/covol(O))."""
    r = L.det / O.lattice.det
    num, den = isqrt(r.numerator), isqrt(r.denominator)
    if num * num != r.numerator or den * den != r.denominator:
        raise ValueError("ideal index is not a square")
    return Fraction(num, den)


def make_right_ideal(O: Order, gens) -> RightIdeal:
    alg = O.alg
    vecs = [alg.mul(g, x) for g in gens for x in O.basis]
    L = Lattice.from_vectors(alg, vecs)
    return RightIdeal(L, ideal_norm(L, O))


def left_order(I: RightIdeal) -> Order:
    L = I.lattice.mul(I.lattice.conj()).scale(1 / I.norm)
    return Order(L)


def _unit_count(O: Order) -> int:
    T = integral_gram(O.lattice, 1)
    return len(short_vectors(T, 2, exact=True))


def equivalence_element(I: RightIdeal, J: RightIdeal):
    """Return alpha with alpha I = J, or None."""
    L = J.lattice.mul(I.lattice.conj())
    s = I.norm * J.norm
    T = integral_gram(L, s)
    U, Tr = lll_gram(T)
    vecs = short_vectors([[int(x) for x in r] for r in Tr], 2, exact=True)
    if not vecs:
        return None
    x, _ = vecs[0]
    coeff = [sum(x[r] * U[r][c] for r in range(4)) for c in range(4)]
    beta = tuple(sum(coeff[r] * L.basis[r][t] for r in range(4)) for t in range(4))
    return tuple(t / I.norm for t in beta)


def _theta_invariant(I: RightIdeal, nmax: int = 6) -> tuple:
    T = reduced_gram(I.lattice, I.norm)
    counts = [0] * (nmax + 1)
    for _, nrm in short_vectors(T, nmax):
        counts[nrm] += 1
    return tuple(counts)


def neighbors(I: RightIdeal, O: Order, ell: int) -> list:
    """Right ideals J in I with nrd(J) = ell nrd(I), i.e. the ell-neighbors."""
    alg = O.alg
    B = I.lattice.basis
    out, seen = [], set()
    ellI = [tuple(ell * t for t in x) for x in B]
    for c in np.array(np.meshgrid(*[np.arange(ell)] * 4, indexing="ij")).reshape(4, -1).T[1:]:
        x = tuple(sum(int(c[r]) * B[r][t] for r in range(4)) for t in range(4))
        if (alg.nrd(x) / I.norm) % ell:
            continue
        vecs = [alg.mul(x, y) for y in O.basis] + ellI
        L = Lattice.from_vectors(alg, vecs)
        if L.key in seen:
            continue
        nrm = ideal_norm(L, O)
        if nrm != I.norm * ell:
            continue
        seen.add(L.key)
        out.append(RightIdeal(L, nrm))
    return out


def mass(N: int) -> Fraction:
    out = Fraction(1, 12)
    for p in prime_divisors(N):
        out *= p - 1
    return out


@dataclass
class ClassSet:
    order: Order
    reps: list
    weights: list
    n_level: int
    aux_prime: int
    _theta: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.reps)

    @property
    def alg(self):
        return self.order.alg

    @property
    def mass(self) -> Fraction:
        return sum(Fraction(1, w) for w in self.weights)

    def classify(self, I: RightIdeal) -> int:
        inv = _theta_invariant(I)
        for idx, J in enumerate(self.reps):
            if self._invariants[idx] == inv and equivalence_element(J, I) is not None:
                return idx
        raise RuntimeError("ideal not equivalent to any representative")

    @cached_property
    def _invariants(self) -> list:
        return [_theta_invariant(J) for J in self.reps]

    def _pair_gram(self, i: int, j: int) -> list:
        L = self.reps[i].lattice.mul(self.reps[j].lattice.conj())
        return reduced_gram(L, self.reps[i].norm * self.reps[j].norm)

    def theta_series(self, i: int, j: int, nmax: int) -> list:
        """Counts of beta in I_i conj(I_j) with nrd(beta)/(nrd I_i nrd I_j) = t, t <= nmax."""
        key = (min(i, j), max(i, j))
        have = self._theta.get(key)
        if have is None or len(have) <= nmax:
            T = self._pair_gram(*key)
            counts = [0] * (nmax + 1)
            for _, nrm in short_vectors(T, 2 * nmax):
                if nrm % 2 == 0:
                    counts[nrm // 2] += 1
            self._theta[key] = counts
            have = counts
        return have[: nmax + 1]

    def brandt_matrix(self, m: int) -> np.ndarray:
        return self.brandt_matrices(m)[m]

    def brandt_matrices(self, mmax: int) -> dict:
        h = len(self.reps)
        out = {m: np.zeros((h, h), dtype=np.int64) for m in range(1, mmax + 1)}
        for i in range(h):
            for j in range(i, h):
                th = self.theta_series(i, j, mmax)
                for m in range(1, mmax + 1):
                    cij, r1 = divmod(th[m], 2 * self.weights[j])
                    cji, r2 = divmod(th[m], 2 * self.weights[i])
                    if r1 or r2:
                        raise RuntimeError("non-integral Brandt entry")
                    out[m][i, j] = cij
                    out[m][j, i] = cji
        return out

    def to_json(self) -> dict:
        return {
            "a": self.alg.a, "b": self.alg.b, "N": self.n_level, "aux_prime": self.aux_prime,
            "order": [list(self.order.lattice.rows), self.order.lattice.den],
            "reps": [[list(I.lattice.rows), I.lattice.den, str(I.norm)] for I in self.reps],
            "weights": list(self.weights),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ClassSet":
        alg = QuaternionAlgebra(data["a"], data["b"], tuple(prime_divisors(data["N"])))
        rows, den = data["order"]
        O = Order(Lattice(alg, tuple(tuple(r) for r in rows), den))
        reps = [RightIdeal(Lattice(alg, tuple(tuple(r) for r in rws), d), Fraction(nm)) for rws, d, nm in data["reps"]]
        return cls(O, reps, list(data["weights"]), data["N"], data["aux_prime"])


def right_ideal_classes(O: Order, max_reps: int = 10000) -> ClassSet:
    N = O.alg.N
    ell = next(p for p in primerange(2, 100) if N % p)
    target = mass(N)
    one = (Fraction(1), Fraction(0), Fraction(0), Fraction(0))
    R = make_right_ideal(O, [one])
    reps = [R]
    invs = [_theta_invariant(R)]
    weights = [_unit_count(left_order(R)) // 2]
    total = Fraction(1, weights[0])
    queue = [R]
    while queue and total < target:
        I = queue.pop(0)
        for J in neighbors(I, O, ell):
            inv = _theta_invariant(J)
            if any(invs[t] == inv and equivalence_element(reps[t], J) is not None for t in range(len(reps))):
                continue
            reps.append(J)
            invs.append(inv)
            w = _unit_count(left_order(J)) // 2
            weights.append(w)
            total += Fraction(1, w)
            queue.append(J)
            if total >= target or len(reps) > max_reps:
                break
    if total != target:
        raise RuntimeError(f"class enumeration stopped with mass {total} != {target}")
    cs = ClassSet(O, reps, weights, N, ell)
    cs.__dict__["_invariants"] = invs
    return cs


# ---------------------------------------------------------------- cache and entry point

def class_set_for_level(N: int, cache_dir: str | None = None) -> ClassSet:
    alg = build_algebra(N)
    path = None
    if cache_dir:
        path = os.path.join(cache_dir, f"classset_N{N}_a{alg.a}_b{alg.b}.json")
        if os.path.exists(path):
            with open(path) as fh:
                return ClassSet.from_json(json.load(fh))
    cs = right_ideal_classes(maximal_order(alg))
    if path:
        os.makedirs(cache_dir, exist_ok=True)
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(cs.to_json(), fh)
        os.replace(tmp, path)
    return cs


def rebase(cs: ClassSet, idx: int) -> ClassSet:
    """Class set of right ideals of the left order of representative idx."""
    O = left_order(cs.reps[idx])
    return right_ideal_classes(O)


__all__ = [
    "QuaternionAlgebra", "build_algebra", "Lattice", "Order", "maximal_order", "RightIdeal",
    "make_right_ideal", "left_order", "equivalence_element", "neighbors", "ClassSet",
    "right_ideal_classes", "class_set_for_level", "mass", "rebase", "sigma1",
]
