"""Embedding of O_E in a maximal order and the map iota : Pic(E) -> X."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import kronecker, prime_divisors
from .lattice import short_vectors
from .qfield import ClassCharacter, ClassGroup, QuadField
from .quatorder import ClassSet, Order, integral_gram, left_order, make_right_ideal, right_ideal_classes


@dataclass(frozen=True)
class Embedding:
    y: tuple  # quaternion with trd = t, nrd = n, t^2 - 4n = D
    t: int
    n: int
    field: QuadField

    @property
    def sqrt_D(self) -> tuple:
        """Image of sqrt(D) = 2y - t."""
        return tuple(2 * c - (self.t if i == 0 else 0) for i, c in enumerate(self.y))


def check_admissible(fld: QuadField, N: int) -> None:
    bad = [p for p in prime_divisors(N) if kronecker(fld.disc, p) != -1]
    if bad:
        raise ValueError(f"primes {bad} dividing N={N} are not inert in Q(sqrt({fld.disc}))")


def _candidates(O: Order, fld: QuadField):
    t = fld.disc % 2
    n = (t * t - fld.disc) // 4
    T = integral_gram(O.lattice, 1)
    out = []
    for x, _ in sorted(short_vectors(T, 2 * n, exact=True)):
        y = tuple(sum(x[r] * O.basis[r][c] for r in range(4)) for c in range(4))
        if O.alg.trd(y) == t and O.alg.nrd(y) == n:
            out.append(y)
    return t, n, out


def optimal_embedding(O: Order, fld: QuadField) -> Embedding | None:
    """An element y of O generating O_E = Z[y]; None if O has no such element."""
    check_admissible(fld, O.alg.N)
    t, n, cands = _candidates(O, fld)
    if not cands:
        return None
    # Z[y] is already the maximal order of E, so the embedding is optimal
    return Embedding(cands[0], t, n, fld)


def embedded_class_set(cs: ClassSet, fld: QuadField) -> tuple:
    """A class set whose base order contains O_E, plus the embedding.

    Tries the base order first, then the left orders of the representatives in order.
    Returns (class set, embedding, index of the representative used or -1).
    """
    emb = optimal_embedding(cs.order, fld)
    if emb is not None:
        return cs, emb, -1
    for idx, I in enumerate(cs.reps):
        O2 = left_order(I)
        emb = optimal_embedding(O2, fld)
        if emb is not None:
            return right_ideal_classes(O2), emb, idx
    raise RuntimeError("no maximal order type contains O_E; check admissibility")


def ideal_image(cs: ClassSet, emb: Embedding, form: tuple):
    """The right ideal aR for a = [A, (-B + sqrt D)/2]."""
    A, B, _ = form
    phi = tuple(Fraction(-B - emb.t, 2) * (1 if i == 0 else 0) + c for i, c in enumerate(emb.y))
    gen_a = (Fraction(A), Fraction(0), Fraction(0), Fraction(0))
    return make_right_ideal(cs.order, [gen_a, phi])


@dataclass
class PeriodData:
    class_set: ClassSet
    embedding: Embedding
    group: ClassGroup
    iota: dict  # reduced form -> class index
    rebased_from: int = -1

    def period_vector(self, chi: ClassCharacter) -> np.ndarray:
        P = np.zeros(len(self.class_set), dtype=complex)
        for f, x in self.iota.items():
            P[x] += chi(f)
        return P

    @property
    def injective(self) -> bool:
        return len(set(self.iota.values())) == len(self.iota)

    def metadata(self) -> dict:
        return {
            "embedding_y": [str(c) for c in self.embedding.y],
            "trace": self.embedding.t,
            "norm": self.embedding.n,
            "algebra": [self.class_set.alg.a, self.class_set.alg.b],
            "base_order_from_rep": self.rebased_from,
            "iota": {str(k): v for k, v in self.iota.items()},
        }


def iota_map(cs: ClassSet, fld: QuadField, group: ClassGroup) -> PeriodData:
    cs2, emb, idx = embedded_class_set(cs, fld)
    iota = {}
    for f in group.elements:
        I = ideal_image(cs2, emb, f)
        iota[f] = cs2.classify(I)
    return PeriodData(cs2, emb, group, iota, idx)


def period_vector(pd: PeriodData, chi: ClassCharacter) -> np.ndarray:
    return pd.period_vector(chi)


def alternate_representative(form: tuple) -> tuple:
    """A different (non-reduced) form in the same class, for representative-independence checks."""
    a, b, c = form
    return (a, b + 2 * a, a + b + c)
