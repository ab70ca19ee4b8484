"""Imaginary quadratic fields: reduced forms, class groups, class-group characters.

Ideal classes are stored as reduced primitive forms (a, b, c) with b^2 - 4ac = D,
standing for the ideal [a, (-b + sqrt(D))/2].  Characters are kept as exact
angles (fractions of a full turn) so orthogonality checks are exact.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd, isqrt

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp

from .arith import divisors, factor, is_fundamental_discriminant, kronecker, xgcd
from .lattice import hnf


@dataclass(frozen=True)
class QuadField:
    disc: int
    d_abs: int
    u: int
    omega_gen: tuple  # (trace, norm) of (D + sqrt(D))/2

    def __repr__(self):
        return f"QuadField(D={self.disc})"


def make_field(D: int) -> QuadField:
    D = int(D)
    if D >= 0 or not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a negative fundamental discriminant")
    u = {-3: 3, -4: 2}.get(D, 1)
    return QuadField(disc=D, d_abs=-D, u=u, omega_gen=(D, (D * D - D) // 4))


def reduce_form(a: int, b: int, c: int) -> tuple:
    """Reduce a positive definite primitive form to the unique reduced representative."""
    D = b * b - 4 * a * c
    while True:
        if not (-a < b <= a):
            b = (b + a) % (2 * a) - a
            if b == -a:
                b = a
            c = (b * b - D) // (4 * a)
        if a > c:
            a, b, c = c, -b, a
            continue
        if a == c and b < 0:
            b = -b
        return (a, b, c)


def is_reduced(f: tuple) -> bool:
    a, b, c = f
    if not (abs(b) <= a <= c):
        return False
    if (abs(b) == a or a == c) and b < 0:
        return False
    return True


def compose(f1: tuple, f2: tuple) -> tuple:
    """Gauss composition of primitive forms of the same discriminant (reduced output)."""
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, _ = xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = xgcd(s, d)
        y2 = -y2
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return reduce_form(a3, b3, c3)


def inverse_form(f: tuple) -> tuple:
    a, b, c = f
    return reduce_form(a, -b, c)


def reduced_forms(D: int) -> list:
    out = []
    amax = isqrt(-D // 3) + 1
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or gcd(gcd(a, abs(b)), c) != 1:
                continue
            if a == c and b < 0:
                continue
            out.append((a, b, c))
    return out


def principal_form(D: int) -> tuple:
    b = D % 2
    return (1, b, (b * b - D) // 4)


@dataclass(frozen=True)
class ClassGroup:
    field: QuadField
    elements: tuple
    index: dict = field(repr=False)

    @property
    def h(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> tuple:
        return principal_form(self.field.disc)

    def mul(self, f1, f2) -> tuple:
        return compose(f1, f2)

    def inv(self, f) -> tuple:
        return inverse_form(f)

    def pow(self, f, e: int) -> tuple:
        if e < 0:
            f, e = inverse_form(f), -e
        out = self.identity
        base = f
        while e:
            if e & 1:
                out = compose(out, base)
            base = compose(base, base)
            e >>= 1
        return out

    def table(self) -> list:
        """Composition table as index matrix."""
        return [[self.index[compose(x, y)] for y in self.elements] for x in self.elements]

    @cached_property
    def _snf(self):
        """Generators, Smith invariants and coordinates of every element."""
        gens, sub = [], {self.identity}
        for x in self.elements:
            if x not in sub:
                gens.append(x)
                sub = _closure(sub, x)
        if not gens:
            return (), {self.identity: ()}
        # exponent vectors by BFS over generators
        r = len(gens)
        vec = {self.identity: (0,) * r}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for i, g in enumerate(gens):
                    y = compose(x, g)
                    if y not in vec:
                        e = list(vec[x])
                        e[i] += 1
                        vec[y] = tuple(e)
                        nxt.append(y)
            frontier = nxt
        rels = []
        for x, e in vec.items():
            for i, g in enumerate(gens):
                row = list(e)
                row[i] += 1
                tgt = vec[compose(x, g)]
                rels.append([row[j] - tgt[j] for j in range(r)])
        basis = hnf(rels)
        S, _, V = smith_normal_decomp(Matrix(basis), domain=ZZ)
        invariants = [abs(int(S[j, j])) for j in range(r)]
        coords = {}
        for x, e in vec.items():
            f = Matrix([list(e)]) * V
            coords[x] = tuple(int(f[0, j]) % invariants[j] for j in range(r))
        keep = [j for j in range(r) if invariants[j] > 1]
        invariants = tuple(invariants[j] for j in keep)
        coords = {x: tuple(c[j] for j in keep) for x, c in coords.items()}
        return invariants, coords

    @property
    def structure(self) -> tuple:
        return self._snf[0]

    def coordinates(self, f) -> tuple:
        return self._snf[1][reduce_form(*f)]


def _closure(sub: set, g: tuple) -> set:
    """Subgroup generated by the subgroup sub and g (abelian)."""
    out = set(sub)
    power = compose(g, principal_form(g[1] * g[1] - 4 * g[0] * g[2]))
    while power not in sub:
        out.update(compose(x, power) for x in sub)
        power = compose(power, g)
    return out


def class_group(fld: QuadField) -> ClassGroup:
    forms = reduced_forms(fld.disc)
    forms.sort(key=lambda f: (f[0], abs(f[1]), -f[1]))
    return ClassGroup(field=fld, elements=tuple(forms), index={f: i for i, f in enumerate(forms)})


@dataclass(frozen=True)
class ClassCharacter:
    group: ClassGroup = field(repr=False)
    exps: tuple  # character index k in prod Z/d_j
    weight_m: int = 0
    conductor_c: int = 1

    def angle(self, f) -> Fraction:
        coords = self.group.coordinates(f)
        t = sum(Fraction(k * c, d) for k, c, d in zip(self.exps, coords, self.group.structure))
        return t - (t.numerator // t.denominator)

    def __call__(self, f) -> complex:
        t = self.angle(f)
        if t == 0:
            return 1.0 + 0j
        return cmath.exp(2j * cmath.pi * float(t))

    @property
    def values(self) -> dict:
        return {f: self(f) for f in self.group.elements}

    @property
    def order(self) -> int:
        out = 1
        for f in self.group.elements:
            q = self.angle(f).denominator
            out = out * q // gcd(out, q)
        return out

    @property
    def is_trivial(self) -> bool:
        return all(self.angle(f) == 0 for f in self.group.elements)

    @property
    def is_quadratic(self) -> bool:
        return self.order <= 2

    def conj(self) -> "ClassCharacter":
        exps = tuple((-k) % d for k, d in zip(self.exps, self.group.structure))
        return ClassCharacter(self.group, exps, self.weight_m, self.conductor_c)


def characters(group: ClassGroup) -> list:
    inv = group.structure
    out = [()]
    for d in inv:
        out = [e + (k,) for e in out for k in range(d)]
    return [ClassCharacter(group, e) for e in out]


def trivial_character(group: ClassGroup) -> ClassCharacter:
    return ClassCharacter(group, (0,) * len(group.structure))


def character_of_order(group: ClassGroup, order: int) -> ClassCharacter:
    for chi in characters(group):
        if chi.order == order:
            return chi
    raise ValueError(f"no character of order {order} on a group with structure {group.structure}")


def eta(fld: QuadField, n: int) -> int:
    if n == 0:
        raise ValueError("eta(0) undefined")
    return kronecker(fld.disc, n)


def sigma_common_divisors(a: int, b: int) -> int:
    if a < 1 or b < 1:
        raise ValueError("positive integers required")
    return len(divisors(gcd(a, b)))


def primitive_ideals_of_norm(D: int, a: int) -> list:
    """Forms (a, b, c) with b mod 2a, b^2 = D mod 4a: the primitive ideals of norm a."""
    out = []
    for b in range(-a + 1, a + 1):
        if (b * b - D) % (4 * a) == 0:
            out.append((a, b, (b * b - D) // (4 * a)))
    return out


def ideals_of_norm(fld: QuadField, n: int) -> dict:
    """Multiset {reduced class: number of integral ideals of norm n in it}."""
    if n < 1:
        raise ValueError("n must be positive")
    D = fld.disc
    out: dict = {}
    for m in divisors(n):
        if (n // m) % m:
            continue
        a = n // (m * m)
        for f in primitive_ideals_of_norm(D, a):
            key = reduce_form(*f)
            out[key] = out.get(key, 0) + 1
    return out


def count_ideals_of_norm(fld: QuadField, n: int) -> int:
    """|R_E(n)| from the prime-by-prime rule."""
    out = 1
    for p, e in factor(n).items():
        k = kronecker(fld.disc, p)
        if k == 1:
            out *= e + 1
        elif k == -1:
            out *= 1 if e % 2 == 0 else 0
    return out


def prime_ideal_class(fld: QuadField, p: int) -> tuple:
    """Class of one prime ideal above a split or ramified prime p."""
    forms = primitive_ideals_of_norm(fld.disc, p)
    if not forms:
        raise ValueError(f"{p} is inert in Q(sqrt({fld.disc}))")
    return reduce_form(*forms[0])


def theta_coefficients(chi: ClassCharacter, n_max: int) -> list:
    fld = chi.group.field
    out = []
    for n in range(1, n_max + 1):
        s = sum(mult * chi(f) for f, mult in ideals_of_norm(fld, n).items())
        out.append(s)
    return out


def analytic_class_number(D: int, terms: int = 10**6, inv=None) -> float:
    """u sqrt|D| S / pi with S the partial sum of chi_D(n)/n."""
    import numpy as np

    q = -D
    chi = np.array([kronecker(D, r) for r in range(q)], dtype=float)
    if inv is None:
        inv = 1.0 / np.arange(1, terms + 1, dtype=float)
    pad = (-len(inv)) % q
    block = np.concatenate([inv, np.zeros(pad)]).reshape(-1, q).sum(axis=0)
    # block[j] collects 1/n with n = j + 1 mod q
    S = float(np.dot(np.roll(chi, -1), block))
    u = {-3: 3, -4: 2}.get(D, 1)
    return u * np.sqrt(q) * S / np.pi
