"""Geometric side: irregular terms, the finite regular support and its explicit sum.

Over Q the regular orbital terms are indexed by integers n in N Z with -d < n < 0
(d = |D| times the conductor and Hecke-support factors), subject to the local
condition that 1 + d/n is a norm from E_p for every p | D.  A term is

    |R_E(|n|/N)| sigma(d, n + d) sum_(a in R_E(n + d)) Omega(D^-1 a) P_(k,m)(n / (n + d)),

with R_E(m) the multiset of integral ideals of norm m.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, sqrt

from .arith import euler_phi, hilbert_symbol, is_squarefree, kronecker, prime_divisors
from .heckemeasure import HeckeElement, i_tilde
from .qfield import (ClassCharacter, ClassGroup, count_ideals_of_norm, ideals_of_norm,
                     primitive_ideals_of_norm, reduce_form, sigma_common_divisors)


def pkm_eval(k: int, m: int, xi):
    """P_(k,m)(xi) = (1 - xi)^(1-k) sum_i C(k+m-1, i) C(k-m-1, i) (-xi)^i; exact for rational xi."""
    if k < 1 or abs(m) >= k:
        raise ValueError("need k >= 1 and |m| < k")
    exact = isinstance(xi, (int, Fraction))
    x = Fraction(xi) if exact else float(xi)
    if x >= 1:
        raise ValueError("P_(k,m) is evaluated at xi < 1")
    s = sum(comb(k + m - 1, i) * comb(k - m - 1, i) * (-x) ** i for i in range(k - abs(m)))
    return s / (1 - x) ** (k - 1)


@dataclass
class GeomConfig:
    N: int
    group: ClassGroup
    chi: ClassCharacter
    k: int = 1
    m: int = 0
    f: HeckeElement | None = None

    def __post_init__(self):
        if abs(self.m) >= self.k:
            raise ValueError("need |m| < k")
        if not is_squarefree(self.N) or len(prime_divisors(self.N)) % 2 == 0:
            raise ValueError("N must be squarefree with an odd number of prime factors")
        D = self.group.field.disc
        bad = [p for p in prime_divisors(self.N) if kronecker(D, p) != -1]
        if bad:
            raise ValueError(f"primes {bad} dividing N are not inert in E")
        if self.f is not None and self.N % self.f.q == 0:
            raise ValueError("the Hecke prime must not divide N")

    @property
    def D(self) -> int:
        return self.group.field.disc

    @property
    def d(self) -> int:
        return self.group.field.d_abs

    @property
    def support_norm(self) -> int:
        """|I(f_p)| = p^deg f_p."""
        return 1 if self.f is None else self.f.q ** self.f.degree

    @property
    def d_eff(self) -> int:
        return self.d * self.chi.conductor_c * self.support_norm

    @property
    def stable(self) -> bool:
        return self.N >= self.d_eff


def stability_threshold(cfg: GeomConfig) -> int:
    return cfg.d_eff


def local_condition(cfg: GeomConfig, n: int) -> bool:
    """1 + d/n is a local norm from E at every p | D, via (1 + d/n, D)_p = 1."""
    x = 1 + Fraction(cfg.d, n)
    return all(hilbert_symbol(x, cfg.D, p) == 1 for p in prime_divisors(cfg.D))


def regular_support(cfg: GeomConfig) -> list:
    """n in N Z with -d_eff < n < 0 passing the local conditions and with R_E(|n|/N) nonempty.

    Returns the list of xi = n / (n + d) as Fractions, keyed by n.
    """
    out = []
    for n in range(-cfg.N, -cfg.d_eff, -cfg.N):
        if not local_condition(cfg, n):
            continue
        if count_ideals_of_norm(cfg.group.field, -n // cfg.N) == 0:
            continue
        out.append((n, Fraction(n, n + cfg.d)))
    return out


def different_class(group: ClassGroup) -> tuple:
    """Class of the different (sqrt D) O_E.

    For odd D the different is the product of the ramified primes; the product is
    formed explicitly so that the principal class comes out of the composition law.
    """
    fld = group.field
    if fld.disc % 2 == 0:
        return group.identity  # generated by sqrt(D), hence principal
    cls = group.identity
    for p in prime_divisors(fld.disc):
        cls = group.mul(cls, reduce_form(*primitive_ideals_of_norm(fld.disc, p)[0]))
    return cls


def _check_supported(cfg: GeomConfig) -> None:
    if cfg.chi.conductor_c != 1:
        raise NotImplementedError("regular terms for ramified Omega are not supported")
    if cfg.D % 2 == 0:
        raise NotImplementedError("E ramified at 2: the even-place orbital values are not available")
    if cfg.f is not None and cfg.f.coeffs != ((0, 1),):
        raise NotImplementedError("regular terms are implemented for the identity Hecke element")


def regular_sum(cfg: GeomConfig) -> list:
    """[(n, term)] with exact terms for trivial Omega."""
    if cfg.stable:
        return []
    _check_supported(cfg)
    fld = cfg.group.field
    dif_inv = cfg.group.inv(different_class(cfg.group))
    out = []
    for n, xi in regular_support(cfg):
        mult = count_ideals_of_norm(fld, -n // cfg.N)
        sig = sigma_common_divisors(cfg.d, n + cfg.d)
        if cfg.chi.is_trivial:
            osum = Fraction(sum(ideals_of_norm(fld, n + cfg.d).values()))
        else:
            osum = sum(c * cfg.chi(cfg.group.mul(dif_inv, a)) for a, c in ideals_of_norm(fld, n + cfg.d).items())
        out.append((n, mult * sig * osum * pkm_eval(cfg.k, cfg.m, xi)))
    return out


def local_data(cfg: GeomConfig):
    """(split type, zeta) of the Hecke prime: zeta = Omega of a prime above p."""
    from .qfield import prime_ideal_class

    p = cfg.f.q
    k = kronecker(cfg.D, p)
    st = {1: "split", -1: "inert", 0: "ramified"}[k]
    z = 1.0 if st == "inert" else cfg.chi(prime_ideal_class(cfg.group.field, p))
    return st, z


def i_tilde_value(cfg: GeomConfig) -> float:
    if cfg.f is None:
        return 1.0
    st, z = local_data(cfg)
    return i_tilde(cfg.f, st, z)[0]


def irregular_terms(cfg: GeomConfig, i_tilde_val: float | None = None) -> float:
    """2^2 L(1, eta) L_S(1, eta) / sqrt(c d) * I~(f_p); the delta(N) term vanishes because N > 1."""
    if i_tilde_val is None:
        i_tilde_val = i_tilde_value(cfg)
    h, u = cfg.group.h, cfg.group.field.u
    L1 = h / (u * sqrt(cfg.d))
    LS = 1.0
    return 4 * L1 * LS / sqrt(cfg.chi.conductor_c * cfg.d) * i_tilde_val


@dataclass
class GeomReport:
    irregular: float
    regular_terms: list = field(default_factory=list)

    @property
    def regular(self):
        return sum((t for _, t in self.regular_terms), Fraction(0))

    @property
    def total(self) -> float:
        return self.irregular + complex(self.regular).real if self.regular_terms else self.irregular


def geometric_total(cfg: GeomConfig) -> GeomReport:
    """Irregular plus 4/d times the regular terms (the global constant 4 |Delta_F| / |Delta_E|)."""
    irr = irregular_terms(cfg)
    reg = [(n, Fraction(4, cfg.d) * t if isinstance(t, Fraction) else 4 / cfg.d * t) for n, t in regular_sum(cfg)]
    return GeomReport(irr, reg)


def period_norm_prediction(cfg: GeomConfig):
    """Predicted sum_x w_x |P_x|^2 (times I~ in the stable range): h u I~ + u^2 sum of regular terms."""
    h, u = cfg.group.h, cfg.group.field.u
    base = h * u * i_tilde_value(cfg)
    reg = regular_sum(cfg)
    return base + u * u * sum((t for _, t in reg), Fraction(0))


def unramified_rhs(cfg: GeomConfig) -> float:
    """2 L(1, eta)/sqrt(d) + (2/d) sum of regular terms (weight 2, below or above stability)."""
    h, u = cfg.group.h, cfg.group.field.u
    reg = sum((t for _, t in regular_sum(cfg)), Fraction(0))
    return 2 * h / (u * cfg.d) + 2 * complex(reg).real / cfg.d


def unramified_lhs(l_average: float, cfg: GeomConfig) -> float:
    """(1/(sqrt(d) N)) sum L/L(Ad) + C 4 L(1, eta)^2 / L(2, 1) * pi / phi(N)."""
    from math import pi

    h, u = cfg.group.h, cfg.group.field.u
    C = 1.0 if (cfg.k == 1 and cfg.chi.is_trivial) else 0.0
    L1 = h / (u * sqrt(cfg.d))
    return l_average / (sqrt(cfg.d) * cfg.N) + C * 4 * L1 * L1 / (pi / 6) * pi / euler_phi(cfg.N)
