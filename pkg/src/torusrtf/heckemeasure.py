"""Spherical Hecke algebra of PGL(2) over a local field: transforms, measures, Plancherel.

f_n is the characteristic function of K diag(w^n, 1) K.  Its transform at
x = q^s + q^-s in [-2, 2] is f_0^ = 1 and

    f_n^(x) = q^(n/2) (c_n(x) + (1 - 1/q) U_(n-2)(x)),

with c_n = q^(ns) + q^(-ns) and U_j = q^(js) + q^((j-2)s) + ... + q^(-js), both
generated by the three-term recursion t_(j+1) = x t_j - t_(j-1).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import fsum, sqrt, pi

import numpy as np


@dataclass(frozen=True)
class HeckeElement:
    q: int
    coeffs: tuple  # ((n, c_n), ...)

    @classmethod
    def make(cls, q: int, coeffs: dict) -> "HeckeElement":
        items = tuple(sorted((int(n), c) for n, c in coeffs.items() if c != 0))
        if any(n < 0 for n, _ in items):
            raise ValueError("double cosets are indexed by n >= 0")
        return cls(int(q), items)

    @classmethod
    def basis(cls, q: int, n: int) -> "HeckeElement":
        return cls.make(q, {n: 1})

    @classmethod
    def identity(cls, q: int) -> "HeckeElement":
        return cls.basis(q, 0)

    @property
    def degree(self) -> int:
        return max((n for n, _ in self.coeffs), default=0)

    def coset_value(self, m: int):
        """f(diag(w^m, 1)); symmetric in m."""
        m = abs(m)
        return dict(self.coeffs).get(m, 0)

    def hat(self, x):
        return sum(c * fn_hat(n, self.q, x) for n, c in self.coeffs)

    def __add__(self, other):
        d = dict(self.coeffs)
        for n, c in other.coeffs:
            d[n] = d.get(n, 0) + c
        return HeckeElement.make(self.q, d)

    def scale(self, a):
        return HeckeElement.make(self.q, {n: a * c for n, c in self.coeffs})


def _chebyshev_pair(n: int, x):
    """Return (c_n(x), U_(n-2)(x))."""
    x = np.asarray(x, dtype=float) if not isinstance(x, (complex, np.complexfloating)) else x
    c_prev, c_cur = 2.0 + 0 * x, x  # c_0, c_1
    if n == 0:
        return c_prev, 0 * x
    u_prev, u_cur = 0 * x, 1.0 + 0 * x  # U_-1, U_0
    for _ in range(n - 1):
        c_prev, c_cur = c_cur, x * c_cur - c_prev
    for _ in range(n - 2):
        u_prev, u_cur = u_cur, x * u_cur - u_prev
    u = u_cur if n >= 2 else 0 * x
    return c_cur, u


def fn_hat(n: int, q: int, x):
    if n == 0:
        return 1.0 + 0 * np.asarray(x, dtype=float)
    c, u = _chebyshev_pair(n, x)
    return q ** (n / 2) * (c + (1 - 1 / q) * u)


def fn_hat_poly(n: int, q: int) -> np.ndarray:
    """Coefficients (ascending) of f_n^ as a polynomial in x."""
    P = np.polynomial.Polynomial
    if n == 0:
        return np.array([1.0])
    c_prev, c_cur = P([2.0]), P([0.0, 1.0])
    u_prev, u_cur = P([0.0]), P([1.0])
    X = P([0.0, 1.0])
    for _ in range(n - 1):
        c_prev, c_cur = c_cur, X * c_cur - c_prev
    for _ in range(n - 2):
        u_prev, u_cur = u_cur, X * u_cur - u_prev
    u = u_cur if n >= 2 else P([0.0])
    return (q ** (n / 2) * (c_cur + (1 - 1 / q) * u)).coef


# ---------------------------------------------------------------- measures

@dataclass(frozen=True)
class MeasureSpec:
    kind: str  # "sato_tate" | "plancherel" | "twisted"
    q: int = 0
    split_type: str = ""  # "split" | "inert" | "ramified"
    zeta: complex = 1.0  # Omega(w_E) for unramified Omega_p
    omega_ramified: bool = False

    def ratio(self, x):
        """Density relative to the Sato-Tate measure."""
        x = np.asarray(x, dtype=float)
        if self.kind == "sato_tate":
            return np.ones_like(x)
        q = self.q
        if self.kind == "plancherel":
            return (q + 1) / ((sqrt(q) + 1 / sqrt(q)) ** 2 - x * x)
        if self.kind != "twisted":
            raise ValueError(self.kind)
        if self.omega_ramified:
            return np.ones_like(x)
        rq = sqrt(q)
        z = self.zeta
        if self.split_type == "split":
            return 1 / ((1 - x * z / rq + z * z / q) * (1 - x / (z * rq) + 1 / (z * z * q)))
        if self.split_type == "inert":
            return 1 / ((1 + 1 / q) ** 2 - x * x / q)
        if self.split_type == "ramified":
            return 1 / (1 - x * z / rq + 1 / q)
        raise ValueError(self.split_type)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.sqrt(np.clip(4 - x * x, 0, None)) / (2 * pi) * self.ratio(x)

    @property
    def expected_mass(self) -> float:
        if self.kind != "twisted" or self.omega_ramified:
            return 1.0
        return local_L1_eta(self.q, self.split_type)


def sato_tate() -> MeasureSpec:
    return MeasureSpec("sato_tate")


def plancherel(q: int) -> MeasureSpec:
    return MeasureSpec("plancherel", q=q)


def twisted(q: int, split_type: str, zeta=1.0, omega_ramified=False) -> MeasureSpec:
    return MeasureSpec("twisted", q=q, split_type=split_type, zeta=complex(zeta), omega_ramified=omega_ramified)


def local_L1_eta(q: int, split_type: str) -> float:
    return {"split": 1 / (1 - 1 / q), "inert": 1 / (1 + 1 / q), "ramified": 1.0}[split_type]


_GL_CACHE: dict = {}


def _gauss_legendre(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def integrate_measure(f, mu: MeasureSpec, tol: float = 1e-12, a: float = -2.0, b: float = 2.0):
    """int_a^b f(x) d mu.

    Substituting x = 2 cos(theta) turns the Sato-Tate weight into (2/pi) sin^2(theta)
    and removes the square-root endpoint behaviour, so Gauss-Legendre in theta
    converges geometrically.  The node count doubles until two successive rules agree
    to tol (relative to max(1, |value|)).
    """
    lo, hi = float(np.arccos(np.clip(b / 2, -1, 1))), float(np.arccos(np.clip(a / 2, -1, 1)))
    if hi <= lo:
        return 0.0

    def rule(n):
        t, w = _gauss_legendre(n)
        th = 0.5 * (hi - lo) * t + 0.5 * (hi + lo)
        x = 2 * np.cos(th)
        vals = w * f(x) * mu.ratio(x) * (2 / pi) * np.sin(th) ** 2 * 0.5 * (hi - lo)
        scale = float(np.sum(np.abs(vals)))
        if np.iscomplexobj(vals):
            return complex(fsum(vals.real), fsum(vals.imag)), scale
        return fsum(vals), scale

    prev, _ = rule(32)
    n = 64
    while n <= 4096:
        cur, scale = rule(n)
        change = abs(cur - prev)
        # the attainable accuracy is limited by rounding relative to the L1 size of the integrand
        if change <= max(tol, 64 * np.finfo(float).eps * scale):
            if isinstance(cur, complex) and cur.imag == 0:
                return cur.real
            return cur
        prev, n = cur, 2 * n
    raise RuntimeError(f"quadrature did not converge: last change {change}")


def lambda_delta_weight(q: int, delta: complex):
    rq = sqrt(q)
    return lambda x: (1 - 1 / q) / ((1 - delta * x / rq + delta**2 / q) * (1 - x / (delta * rq) + delta ** (-2) / q))


def plancherel_suite(q: int, nmax: int = 10, deltas=(1, -1, 1j), tol: float = 1e-10) -> list:
    """Check the Plancherel identities on f_0..f_nmax; returns failure-aware records."""
    rows = []
    mq, mi = plancherel(q), sato_tate()

    def rec(name, n, m, lhs, rhs):
        err = abs(lhs - rhs)
        rows.append({"q": q, "identity": name, "n": n, "m": m, "lhs": lhs, "rhs": rhs, "err": err, "ok": err <= tol})

    for n in range(nmax + 1):
        f = HeckeElement.basis(q, n)
        rec("identity_value", n, 0, float(n == 0), integrate_measure(f.hat, mq))
        for m in range(1, nmax + 1):
            val = integrate_measure(lambda x: f.hat(x) * fn_hat(m, q, x), mq) / ((1 + 1 / q) * q**m)
            rec("coset_value", n, m, float(n == m), val)
        for d in deltas:
            lhs = f.coset_value(0) + d * f.coset_value(1)
            rhs = integrate_measure(lambda x: f.hat(x) * (1 + sqrt(q) * d * x + q), mq) / (q + 1)
            rec(f"delta_combination[{d}]", n, 1, lhs, rhs)
        rec("sato_tate_extraction", n, 2, f.coset_value(0) - f.coset_value(2), integrate_measure(f.hat, mi))
        for d in deltas:
            lhs = lambda_delta_direct(f, d)
            w = lambda_delta_weight(q, d)
            rhs = integrate_measure(lambda x: f.hat(x) * w(x), mi)
            rec(f"lambda_delta[{d}]", n, 0, lhs, rhs)
    return rows


def lambda_delta_direct(f: HeckeElement, delta) -> complex:
    out = 0
    for n, c in f.coeffs:
        out += c * (1 if n == 0 else delta**n + delta ** (-n))
    return out


def _real_if_close(z, tol=1e-12):
    z = complex(z)
    return z.real if abs(z.imag) <= tol * max(1.0, abs(z)) else z


def i_tilde_coset(f: HeckeElement, split_type: str, zeta=1.0, omega_ramified=False):
    """Irregular coset sum for the local test function f."""
    if omega_ramified:
        return f.coset_value(0) - f.coset_value(2)
    if split_type == "inert":
        return f.coset_value(0)
    if split_type == "ramified":
        return _real_if_close(f.coset_value(0) + zeta * f.coset_value(1))
    if split_type == "split":
        return _real_if_close(lambda_delta_direct(f, zeta))
    raise ValueError(split_type)


def i_tilde_integral(f: HeckeElement, split_type: str, zeta=1.0, omega_ramified=False, tol=1e-13):
    mu = twisted(f.q, split_type, zeta, omega_ramified)
    val = _real_if_close(integrate_measure(f.hat, mu, tol), 1e-10)
    if omega_ramified:
        return val
    return val / local_L1_eta(f.q, split_type)


def i_tilde(f: HeckeElement, split_type: str, zeta=1.0, omega_ramified=False, tol=1e-10):
    a = i_tilde_coset(f, split_type, zeta, omega_ramified)
    b = i_tilde_integral(f, split_type, zeta, omega_ramified)
    if abs(a - b) > tol:
        raise ArithmeticError(f"coset route {a} and measure route {b} disagree")
    return a, b


def residual_point(p: int) -> float:
    return sqrt(p) + 1 / sqrt(p)


def local_L_half_base_change(x, q: int, split_type: str, zeta=1.0, omega_ramified=False):
    """L(1/2, rho(a_x, 1/a_x)_E (x) Omega_p)."""
    return MeasureSpec("twisted", q, split_type, complex(zeta), omega_ramified).ratio(x)


def local_L1_ad(x, q: int):
    """L(1, rho(a_x, 1/a_x), Ad) = [(1 - a^2/q)(1 - 1/q)(1 - a^-2/q)]^-1."""
    x = np.asarray(x, dtype=float)
    return 1 / ((1 - 1 / q) * (1 - (x * x - 2) / q + 1 / q**2))


def local_L2_trivial(q: int) -> float:
    return 1 / (1 - q**-2)
