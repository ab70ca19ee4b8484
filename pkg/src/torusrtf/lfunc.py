"""L-series from Hecke data and their values through a smoothed approximate functional equation.

Everything is in the analytic normalization: Lambda(s) = Q^(s/2) gamma(s) L(s) with
Lambda(s) = sign * conj-Lambda(1 - s), where conj-Lambda uses conjugated coefficients.
Gamma factors are products of

    Gamma_R(s) = pi^(-s/2) Gamma(s/2),    Gamma_C(s) = 2 (2 pi)^(-s) Gamma(s).

For any t > 0,

    Lambda(s) = sum a_n Q^(s/2) n^-s F_s(n t / sqrt Q)
              + sign * sum conj(a_n) Q^((1-s)/2) n^(s-1) F_(1-s)(n / (t sqrt Q))
              - sum_(poles rho) r_rho t^(s - rho) / (rho - s),

with F_s(y) = (1/2 pi i) int_(Re w = c) gamma(s + w) y^-w dw / w.  The kernel is
evaluated by the trapezoid rule on the vertical line, which converges
geometrically because the integrand is analytic in a strip and decays like
exp(-pi deg |Im w| / 4).  Agreement between t = 1 and t != 1 is the functional
equation gate: it fails unless conductor, gamma data and sign are all right.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import log, pi, sqrt

import numpy as np
from scipy.special import loggamma
from sympy import primerange

from .arith import kronecker, prime_divisors

FE_TOL = 1e-6


@dataclass
class LSeries:
    coeffs: np.ndarray  # a_1 .. a_nmax, analytic normalization
    conductor: int
    gamma_R: tuple = ()  # shifts mu of Gamma_R(s + mu)
    gamma_C: tuple = ()  # shifts nu of Gamma_C(s + nu)
    sign: complex = 1.0
    poles: tuple = ()  # ((rho, residue of Lambda), ...)
    label: str = ""
    center: float = 0.5
    gate_residual: float | None = field(default=None, repr=False)

    @property
    def degree(self) -> int:
        return len(self.gamma_R) + 2 * len(self.gamma_C)

    @property
    def nmax(self) -> int:
        return len(self.coeffs)

    def log_gamma(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for mu in self.gamma_R:
            out += -(z + mu) / 2 * log(pi) + loggamma((z + mu) / 2)
        for nu in self.gamma_C:
            out += log(2) - (z + nu) * log(2 * pi) + loggamma(z + nu)
        return out

    def gamma_factor(self, s) -> complex:
        return complex(np.exp(self.log_gamma(s)))

    def analytic_conductor(self, s=0.5) -> float:
        shifts = list(self.gamma_R) + [nu for nu in self.gamma_C for _ in range(2)]
        out = float(self.conductor)
        for mu in shifts:
            out *= abs(s + mu) + 3
        return out


# ---------------------------------------------------------------- kernel

def _kernel(L: LSeries, s: complex, y: np.ndarray, c: float = 1.0) -> np.ndarray:
    """F_s(y) for an array of y > 0."""
    shifts = list(L.gamma_R) + list(L.gamma_C)
    delta = min(c, c + s.real + min(shifts))
    if delta <= 0:
        raise ValueError("contour must sit to the right of the gamma poles")
    h = delta / 8
    g0 = float(np.real(L.log_gamma(s + c)))
    T = 10.0
    while float(np.real(L.log_gamma(s + c + 1j * T))) > g0 - 60:
        T *= 1.5
    tau = np.arange(-T, T + h / 2, h)
    w = c + 1j * tau
    lg = L.log_gamma(s + w) - np.log(w)
    logy = np.log(np.asarray(y, dtype=float))
    out = np.empty(len(logy), dtype=complex)
    step = max(1, 2_000_000 // len(tau))
    for i in range(0, len(logy), step):
        M = np.exp(lg[None, :] - w[None, :] * logy[i:i + step, None])
        out[i:i + step] = M.sum(axis=1) * h / (2 * pi)
    return out


def _afe_parts(L: LSeries, s: complex, t: float):
    n = np.arange(1, L.nmax + 1, dtype=float)
    sqQ = sqrt(L.conductor)
    a = L.coeffs
    F1 = _kernel(L, s, n * t / sqQ)
    F2 = _kernel(L, 1 - s, n / (t * sqQ))
    t1 = a * np.exp(s / 2 * log(L.conductor) - s * np.log(n)) * F1
    t2 = np.conj(a) * np.exp((1 - s) / 2 * log(L.conductor) + (s - 1) * np.log(n)) * F2
    val = t1.sum() + L.sign * t2.sum()
    for rho, r in L.poles:
        val -= r * t ** (s - rho) / (rho - s)
    tail = abs(t1[-10:]).sum() + abs(t2[-10:]).sum()
    return complex(val), float(tail)


def completed_value(L: LSeries, s: complex, t: float = 1.0) -> complex:
    return _afe_parts(L, complex(s), t)[0]


def fe_residual(L: LSeries, probes=None, t_alt: float = 1.1) -> float:
    """max over probes of |Lambda_t=1(s) - Lambda_t=t_alt(s)| / |Lambda(s)|."""
    if probes is None:
        probes = (L.center + 0.07 + 0.11j, L.center - 0.13 + 0.05j, L.center + 0.2)
    worst = 0.0
    for s in probes:
        a = completed_value(L, s, 1.0)
        b = completed_value(L, s, t_alt)
        worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
    return worst


def validate(L: LSeries, tol: float = FE_TOL) -> LSeries:
    r = fe_residual(L)
    L.gate_residual = r
    if not r <= tol:
        raise ArithmeticError(f"functional equation residual {r:.2e} exceeds {tol:g} for {L.label}")
    return L


@dataclass
class AFEValue:
    completed: complex
    finite: complex
    error_estimate: float
    gate_residual: float


def afe_value(L: LSeries, s0=None) -> AFEValue:
    """Completed and finite-part values at s0 (default: the center), after the FE gate."""
    if L.gate_residual is None:
        validate(L)
    if L.gate_residual > FE_TOL:
        raise ArithmeticError("functional equation gate failed; refusing to emit values")
    s0 = L.center if s0 is None else s0
    val, tail = _afe_parts(L, complex(s0), 1.0)
    val2, _ = _afe_parts(L, complex(s0), 1.05)
    err = max(tail, abs(val - val2))
    fin = val / (L.conductor ** (s0 / 2) * L.gamma_factor(s0))
    return AFEValue(val, fin, err, L.gate_residual)


# ---------------------------------------------------------------- Euler products

def euler_to_dirichlet(local_poly, nmax: int) -> np.ndarray:
    """Dirichlet coefficients of prod_p 1/P_p(p^-s) where local_poly(p) gives P_p ascending (P_p[0] = 1)."""
    a = np.zeros(nmax + 1, dtype=complex)
    a[1] = 1
    for p in primerange(2, nmax + 1):
        poly = np.asarray(local_poly(p), dtype=complex)
        emax = int(log(nmax) / log(p) + 1e-9)
        # power series 1/poly up to X^emax
        ser = np.zeros(emax + 1, dtype=complex)
        ser[0] = 1
        for e in range(1, emax + 1):
            ser[e] = -sum(poly[j] * ser[e - j] for j in range(1, min(e, len(poly) - 1) + 1))
        # multiply into existing multiplicative function (only p-free indices are set so far)
        pk = [p**e for e in range(emax + 1)]
        for m in range(nmax // p, 0, -1):
            if m % p == 0 or a[m] == 0:
                continue
            for e in range(1, emax + 1):
                if m * pk[e] > nmax:
                    break
                a[m * pk[e]] = a[m] * ser[e]
    return a[1:]


@dataclass
class FormData:
    level: int
    weight: int  # 2k
    a_p: dict  # unnormalized integer a_p for all p <= nmax
    label: str = ""

    @property
    def k(self) -> int:
        return self.weight // 2

    def lam(self, p: int) -> float:
        return self.a_p[p] / p ** ((self.weight - 1) / 2)

    def root_number(self) -> int:
        """(-1)^k prod_(p | N) w_p with a_p = -w_p p^(k - 1)."""
        eps = (-1) ** self.k
        for p in prime_divisors(self.level):
            ratio = -self.a_p[p] / p ** (self.k - 1)
            w = round(ratio)
            if abs(w) != 1 or abs(ratio - w) > 1e-9:
                raise ValueError(f"a_{p} = {self.a_p[p]} is not +-p^(k-1) for a newform of squarefree level")
            eps *= w
        return eps

    def require(self, nmax: int):
        missing = [p for p in primerange(2, nmax + 1) if p not in self.a_p]
        if missing:
            raise KeyError(f"missing a_p for primes {missing[:5]}{'...' if len(missing) > 5 else ''}")


def build_lseries(kind: str, form: FormData, nmax: int, D: int | None = None, omega=None) -> LSeries:
    """kind in {'f', 'twist', 'rankin', 'sym2'}.

    omega, for 'rankin', maps a prime p (split or ramified in E) to Omega of a prime above it.
    """
    form.require(nmax)
    N, k = form.level, form.k
    lam = {p: form.lam(p) for p in primerange(2, nmax + 1)}
    half = k - 0.5

    if kind == "f":
        def loc(p):
            return [1, -lam[p]] if N % p == 0 else [1, -lam[p], 1]
        return LSeries(euler_to_dirichlet(loc, nmax), N, (), (half,), form.root_number(), label=f"L(f) {form.label}")

    if kind == "twist":
        if D is None:
            raise ValueError("twist needs D")
        d = abs(D)

        def loc(p):
            c = kronecker(D, p)
            return [1, -c * lam[p]] if N % p == 0 else [1, -c * lam[p], c * c]
        sign = form.root_number() * kronecker(D, -N)
        return LSeries(euler_to_dirichlet(loc, nmax), N * d * d, (), (half,), sign, label=f"L(f x chi_{D}) {form.label}")

    if kind == "rankin":
        if D is None:
            raise ValueError("Rankin-Selberg needs D")
        d = abs(D)
        P = np.polynomial.Polynomial

        def loc(p):
            x = lam[p]
            c = kronecker(D, p)
            if N % p == 0:
                if c != -1:
                    raise ValueError(f"prime {p} | N must be inert in E")
                return [1, 0, -x * x]
            if c == -1:
                poly = P([1, -x, 1]) * P([1, x, 1])
            elif c == 0:
                b = 1 if omega is None else omega(p)
                poly = P([1, -x * b, b * b])
            else:
                b1 = 1 if omega is None else omega(p)
                b2 = 1 / b1
                poly = P([1, -x * b1, b1 * b1]) * P([1, -x * b2, b2 * b2])
            return poly.coef
        return LSeries(euler_to_dirichlet(loc, nmax), (N * d) ** 2, (), (half, half), 1.0,
                       label=f"L(f x g_Omega) {form.label} D={D}")

    if kind == "sym2":
        def loc(p):
            x2 = lam[p] ** 2
            if N % p == 0:
                return [1, -x2]
            return [1, -(x2 - 1), x2 - 1, -1]
        return LSeries(euler_to_dirichlet(loc, nmax), N * N, (1.0,), (2 * k - 1.0,), 1.0,
                       label=f"L(Sym2 f) {form.label}")

    raise ValueError(f"unknown kind {kind}")


def riemann_zeta_series(nmax: int = 30) -> LSeries:
    return LSeries(np.ones(nmax, dtype=complex), 1, (0.0,), (), 1.0, poles=((1.0, 1.0), (0.0, -1.0)), label="zeta")


def dirichlet_series(D: int, nmax: int = 200) -> LSeries:
    """L(s, chi_D) for a fundamental discriminant D."""
    a = np.array([kronecker(D, n) for n in range(1, nmax + 1)], dtype=complex)
    mu = 1.0 if D < 0 else 0.0
    return LSeries(a, abs(D), (mu,), (), 1.0, label=f"L(chi_{D})")


def kernel_cutoff(gamma_R: tuple, gamma_C: tuple, s: float = 0.5, eps: float = 1e-16) -> float:
    """Smallest y with |F_s(y)| y^(-1/2) <= eps |F_s(1/4)|, scanning a geometric grid."""
    probe = LSeries(np.ones(1), 1, tuple(gamma_R), tuple(gamma_C))
    y = np.geomspace(0.25, 400.0, 200)
    F = np.abs(_kernel(probe, complex(s), y)) / np.sqrt(y)
    ok = np.nonzero(F <= eps * F[0])[0]
    return float(y[ok[0]]) if len(ok) else float(y[-1])


def default_nmax(conductor: int, gamma_R: tuple, gamma_C: tuple, s: float = 0.5) -> int:
    """Terms needed so both AFE sums (for split parameters up to 1.1) are truncated below 1e-16."""
    y = max(kernel_cutoff(gamma_R, gamma_C, s), kernel_cutoff(gamma_R, gamma_C, 1 - s))
    return int(1.1 * y * sqrt(conductor)) + 10


def nmax_for(kind: str, level: int, weight: int, D: int | None = None, s: float = 0.5) -> int:
    k = weight // 2
    if kind == "f":
        return default_nmax(level, (), (k - 0.5,), s)
    if kind == "twist":
        return default_nmax(level * D * D, (), (k - 0.5,), s)
    if kind == "rankin":
        return default_nmax((level * D) ** 2, (), (k - 0.5, k - 0.5), s)
    if kind == "sym2":
        return default_nmax(level**2, (1.0,), (2 * k - 1.0,), s)
    raise ValueError(kind)


# ---------------------------------------------------------------- Petersson norm

def petersson_norm(form: FormData, nmax: int | None = None) -> float:
    """(f, f) = N / 4^k * Gamma_R(2) Gamma_C(2k) L_fin(1, Sym^2 f)."""
    if nmax is None:
        nmax = nmax_for("sym2", form.level, form.weight, s=1.0)
    L = validate(build_lseries("sym2", form, nmax))
    v = afe_value(L, 1.0)
    lam1 = v.completed / form.level  # Q^(1/2) with Q = N^2
    return float(np.real(form.level / 4**form.k * lam1))


def classical_average_afe(forms: list, D: int, u: int, omega=None, nmax: int | None = None) -> dict:
    """(2k-2)! u sqrt(d) / (2 pi (4 pi)^(2k-1)) * sum_f L_fin(k, f x g_Omega) / (f, f).

    L_fin(k, f x g_Omega) in the classical normalization is the analytic finite value at 1/2.
    """
    from math import factorial

    d = abs(D)
    rows = []
    total = 0.0
    for form in forms:
        n1 = nmax or nmax_for("rankin", form.level, form.weight, D)
        L = validate(build_lseries("rankin", form, n1, D, omega))
        val = afe_value(L)
        pn = petersson_norm(form)
        k = form.k
        c = factorial(2 * k - 2) * u * sqrt(d) / (2 * pi * (4 * pi) ** (2 * k - 1))
        term = c * float(np.real(val.finite)) / pn
        rows.append({"label": form.label, "L_fin": float(np.real(val.finite)), "petersson": pn, "term": term,
                     "fe_residual": L.gate_residual, "error_estimate": val.error_estimate})
        total += term
    return {"total": total, "forms": rows}


# ---------------------------------------------------------------- ingestion

def parse_eigenform_file(path: str, expect_level: int | None = None, expect_weight: int | None = None,
                         nmax: int | None = None) -> FormData:
    """Read 'level N weight 2k label STR' plus 'n,a_n' lines; '#' starts a comment line."""
    header = None
    coeffs: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                parts = line.split()
                if len(parts) != 6 or parts[0] != "level" or parts[2] != "weight" or parts[4] != "label":
                    raise ValueError(f"{path}:{lineno}: expected 'level N weight 2k label STR'")
                try:
                    header = (int(parts[1]), int(parts[3]), parts[5])
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: level and weight must be integers") from None
                continue
            try:
                n_s, a_s = line.split(",")
                n, a = int(n_s), int(a_s)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: expected 'n,a_n' with integers, got {line!r}") from None
            if n < 1:
                raise ValueError(f"{path}:{lineno}: index must be positive")
            if n in coeffs and coeffs[n] != a:
                raise ValueError(f"{path}:{lineno}: conflicting value for a_{n}")
            coeffs[n] = a
    if header is None:
        raise ValueError(f"{path}: missing header line")
    level, weight, label = header
    if expect_level is not None and level != expect_level:
        raise ValueError(f"{path}: header level {level} does not match requested {expect_level}")
    if expect_weight is not None and weight != expect_weight:
        raise ValueError(f"{path}: header weight {weight} does not match requested {expect_weight}")
    if weight % 2:
        raise ValueError(f"{path}: odd weight {weight} is not supported")
    if coeffs.get(1) not in (None, 1):
        raise ValueError(f"{path}: a_1 must be 1 for a normalized eigenform")
    a_p = {p: coeffs[p] for p in coeffs if p > 1 and len(prime_divisors(p)) == 1 and prime_divisors(p)[0] == p}
    form = FormData(level, weight, a_p, label)
    if nmax is not None:
        missing = [p for p in primerange(2, nmax + 1) if p not in a_p]
        if missing:
            raise ValueError(f"{path}: coverage gap, missing a_p for p = {missing[:5]} (need all p <= {nmax})")
    return form
