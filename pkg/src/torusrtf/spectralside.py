"""Spectral side: Brandt eigenforms, period sums and their L-value normalization.

Functions on the class set X carry the inner product

    <phi, psi> = sum_x phi(x) conj(psi(x)) / w_x,

under which every Brandt matrix (acting by (B phi)_i = sum_j B_ij phi_j) is
self-adjoint, because w_j B_ij = w_i B_ji.  The period of phi against Omega is
P(phi) = sum_x phi(x) P_x.  With v_x = w_x conj(P_x) this is <phi, v>, so for an
orthonormal basis sum |P(phi)|^2 = <v, v> = sum_x w_x |P_x|^2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gamma, pi, sqrt

import numpy as np
from sympy import primerange

from .arith import euler_phi, prime_divisors
from .heckemeasure import HeckeElement, fn_hat, residual_point
from .qfield import ClassCharacter, QuadField
from .quatorder import ClassSet
from .torusmap import PeriodData

SNAP_TOL = 1e-6


@dataclass
class EigenForm:
    vector: np.ndarray  # orthonormal for the 1/w inner product
    eigenvalues: dict  # p -> a_p (Brandt eigenvalue of B(p))


@dataclass
class EigenData:
    class_set: ClassSet
    eisenstein: EigenForm
    cusp_forms: list
    primes: tuple
    weights: np.ndarray = field(repr=False)

    @property
    def dim_cusp(self) -> int:
        return len(self.cusp_forms)

    def gram(self) -> np.ndarray:
        V = np.array([self.eisenstein.vector] + [f.vector for f in self.cusp_forms]).T
        return V.conj().T @ (V / self.weights[:, None])

    def hecke_matrix(self, f: HeckeElement) -> np.ndarray:
        return hecke_matrix(self.class_set, f)


def _snap(x: float) -> float:
    r = round(x)
    return float(r) if abs(x - r) < SNAP_TOL else float(x)


def brandt_at_primes(cs: ClassSet, primes) -> dict:
    allb = cs.brandt_matrices(max(primes))
    return {p: allb[p] for p in primes}


def eigen_decompose(cs: ClassSet, primes=None) -> EigenData:
    """Simultaneous eigenbasis of the Brandt matrices B(p), p in primes.

    The weighted-symmetric matrices S = W^(-1/2) B W^(1/2) are combined with fixed
    irrational coefficients, diagonalized with eigh, and the resulting vectors
    mapped back by W^(1/2).  Multiplicity one is asserted on the combination.
    """
    N = cs.n_level
    if primes is None:
        primes = tuple(p for p in primerange(2, 30) if N % p)[:6]
    primes = tuple(primes)
    good = [p for p in primes if N % p]
    if not good:
        raise ValueError("need at least one prime not dividing N")
    w = np.array(cs.weights, dtype=float)
    sw = np.sqrt(w)
    Bs = brandt_at_primes(cs, primes)
    S = {p: (Bs[p] * sw[None, :]) / sw[:, None] for p in primes}
    for p, M in S.items():
        if not np.allclose(M, M.T, atol=1e-12):
            raise ArithmeticError(f"B({p}) is not self-adjoint for the weighted product")
    M = sum(sqrt(2 + t) / (1 + t) * S[p] for t, p in enumerate(good))
    ev, U = np.linalg.eigh(M)
    if len(ev) > 1 and np.min(np.diff(ev)) < 1e-8:
        raise ArithmeticError("simultaneous eigenspaces are not one-dimensional")
    forms = []
    for j in range(U.shape[1]):
        u = U[:, j]
        vec = sw * u
        # fix the sign so the largest entry is positive
        k = int(np.argmax(np.abs(vec)))
        vec = vec * np.sign(vec[k])
        vals = {p: _snap(float(u @ S[p] @ u)) for p in primes}
        forms.append(EigenForm(vec, vals))
    p0 = good[0]
    eis_idx = [j for j, f in enumerate(forms) if abs(f.eigenvalues[p0] - (p0 + 1)) < SNAP_TOL]
    if len(eis_idx) != 1:
        raise ArithmeticError("could not identify the Eisenstein eigenvector")
    eis = forms.pop(eis_idx[0])
    if np.ptp(eis.vector) > 1e-9 * np.max(np.abs(eis.vector)):
        raise ArithmeticError("Eisenstein eigenvector is not constant")
    forms.sort(key=lambda f: tuple(f.eigenvalues[p] for p in primes))
    return EigenData(cs, eis, forms, primes, w)


def hecke_matrix(cs: ClassSet, f: HeckeElement) -> np.ndarray:
    """Matrix of f = sum c_n f_n at p not dividing N, via f_n -> B(p^n) - B(p^(n-2))."""
    p = f.q
    if cs.n_level % p == 0:
        raise ValueError("Hecke prime must not divide N")
    h = len(cs)
    Bp = cs.brandt_matrix(p).astype(float)
    pw = [np.eye(h), Bp]  # B(p^n) by B(p) B(p^(n-1)) - p B(p^(n-2))
    for n in range(2, f.degree + 1):
        pw.append(Bp @ pw[-1] - p * pw[-2])
    out = np.zeros((h, h))
    for n, c in f.coeffs:
        out += c * (pw[n] - (pw[n - 2] if n >= 2 else 0))
    return out


def hecke_eigenvalue(f: HeckeElement, a_p: float) -> float:
    """f^ at the Satake parameter x = a_p / sqrt(p)."""
    return float(f.hat(a_p / sqrt(f.q)))


@dataclass
class SpectralReport:
    raw_period_sum: float  # cuspidal sum of f^(x_f) |P(f)|^2 over an orthonormal basis
    eisenstein_correction: float  # delta_Omega h^2 / (1, 1) times f^ at the residual point
    delta_route_total: float
    eigen_route_total: float
    terms: list  # per cusp form: (eigenvalues, |P|^2, weight f^)
    l_average: float  # sum over cusp forms of f^ L(1/2, pi_E x Omega) / L(1, pi, Ad)
    metadata: dict = field(default_factory=dict)

    @property
    def route_gap(self) -> float:
        return abs(self.delta_route_total - self.eigen_route_total) / max(1.0, abs(self.delta_route_total))


def delta_route(pd: PeriodData, chi: ClassCharacter, f: HeckeElement | None = None) -> float:
    """<f(T) v, v> with v_x = w_x conj(P_x); for f = identity this is sum_x w_x |P_x|^2."""
    w = np.array(pd.class_set.weights, dtype=float)
    P = pd.period_vector(chi)
    v = w * P.conj()
    Tv = v if f is None else hecke_matrix(pd.class_set, f) @ v
    return float(np.real(np.sum(Tv * v.conj() / w)))


def period(form: EigenForm, P: np.ndarray) -> complex:
    return complex(np.sum(form.vector * P))


def spectral_average(ed: EigenData, pd: PeriodData, chi: ClassCharacter, f: HeckeElement | None = None,
                     k: int = 1, m: int = 0, tol: float = 1e-10) -> SpectralReport:
    if k != 1:
        raise ValueError("the quaternion period route covers weight 2 (k = 1) only")
    if ed.class_set is not pd.class_set:
        raise ValueError("eigen data and period data use different class sets")
    fld = pd.group.field
    N = ed.class_set.n_level
    P = pd.period_vector(chi)

    def weight_of(form):
        if f is None:
            return 1.0
        return hecke_eigenvalue(f, form.eigenvalues[f.q])

    terms = []
    cusp = 0.0
    for form in ed.cusp_forms:
        p2 = abs(period(form, P)) ** 2
        wt = weight_of(form)
        if p2 < -1e-12:
            raise ArithmeticError("negative period square")
        terms.append((dict(form.eigenvalues), p2, wt))
        cusp += wt * p2
    eis = abs(period(ed.eisenstein, P)) ** 2 * weight_of(ed.eisenstein)
    eis_formula = eisenstein_correction(pd, chi, f)
    if abs(eis - eis_formula) > tol * max(1.0, abs(eis)):
        raise ArithmeticError(f"Eisenstein term {eis} differs from delta h^2/(1,1) = {eis_formula}")
    total_eigen = cusp + eis
    total_delta = delta_route(pd, chi, f)
    if abs(total_eigen - total_delta) > tol * max(1.0, abs(total_delta)):
        raise ArithmeticError(f"eigen route {total_eigen} and delta route {total_delta} disagree")
    ratio = l_ratio_factor(N, fld, k)
    return SpectralReport(
        raw_period_sum=cusp,
        eisenstein_correction=eis_formula,
        delta_route_total=total_delta,
        eigen_route_total=total_eigen,
        terms=terms,
        l_average=ratio * cusp,
        metadata={
            "inner_product": "<phi,psi> = sum_x phi(x) conj(psi(x)) / w_x",
            "measure_constant": measure_constant(N, fld),
            "waldspurger_constant": waldspurger_constant(N, fld, chi, k, m),
            "l_ratio_factor": ratio,
        },
    )


def eisenstein_correction(pd: PeriodData, chi: ClassCharacter, f: HeckeElement | None = None) -> float:
    """delta_Omega h^2 / (1, 1), times f^ at the residual point; (1, 1) = sum 1/w_x = mass."""
    if not chi.is_trivial:
        return 0.0
    h = pd.group.h
    val = h * h / float(pd.class_set.mass)
    if f is not None:
        val *= float(f.hat(residual_point(f.q)))
    return val


def completed_L1_eta(fld: QuadField) -> float:
    """h / (u sqrt d): L(1, eta) with the archimedean factor included."""
    from .qfield import class_group

    return class_group(fld).h / (fld.u * sqrt(fld.d_abs))


def measure_constant(N: int, fld: QuadField) -> float:
    """(vol T / h)^2 (1, 1) / vol G with vol T = 2 L(1, eta), vol G = 2: equals phi(N) / (6 u^2 d)."""
    return euler_phi(N) / (6 * fld.u**2 * fld.d_abs)


def waldspurger_constant(N: int, fld: QuadField, chi: ClassCharacter, k: int = 1, m: int = 0) -> float:
    """L(2,1) L_S(1,eta)^2 / (2 sqrt(c d)) prod_(q|N)(1 - 1/q) Gamma(2k) / (pi Gamma(k+m) Gamma(k-m)).

    For unramified Omega the set S(Omega) of ramified places of Omega is empty and
    the partial L-function L_S(1, eta) is 1.
    """
    if abs(m) >= k:
        raise ValueError("need |m| < k")
    c = chi.conductor_c
    if c != 1:
        raise NotImplementedError("ramified Omega is not supported")
    L2 = pi / 6
    LS = 1.0
    loc = 1.0
    for q in prime_divisors(N):
        loc *= 1 - 1 / q
    arch = gamma(2 * k) / (pi * gamma(k + m) * gamma(k - m))
    return L2 * LS**2 / (2 * sqrt(c * fld.d_abs)) * loc * arch


def l_ratio_factor(N: int, fld: QuadField, k: int = 1) -> float:
    """L(1/2, pi_E x Omega) / L(1, pi, Ad) = factor * |P(phi)|^2 for orthonormal phi; k = 1 gives 2N/(u^2 sqrt d)."""
    from .qfield import trivial_character, class_group

    W = waldspurger_constant(N, fld, trivial_character(class_group(fld)), k, 0)
    return measure_constant(N, fld) / W


def residual_term(k: int, chi: ClassCharacter, f: HeckeElement | None = None) -> float:
    """C(k, Omega, f_p).

    Over Q a quadratic character unramified everywhere is trivial, so the genus-type
    branch reduces to Omega trivial with residual point sqrt(p) + 1/sqrt(p).
    """
    if k != 1 or not chi.is_trivial:
        return 0.0
    if f is None:
        return 1.0
    return float(f.hat(residual_point(f.q)))


# ---------------------------------------------------------------- theorem forms

def large_level_sides(rep: SpectralReport, pd: PeriodData, chi: ClassCharacter, f: HeckeElement | None,
                      i_tilde_integral: float) -> tuple:
    """Both sides of the large-level average, weight 2.

    LHS = (2/N) sum_f f^(x_f) L(1/2, pi_E x Omega)/L(1, pi, Ad)
    RHS = 4 L(1, eta) * int f^ d mu_(p,E,Omega) / L_p(1, eta) - 48 C h^2 / (u^2 sqrt(d) phi(N))

    i_tilde_integral is the integral already divided by L_p(1, eta).
    """
    fld = pd.group.field
    N = pd.class_set.n_level
    h, u, d = pd.group.h, fld.u, fld.d_abs
    lhs = 2 / N * rep.l_average
    C = residual_term(1, chi, f)
    rhs = 4 * completed_L1_eta(fld) * i_tilde_integral - 48 * C * h * h / (u * u * sqrt(d) * euler_phi(N))
    return lhs, rhs


def classical_lhs(rep: SpectralReport, pd: PeriodData) -> float:
    """(u sqrt d / (8 pi^2)) sum_f L_fin(1, f x g_Omega)/(f, f) = (1/u) sum_f |P(f)|^2."""
    return rep.raw_period_sum / pd.group.field.u


def classical_rhs(fld: QuadField, h: int, N: int, trivial: bool) -> Fraction:
    """h (1 - 12 h / (u phi(N))) for trivial Omega, h otherwise (weight 2)."""
    if trivial:
        return h * (1 - Fraction(12 * h, fld.u * euler_phi(N)))
    return Fraction(h)
