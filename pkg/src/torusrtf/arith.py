"""Small integer arithmetic helpers shared by the field, algebra and geometric modules."""
from fractions import Fraction
from functools import lru_cache
from math import gcd

from sympy import factorint as _factorint
import gmpy2


@lru_cache(maxsize=4096)
def _factor_cached(n: int) -> tuple:
    return tuple(sorted(_factorint(n).items()))


def factor(n: int) -> dict:
    """Prime factorization of |n| as {p: e}."""
    n = abs(int(n))
    if n <= 1:
        return {}
    return dict(_factor_cached(n))


def prime_divisors(n: int) -> list:
    return sorted(factor(n))


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factor(n).values())


def divisors(n: int) -> list:
    divs = [1]
    for p, e in factor(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def sigma1(n: int) -> int:
    return sum(divisors(n))


def euler_phi(n: int) -> int:
    out = 1
    for p, e in factor(n).items():
        out *= (p - 1) * p ** (e - 1)
    return out


def is_fundamental_discriminant(D: int) -> bool:
    if D == 0 or D == 1:
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D | n)."""
    return int(gmpy2.kronecker(D, n))


def jacobi_symbol(a: int, p: int) -> int:
    return int(gmpy2.jacobi(a, p))


def _split_p(x: int, p: int):
    e = 0
    while x % p == 0:
        x //= p
        e += 1
    return e, x


def _squareclass_int(x) -> int:
    x = Fraction(x)
    if x == 0:
        raise ValueError("Hilbert symbol of zero")
    # x and num*den differ by the square den^2
    return x.numerator * x.denominator


def hilbert_symbol(a, b, p) -> int:
    """Hilbert symbol (a, b)_p for nonzero rationals; p a prime or the string 'inf'."""
    a, b = _squareclass_int(a), _squareclass_int(b)
    if p == "inf" or p == 0:
        return -1 if (a < 0 and b < 0) else 1
    alpha, u = _split_p(a, p)
    beta, v = _split_p(b, p)
    if p == 2:
        eps = lambda x: ((x - 1) // 2) % 2
        omg = lambda x: ((x * x - 1) // 8) % 2
        e = eps(u) * eps(v) + alpha * omg(v) + beta * omg(u)
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    return sign * jacobi_symbol(u % p, p) ** beta * jacobi_symbol(v % p, p) ** alpha


def xgcd(a: int, b: int):
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


__all__ = [
    "factor", "prime_divisors", "is_squarefree", "divisors", "sigma1", "euler_phi",
    "is_fundamental_discriminant", "kronecker", "hilbert_symbol", "xgcd", "gcd",
]
