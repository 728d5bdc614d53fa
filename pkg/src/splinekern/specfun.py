"""Special functions: sinc, Euler-Frobenius and Bernoulli polynomials,
the Gauss hypergeometric series and zeta at even integers.

Everything that feeds a root finder or a closed form is computed in exact
rational arithmetic first and converted to floating point at the end.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "PolynomialR",
    "sinc",
    "cardinal_bspline_exact",
    "euler_frobenius",
    "bernoulli_number",
    "bernoulli_poly",
    "gauss_2f1",
    "zeta_even",
]

_MAX_BERNOULLI_DEGREE = 12
_MAX_ZETA_ARG = 20


def sinc(x):
    """Unnormalized sinc, ``sin(x)/x`` with ``sinc(0) = 1``."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


@dataclass(frozen=True)
class PolynomialR:
    """Real polynomial stored lowest degree first.

    Coefficients may be ints, Fractions or floats; evaluation accepts real
    or complex scalars and numpy arrays.
    """

    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(self.coeffs)
        if not coeffs:
            coeffs = (0,)
        # strip trailing zeros, keeping at least the constant term
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        x = np.asarray(x) if not np.isscalar(x) else x
        out = 0
        for c in reversed(self.coeffs):
            out = out * x + float(c)
        return out

    def derivative(self) -> "PolynomialR":
        return PolynomialR(tuple(k * c for k, c in enumerate(self.coeffs))[1:] or (0,))

    def as_array(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def is_palindromic(self) -> bool:
        return self.coeffs == self.coeffs[::-1]

    def __mul__(self, other: "PolynomialR") -> "PolynomialR":
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return PolynomialR(tuple(out))

    def __add__(self, other: "PolynomialR") -> "PolynomialR":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return PolynomialR(tuple(x + y for x, y in zip(a, b)))

    def scale(self, factor) -> "PolynomialR":
        return PolynomialR(tuple(factor * c for c in self.coeffs))


@lru_cache(maxsize=None)
def _cardinal_pieces(p: int) -> tuple:
    """Piecewise coefficients of the cardinal B-spline of degree ``p``.

    Returns a tuple of ``p + 1`` polynomials (lowest degree first, Fraction
    coefficients) in the local variable ``u in [0, 1)``; piece ``k`` gives
    ``M_p(k + u)``. Built with the rational Cox-de Boor recursion
    ``M_p(t) = (t M_{p-1}(t) + (p + 1 - t) M_{p-1}(t - 1)) / p``.
    """
    if p == 0:
        return ((Fraction(1),),)
    prev = _cardinal_pieces(p - 1)

    def shifted(poly, k):
        # poly in u, multiplied by (k + u)
        out = [Fraction(0)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            out[i] += k * c
            out[i + 1] += c
        return out

    pieces = []
    for k in range(p + 1):
        acc = [Fraction(0)] * (p + 1)
        if k < p:  # t M_{p-1}(t) with t = k + u
            for i, c in enumerate(shifted(prev[k], k)):
                acc[i] += c
        if k >= 1:  # (p + 1 - t) M_{p-1}(t - 1), t - 1 = (k - 1) + u
            poly = prev[k - 1]
            # (p + 1 - k - u) * poly(u)
            for i, c in enumerate(poly):
                acc[i] += (p + 1 - k) * c
                acc[i + 1] -= c
        pieces.append(tuple(c / p for c in acc))
    return tuple(pieces)


def cardinal_bspline_exact(p: int, t) -> Fraction:
    """Exact value of the cardinal B-spline ``M_p`` (support ``[0, p+1]``)
    at a rational point ``t``."""
    t = Fraction(t)
    if t < 0 or t >= p + 1:
        return Fraction(0)
    k = math.floor(t)
    u = t - k
    out = Fraction(0)
    for c in reversed(_cardinal_pieces(p)[k]):
        out = out * u + c
    return out


@lru_cache(maxsize=None)
def euler_frobenius(p: int) -> PolynomialR:
    """Euler-Frobenius polynomial of index ``p`` (degree ``p - 1``).

    The coefficients are ``p!`` times the degree-``p`` B-spline values at its
    interior integer knots, so ``Pi_3 = 1 + 4u + u^2``.

    >>> euler_frobenius(4).coeffs
    (1, 11, 11, 1)
    """
    if not isinstance(p, (int, np.integer)) or p < 1:
        raise InvalidArgumentError(f"euler_frobenius needs an integer p >= 1, got {p!r}")
    fact = math.factorial(p)
    coeffs = []
    for k in range(1, p + 1):
        v = fact * cardinal_bspline_exact(p, k)
        assert v.denominator == 1
        coeffs.append(int(v))
    return PolynomialR(tuple(coeffs))


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """Bernoulli number ``B_n`` with the ``B_1 = -1/2`` convention."""
    if n < 0:
        raise InvalidArgumentError("n must be nonnegative")
    if n == 0:
        return Fraction(1)
    # sum_{k<n+1} C(n+1, k) B_k = 0
    acc = Fraction(0)
    for k in range(n):
        acc += math.comb(n + 1, k) * bernoulli_number(k)
    return -acc / (n + 1)


@lru_cache(maxsize=None)
def _bernoulli_coeffs(n: int) -> tuple:
    # B_n(x) = sum_k C(n, k) B_k x^(n-k), stored lowest degree first
    return tuple(math.comb(n, n - j) * bernoulli_number(n - j) for j in range(n + 1))


def bernoulli_poly(n: int, x):
    """Bernoulli polynomial ``B_n(x)`` for ``0 <= n <= 12``.

    Uses the generating-function convention, ``B_2(x) = x^2 - x + 1/6``.
    Accepts scalars or arrays.
    """
    if not isinstance(n, (int, np.integer)) or n < 0 or n > _MAX_BERNOULLI_DEGREE:
        raise InvalidArgumentError(
            f"bernoulli_poly supports 0 <= n <= {_MAX_BERNOULLI_DEGREE}, got {n!r}")
    return PolynomialR(_bernoulli_coeffs(n))(x)


def _series_2f1(a, b, c, x, tol=1e-16, max_terms=100_000):
    term = 1.0
    total = 1.0
    for n in range(max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * x
        total += term
        if abs(term) < tol * abs(total):
            return total
        if term == 0.0:
            return total
    raise InvalidArgumentError(
        f"2F1 series did not converge in {max_terms} terms (a={a}, b={b}, c={c}, x={x})")


def _nonpositive_integer(v) -> bool:
    return v <= 0 and float(v).is_integer()


def gauss_2f1(a: float, b: float, c: float, x: float) -> float:
    """Gauss hypergeometric function ``2F1(a, b; c; x)`` for ``x <= 0``.

    The direct series is used on ``[-1/2, 0]``, the Pfaff transformation
    ``(1-x)^{-a} 2F1(a, c-b; c; x/(x-1))`` on ``[-2, -1/2)``, and the
    ``1/x`` connection formula below ``-2`` (falling back to Pfaff when
    ``a - b`` is an integer). All three keep the series argument at most
    ``2/3`` in modulus, so convergence is geometric.
    """
    a, b, c, x = float(a), float(b), float(c), float(x)
    if _nonpositive_integer(c):
        raise InvalidArgumentError(f"c must not be a nonpositive integer, got {c}")
    if not math.isfinite(x) or x > 0:
        raise InvalidArgumentError(f"gauss_2f1 is implemented for x <= 0 only, got {x}")
    if x == 0.0:
        return 1.0
    if x >= -0.5:
        return _series_2f1(a, b, c, x)
    ab_integer = float(a - b).is_integer()
    if x >= -2.0 or ab_integer:
        y = x / (x - 1.0)
        return (1.0 - x) ** (-a) * _series_2f1(a, c - b, c, y)
    # 1/x connection formula
    z = 1.0 / x
    g = math.gamma
    t1 = 0.0
    if not (_nonpositive_integer(b) or _nonpositive_integer(c - a)):
        t1 = g(c) * g(b - a) / (g(b) * g(c - a)) * (-x) ** (-a) * _series_2f1(a, 1 - c + a, 1 - b + a, z)
    t2 = 0.0
    if not (_nonpositive_integer(a) or _nonpositive_integer(c - b)):
        t2 = g(c) * g(a - b) / (g(a) * g(c - b)) * (-x) ** (-b) * _series_2f1(b, 1 - c + b, 1 - a + b, z)
    return t1 + t2


def zeta_even(s: int) -> float:
    """Riemann zeta at an even integer ``2 <= s <= 20`` via Bernoulli numbers."""
    if not isinstance(s, (int, np.integer)) or s < 2 or s > _MAX_ZETA_ARG or s % 2:
        raise InvalidArgumentError(f"zeta_even needs an even integer in [2, 20], got {s!r}")
    n = s // 2
    b = bernoulli_number(s)
    value = (-1) ** (n + 1) * b * Fraction(2 ** (s - 1), math.factorial(s))
    return float(value) * math.pi ** s
