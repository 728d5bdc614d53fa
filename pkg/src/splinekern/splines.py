"""B-splines on equidistant knots, exponential splines and Q-polynomials.

Conventions
-----------
``M_p`` is the cardinal B-spline of degree ``p`` supported on ``[0, p+1]``.
The exponential spline is ``Phi_p(t, z) = sum_k z^k M_p(t - k)``; writing
``t = n + f`` with ``n`` integer and ``f in [0, 1)`` this is
``z^n sum_{j=0}^{p} z^{-j} M_p(f + j)``.

``Q_{p-1}(z) = sum_l sinc{pi (z + l)}^{p+1}`` is the symbol of the sequence
``M_p(k + (p+1)/2)`` (the centred B-spline at the integers).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import InvalidArgumentError, UnsupportedConfigurationError
from .specfun import _cardinal_pieces, cardinal_bspline_exact, euler_frobenius, sinc

__all__ = [
    "SplineConfig",
    "bspline_local",
    "bspline",
    "design_matrix",
    "grid_design_matrix",
    "phi_exp",
    "phi_exp_bspline_sum",
    "phi_sinc_series",
    "centered_symbol",
    "q_sinc",
    "q_poly",
    "q_series",
    "q_pm",
]


@dataclass(frozen=True)
class SplineConfig:
    """One estimator of the spline family: degree ``p``, penalty order ``q``,
    ``K`` knot intervals on ``[0, 1]``, smoothing parameter ``lam`` and
    sample size ``N`` (``None`` when only asymptotic objects are needed)."""

    p: int
    q: int
    K: int
    lam: float = 0.0
    N: Optional[int] = None

    def __post_init__(self):
        if not (0 < self.q <= self.p):
            raise InvalidArgumentError(f"need 0 < q <= p, got p={self.p}, q={self.q}")
        if self.K < 1:
            raise InvalidArgumentError(f"K must be positive, got {self.K}")
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise InvalidArgumentError(f"lambda must be finite and >= 0, got {self.lam}")
        if self.N is not None and not (1 <= self.K <= self.N):
            raise InvalidArgumentError(f"need K <= N, got K={self.K}, N={self.N}")

    @property
    def M(self) -> Optional[float]:
        return None if self.N is None else self.N / self.K

    @property
    def divisible(self) -> bool:
        return self.N is not None and self.N % self.K == 0

    @property
    def k_q(self) -> float:
        return self.lam ** (1.0 / (2 * self.q)) * math.pi * self.K

    def with_lam(self, lam: float) -> "SplineConfig":
        return SplineConfig(self.p, self.q, self.K, lam, self.N)


# ---------------------------------------------------------------------------
# cardinal B-spline pieces


@lru_cache(maxsize=None)
def _piece_matrix(p: int, deriv: int) -> np.ndarray:
    """``(p+1, p+1)`` array: row ``k`` holds the power coefficients (lowest
    first) in ``u`` of ``M_p^{(deriv)}(k + u)``."""
    out = np.zeros((p + 1, p + 1))
    for k, piece in enumerate(_cardinal_pieces(p)):
        coeffs = [Fraction(c) for c in piece]
        for _ in range(deriv):
            coeffs = [i * c for i, c in enumerate(coeffs)][1:] or [Fraction(0)]
        out[k, : len(coeffs)] = [float(c) for c in coeffs]
    return out


def bspline_local(p: int, u, deriv: int = 0) -> np.ndarray:
    """Values ``M_p^{(deriv)}(u + k)`` for ``k = 0..p``.

    ``u`` holds local coordinates in ``[0, 1]``; the result has shape
    ``u.shape + (p + 1,)``. The value at ``u = 1`` is the left limit, which
    is what is needed at the right end of a closed interval.
    """
    u = np.asarray(u, dtype=float)
    if deriv > p:
        return np.zeros(u.shape + (p + 1,))
    coeffs = _piece_matrix(p, deriv)
    powers = u[..., None] ** np.arange(p + 1)
    return powers @ coeffs.T


def _locate(s):
    """Split ``s`` into integer part and fraction, snapping values that sit
    within rounding distance of an integer onto it."""
    s = np.asarray(s, dtype=float)
    r = np.round(s)
    near = np.abs(s - r) <= 1e-12 * np.maximum(1.0, np.abs(s))
    s = np.where(near, r, s)
    n = np.floor(s)
    return n.astype(np.int64), s - n


def bspline(p: int, K: int, i: int, x: float, periodic: bool = True) -> float:
    """Value of one B-spline of degree ``p`` on the knots ``j/K``.

    Periodic splines are indexed ``i = 1..K``; ``B_i`` is centred at ``i/K``
    and wrapped onto ``[0, 1)``. Open splines are indexed ``i = 1..K+p`` on
    the knots ``-p/K, ..., (K+p)/K``. Knot arithmetic is exact: ``x`` is
    converted to a rational before locating its interval.
    """
    if p < 0:
        raise InvalidArgumentError("p must be >= 0")
    xr = Fraction(x)
    if periodic:
        if not 1 <= i <= K:
            raise InvalidArgumentError(f"periodic index must lie in 1..{K}, got {i}")
        s = K * (xr % 1) + Fraction(p + 1, 2) - i
        # sum over wraps
        total = Fraction(0)
        m = math.floor(s / K) if s >= 0 else -math.ceil(-s / K)
        for shift in range(m - (p + 1) // K - 2, m + 3):
            total += cardinal_bspline_exact(p, s - shift * K)
        return float(total)
    if not 1 <= i <= K + p:
        raise InvalidArgumentError(f"open index must lie in 1..{K + p}, got {i}")
    if xr == 1:
        # closed right end: left limit of the last interval
        s = K - 1 + p - (i - 1)
        pieces = _cardinal_pieces(p)
        if 0 <= s <= p:
            return float(sum(pieces[s]))
        return 0.0
    return float(cardinal_bspline_exact(p, K * xr + p - (i - 1)))


def design_matrix(p: int, K: int, x, periodic: bool, deriv: int = 0) -> np.ndarray:
    """Dense matrix of B-spline values (or derivatives w.r.t. ``x``) at ``x``.

    Columns follow :func:`bspline` indexing (column ``c`` is ``B_{c+1}``).
    Periodic columns are centred at ``(c+1)/K``; open columns cover the
    extended equidistant knots.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    scale = float(K) ** deriv
    if periodic:
        n, f = _locate(K * np.mod(x, 1.0) + (p + 1) / 2)
        vals = bspline_local(p, f, deriv) * scale
        out = np.zeros((x.size, K))
        rows = np.arange(x.size)
        for k in range(p + 1):
            np.add.at(out, (rows, np.mod(n - k - 1, K)), vals[:, k])
        return out
    n, f = _locate(K * x)
    right = n >= K
    n = np.where(right, K - 1, n)
    f = np.where(right, 1.0, f)
    if np.any(n < 0):
        raise InvalidArgumentError("open design points must lie in [0, 1]")
    vals = bspline_local(p, f, deriv) * scale
    out = np.zeros((x.size, K + p))
    rows = np.arange(x.size)
    for k in range(p + 1):
        out[rows, n + p - k] = vals[:, k]
    return out


def grid_design_matrix(p: int, K: int, N: int, periodic: bool) -> np.ndarray:
    """Design matrix at the points ``l/N``, ``l = 1..N``, located with
    integer arithmetic so no design point is assigned to the wrong knot
    interval."""
    l = np.arange(1, N + 1, dtype=np.int64)
    rows = np.arange(N)
    if periodic:
        # s = K l / N + (p + 1) / 2 = (2 K l + (p + 1) N) / (2 N)
        num = 2 * K * (l % N) + (p + 1) * N
        n, rem = np.divmod(num, 2 * N)
        vals = bspline_local(p, rem / (2 * N))
        out = np.zeros((N, K))
        for k in range(p + 1):
            np.add.at(out, (rows, np.mod(n - k - 1, K)), vals[:, k])
        return out
    n, rem = np.divmod(K * l, N)
    f = rem / N
    right = n >= K
    n = np.where(right, K - 1, n)
    f = np.where(right, 1.0, f)
    vals = bspline_local(p, f)
    out = np.zeros((N, K + p))
    for k in range(p + 1):
        out[rows, n + p - k] = vals[:, k]
    return out


# ---------------------------------------------------------------------------
# exponential splines


@lru_cache(maxsize=None)
def _ef_coeff_array(j: int) -> np.ndarray:
    if j == 0:
        return np.array([1.0])
    return euler_frobenius(j).as_array()


def phi_exp(p: int, t, z):
    """Exponential spline ``Phi_p(t, z)``.

    Evaluated from the Euler-Frobenius representation after clearing the
    ``(z - 1)^j`` denominators::

        Phi_p(t, z) = z^(floor(t) - p) / p! * sum_j C(p, j) ({t}(z - 1))^(p-j) Pi_j(z)

    which is a polynomial in ``z`` times a power of ``z``, so ``z = 1`` needs
    no special case and gives ``Phi_p(t, 1) = 1``. Broadcasts over ``t`` and
    ``z``.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise InvalidArgumentError("phi_exp is undefined at z = 0")
    n, f = _locate(t)
    n, f, z = np.broadcast_arrays(n, f, z)
    acc = np.zeros(z.shape, dtype=complex)
    for j in range(p + 1):
        pij = np.polyval(_ef_coeff_array(j)[::-1], z)
        acc = acc + math.comb(p, j) * (f * (z - 1)) ** (p - j) * pij
    out = z ** (n - p).astype(float) * acc / math.factorial(p)
    return out if out.ndim else out[()]


def phi_exp_bspline_sum(p: int, t, z):
    """``Phi_p(t, z)`` summed directly over the B-spline translates."""
    z = np.asarray(z, dtype=complex)
    n, f = _locate(t)
    vals = bspline_local(p, f)
    n, z = np.broadcast_arrays(n, z)
    acc = np.zeros(np.broadcast(n, vals[..., 0]).shape, dtype=complex)
    for j in range(p + 1):
        acc = acc + z ** (n - j).astype(float) * vals[..., j]
    return acc if acc.ndim else acc[()]


def phi_sinc_series(p: int, t, z: float, lmax: int = 10_000):
    """``Phi_p(t, exp(2 pi i z))`` from the Fourier series over ``|l| <= lmax``."""
    t = np.asarray(t, dtype=float)
    l = np.arange(-lmax, lmax + 1)
    coef = (-1.0) ** (l * (p + 1)) * sinc(np.pi * (z + l)) ** (p + 1)
    series = np.exp(2j * np.pi * np.multiply.outer(t, l)) @ coef
    return np.exp(2j * np.pi * z * t) / np.exp(1j * np.pi * z * (p + 1)) * series


# ---------------------------------------------------------------------------
# Q-polynomials


@lru_cache(maxsize=None)
def centered_symbol(p: int) -> tuple:
    """Exact values ``M_p(k + (p+1)/2)`` for ``k = 0..floor(p/2)``.

    These are the cosine coefficients of ``Q_{p-1}``; for odd ``p`` they are
    the middle-to-end Euler-Frobenius coefficients divided by ``p!``.
    """
    if p < 1:
        raise InvalidArgumentError("p must be >= 1")
    if p % 2:
        ef = euler_frobenius(p).coeffs
        mid = (p - 1) // 2
        return tuple(Fraction(ef[mid + k], math.factorial(p)) for k in range(mid + 1))
    half = Fraction(p + 1, 2)
    return tuple(cardinal_bspline_exact(p, half + k) for k in range(p // 2 + 1))


def q_sinc(p: int, z):
    """``Q_{p-1}(z) = sum_l sinc{pi (z + l)}^{p+1}`` in closed form.

    Computed as the cosine polynomial ``b_0 + 2 sum_k b_k cos(2 pi k z)``
    with the exact centred B-spline values ``b_k``.
    """
    if p < 1:
        raise InvalidArgumentError("p must be >= 1")
    b = centered_symbol(p)
    z = np.asarray(z, dtype=float)
    out = float(b[0]) * np.ones_like(z)
    for k in range(1, len(b)):
        out = out + 2.0 * float(b[k]) * np.cos(2 * np.pi * k * z)
    return out if out.ndim else float(out)


def q_poly(m: int, z):
    """``Q_m(z)``, i.e. :func:`q_sinc` with ``p = m + 1``."""
    return q_sinc(m + 1, z)


def q_series(p: int, z, lmax: int = 10_000):
    """Truncated series ``sum_{|l| <= lmax} sinc{pi (z + l)}^{p+1}``."""
    z = np.asarray(z, dtype=float)
    l = np.arange(-lmax, lmax + 1)
    return (sinc(np.pi * np.add.outer(z, l)) ** (p + 1)).sum(axis=-1)


def q_pm(p: int, M: float, z, N: Optional[int] = None):
    """``Q_{p,M}(z) = N^{-1} sum_{i=1}^N |Phi_p{i/M + (p+1)/2, exp(-2 pi i z)}|^2``.

    For integer ``M`` the average over one period of ``M`` points is used.
    A fractional ratio needs ``N`` and is evaluated by the defining sum.
    """
    if p < 1:
        raise InvalidArgumentError("p must be >= 1")
    z = np.asarray(z, dtype=float)
    w = np.exp(-2j * np.pi * z)
    Mi = round(M)
    if abs(M - Mi) < 1e-12 and Mi >= 1:
        t = np.arange(1, Mi + 1) / Mi + (p + 1) / 2
        count = Mi
    else:
        if N is None:
            raise UnsupportedConfigurationError("non-integer M = N/K needs N for the defining sum")
        t = np.arange(1, N + 1) / M + (p + 1) / 2
        count = N
    vals = phi_exp(p, t[:, None] if z.ndim else t, w)
    out = (np.abs(vals) ** 2).sum(axis=0) / count
    return out if np.ndim(out) else float(out)
