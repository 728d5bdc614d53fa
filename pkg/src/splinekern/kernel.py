"""Asymptotic equivalent kernels of spline smoothers on the real line.

A spline estimator of degree ``p``, penalty order ``q``, ``K`` knot intervals
per unit length and smoothing parameter ``lambda`` has, away from the
boundary, the equivalent kernel

    W(x, t) = K sum_l alpha_l(x, t) sum_j r_j^{e_l} / P'(r_j)

where ``P`` is a palindromic polynomial of degree ``2p`` (the symbol),
``r_j`` are its ``p`` roots inside the unit disk and ``alpha_l`` are the
coefficients of the product of the two B-spline stencils at ``x`` and
``t``. On the unit circle ``w = exp(-2 pi i v)`` the symbol is

    w^{-p} P(w) = Q_{2p}(v) + lambda (2K)^{2q} sin(pi v)^{2q} Q_{2p-2q}(v).

The rescaled kernel ``K(x, t) = h W(hx, ht)`` depends on ``k_q`` only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .bandwidth import BandwidthInfo, bandwidth_h, c2_tilde, lambda_for
from .drbasis import gauss_legendre_pieces
from .errors import DegenerateConfigurationError, InvalidArgumentError
from .specfun import PolynomialR, bernoulli_poly, euler_frobenius
from .splines import SplineConfig, _locate, bspline_local, phi_exp, q_poly

__all__ = [
    "KernelModel",
    "SmoothingKernelModel",
    "symbol_polynomial",
    "build_kernel_model",
    "kernel_model_for_kq",
    "smoothing_limit_model",
    "alpha_coeffs",
    "eval_W",
    "eval_K_scaled",
    "kernel_rs",
    "kernel_ss",
    "kernel_moment",
    "kernel_square_integral",
    "quadrature_nodes",
    "moment_closed_form",
    "decay_constants",
    "periodic_kernel",
    "folded_kernel",
    "folding_tail_bound",
]

_IN_DISK = 1.0 - 1e-10
_MIN_DERIV = 1e-12


def symbol_polynomial(p: int, q: int, a: float) -> PolynomialR:
    """Symbol ``P`` of degree ``2p`` for ``a = lambda K^{2q}``.

    ``P(w) = Pi_{2p+1}(w)/(2p+1)! + (-1)^q a (1-w)^{2q} Pi_{2p-2q+1}(w)/(2p-2q+1)!``
    with ``Pi_n`` the Euler-Frobenius polynomial of index ``n``.
    """
    if not 0 < q <= p:
        raise InvalidArgumentError(f"need 0 < q <= p, got p={p}, q={q}")
    base = euler_frobenius(2 * p + 1).scale(Fraction(1, math.factorial(2 * p + 1)))
    diff = PolynomialR(tuple((-1) ** k * math.comb(2 * q, k) for k in range(2 * q + 1)))
    pen = (diff * euler_frobenius(2 * p - 2 * q + 1)).scale(
        Fraction((-1) ** q, math.factorial(2 * p - 2 * q + 1)))
    c0 = [float(c) for c in base.coeffs]
    c1 = [float(c) for c in pen.coeffs]
    return PolynomialR(tuple(u + a * v for u, v in zip(c0, c1)))


def _roots_in_disk(p: int, coeffs: np.ndarray):
    """The ``p`` roots of the palindromic symbol inside the unit disk."""
    coeffs = np.array(coeffs, dtype=float)
    lead = abs(coeffs[-1])
    if lead <= 1e-14 * np.abs(coeffs).max():
        # the symbol degenerates to w R(w): one root at 0, one at infinity
        coeffs[0] = coeffs[-1] = 0.0
    roots = np.roots(coeffs[::-1].astype(complex))
    poly = np.polynomial.Polynomial(coeffs)
    dpoly = poly.deriv()
    for _ in range(2):
        d = dpoly(roots)
        ok = np.abs(d) > 0
        roots = np.where(ok, roots - poly(roots) / np.where(ok, d, 1), roots)
    mod = np.abs(roots)
    if np.any(np.abs(mod - 1) <= 1e-10):
        raise DegenerateConfigurationError("symbol has a root on the unit circle")
    inside = roots[mod < _IN_DISK]
    if inside.size != p:
        raise DegenerateConfigurationError(
            f"expected {p} roots inside the unit disk, found {inside.size}")
    inside = inside[np.lexsort((inside.imag, np.abs(inside)))]
    deriv = dpoly(inside)
    if np.any(np.abs(deriv) < _MIN_DERIV):
        raise DegenerateConfigurationError("symbol has a repeated root inside the unit disk")
    return inside, deriv


@dataclass(frozen=True)
class KernelModel:
    """Equivalent kernel of one spline estimator.

    ``a = lambda K^{2q}`` determines the shape; ``K`` only rescales. ``roots``
    are the in-disk roots of ``symbol`` and ``deriv_at_roots`` the values of
    its derivative there.
    """

    config: SplineConfig
    a: float
    symbol: PolynomialR
    roots: np.ndarray
    deriv_at_roots: np.ndarray
    bandwidth: BandwidthInfo
    decay: tuple = field(default=(math.nan, math.nan))

    @property
    def p(self) -> int:
        return self.config.p

    @property
    def q(self) -> int:
        return self.config.q

    @property
    def K(self) -> int:
        return self.config.K

    @property
    def k_q(self) -> float:
        return self.bandwidth.k_q

    @property
    def h(self) -> float:
        return self.bandwidth.h


@dataclass(frozen=True)
class SmoothingKernelModel:
    """The ``K -> inf`` smoothing-spline limit; ``W(x, t) = lam^{-1/(2q)}
    K_ss((x - t) / lam^{1/(2q)})``."""

    q: int
    lam: float
    bandwidth: BandwidthInfo
    decay: tuple = field(default=(math.nan, math.nan))

    @property
    def k_q(self) -> float:
        return math.inf

    @property
    def h(self) -> float:
        return self.bandwidth.h


AnyKernel = Union[KernelModel, SmoothingKernelModel]


def build_kernel_model(config: SplineConfig, k_q: Optional[float] = None) -> KernelModel:
    """Symbol, roots, bandwidth and decay constants for ``config``.

    ``k_q`` may be given when ``config.lam`` was derived from it; see
    :func:`bandwidth_h`.
    """
    p, q, K = config.p, config.q, config.K
    a = config.lam * float(K) ** (2 * q)
    symbol = symbol_polynomial(p, q, a)
    roots, deriv = _roots_in_disk(p, symbol.as_array())
    model = KernelModel(config, a, symbol, roots, deriv, bandwidth_h(q, K, config.lam, k_q=k_q))
    return KernelModel(config, a, symbol, roots, deriv, model.bandwidth, decay_constants(model))


def kernel_model_for_kq(p: int, q: int, k_q: float, K: int = 1) -> KernelModel:
    """Model with ``lambda = (k_q / (pi K))^{2q}``."""
    return build_kernel_model(SplineConfig(p, q, K, lambda_for(k_q, q, K)), k_q=k_q)


def smoothing_limit_model(q: int, lam: float = 1.0) -> SmoothingKernelModel:
    model = SmoothingKernelModel(q, lam, bandwidth_h(q, None, lam, smoothing_limit=True))
    return SmoothingKernelModel(q, lam, model.bandwidth, decay_constants(model))


# ---------------------------------------------------------------------------
# evaluation


def _alpha_from_fracs(p: int, f1, f2) -> np.ndarray:
    a = bspline_local(p, f1)
    b = bspline_local(p, f2)
    a, b = np.broadcast_arrays(a, b)
    out = np.zeros(a.shape[:-1] + (2 * p + 1,))
    for j in range(p + 1):
        for jp in range(p + 1):
            out[..., p - j + jp] += a[..., j] * b[..., jp]
    return out


def alpha_coeffs(model: KernelModel, u1: float, u2: float) -> np.ndarray:
    """Coefficients ``alpha_l``, ``l = 0..2p``, of the stencil product.

    ``u1`` and ``u2`` are the fractional parts of ``Kx + (p+1)/2`` and
    ``Kt + (p+1)/2`` (for odd ``p`` simply ``{Kx}`` and ``{Kt}``).
    ``alpha_l`` is the coefficient of ``z^l`` in
    ``z^{p-d} Phi_p(Kx + (p+1)/2, z) Phi_p(Kt + (p+1)/2, 1/z)``.
    The coefficients are nonnegative and sum to one.
    """
    for u in (u1, u2):
        if not 0 <= u < 1:
            raise InvalidArgumentError(f"fractional parts must lie in [0, 1), got {u}")
    return _alpha_from_fracs(model.p, u1, u2)


def _resid_sum(roots, deriv, expo):
    # sum_j r_j^expo / P'(r_j), with 0^0 = 1 for a deflated root at zero
    powers = roots ** expo[..., None].astype(float)
    powers = np.where(expo[..., None] == 0, 1.0 + 0j, powers)
    return (powers / deriv).sum(axis=-1).real


def eval_W(model: AnyKernel, x, t):
    """Equivalent kernel ``W(x, t)``; broadcasts over ``x`` and ``t``."""
    if isinstance(model, SmoothingKernelModel):
        s = model.lam ** (1 / (2 * model.q))
        return kernel_ss(model.q, (np.asarray(x) - np.asarray(t)) / s) / s
    p, K = model.p, model.K
    shift = (p + 1) / 2
    n1, f1 = _locate(K * np.asarray(x, dtype=float) + shift)
    n2, f2 = _locate(K * np.asarray(t, dtype=float) + shift)
    alpha = _alpha_from_fracs(p, f1, f2)
    d = np.asarray(n1 - n2)
    e = d[..., None] + np.arange(2 * p + 1) - 1
    e = np.where(e >= 0, e, 2 * p - 2 - e)
    res = _resid_sum(model.roots, model.deriv_at_roots, e)
    out = K * (alpha * res).sum(axis=-1)
    return out if out.ndim else float(out)


def eval_K_scaled(model: AnyKernel, x, t):
    """Scaled kernel ``K(x, t) = h W(hx, ht)``."""
    h = model.h
    return h * eval_W(model, h * np.asarray(x, dtype=float), h * np.asarray(t, dtype=float))


def kernel_rs(p: int, x, t):
    """Regression-spline limit kernel (``lambda = 0``, unit knot spacing)."""
    return eval_W(build_kernel_model(SplineConfig(p, 1, 1, 0.0)), x, t)


def kernel_ss(q: int, u):
    """Smoothing-spline kernel, the Green's function of
    ``f + (-1)^q f^{(2q)} = g`` on the real line.

    Equals ``int exp(2 pi i u s) / (1 + (2 pi s)^{2q}) ds``; for ``q = 1``
    this is ``exp(-|u|) / 2``.
    """
    if q < 1:
        raise InvalidArgumentError("q must be >= 1")
    u = np.abs(np.asarray(u, dtype=float))
    out = np.zeros(u.shape, dtype=complex)
    for j in range(q):
        w = np.exp(1j * np.pi * (2 * j + 1) / (2 * q))
        out = out + 1j * np.exp(1j * u * w) / (2 * q * w ** (2 * q - 1))
    out = out.real
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# decay, moments, folding


def _rho_A(model: KernelModel) -> tuple[float, float]:
    # rho is floored so a deflated symbol (root at 0) keeps finite constants;
    # any rho' >= rho still gives a valid bound
    rho = max(float(np.abs(model.roots).max()), 1e-3)
    return rho, float((1.0 / np.abs(model.deriv_at_roots)).sum())


def decay_constants(model: AnyKernel) -> tuple[float, float]:
    """Constants ``(C, gamma)`` with ``|K(x, t)| <= C gamma^{|x - t|}``.

    For a spline model ``|W(x, t)| <= K A rho^{K|x-t| - 2p}`` with
    ``rho = max |r_j|`` and ``A = sum_j 1/|P'(r_j)|``, which gives
    ``gamma = rho^{hK}`` and ``C = hK A rho^{-2p}``. The smoothing limit uses
    ``gamma = exp(-sin(pi/2q)/c2_tilde)`` and ``C = (q+1)/(2q c2_tilde)``.
    """
    if isinstance(model, SmoothingKernelModel):
        ct = c2_tilde(model.q)
        s = math.sin(math.pi / (2 * model.q))
        return (model.q + 1) / (2 * model.q * ct), math.exp(-s / ct)
    rho, A = _rho_A(model)
    hK = model.h * model.K
    return hK * A * rho ** (-2 * model.p), rho ** hK


def _w_decay(model: AnyKernel) -> tuple[float, float]:
    # decay constants of W itself: |W(x, t)| <= Cw gw^{|x-t|}
    C, g = model.decay
    return C / model.h, g ** (1.0 / model.h)


def _truncation(model: AnyKernel, m: int, tol: float) -> float:
    Cw, gw = _w_decay(model)
    rate = -math.log(gw)
    T = 1.0 / rate
    # two-sided tail of |u|^m Cw gw^|u| beyond T, bounded crudely
    while 2 * Cw * math.exp(-rate * T) * sum(
            math.factorial(m) / math.factorial(m - k) * T ** (m - k) / rate ** (k + 1)
            for k in range(m + 1)) > tol:
        T *= 1.5
    return T


def quadrature_nodes(model: AnyKernel, x: float, m: int = 0, tol: float = 1e-12):
    """Nodes and weights for integrals of ``|t - x|^m`` times ``W(x, t)`` or
    ``W(x, t)^2`` over ``t``.

    Between knots the kernel is polynomial, so Gauss-Legendre on each knot
    interval is exact; the range is truncated where the decay bound
    guarantees a tail below ``tol``.
    """
    T = _truncation(model, m, tol)
    if isinstance(model, SmoothingKernelModel):
        s = model.lam ** (1 / (2 * model.q))
        breaks = x + s * np.concatenate([-np.arange(0, T / s + 1)[::-1], np.arange(1, T / s + 1)])
        return gauss_legendre_pieces(breaks, 30)
    K, p = model.K, model.p
    c = (p + 1) / 2
    lo = math.floor(K * (x - T) + c)
    hi = math.ceil(K * (x + T) + c)
    breaks = (np.arange(lo, hi + 1) - c) / K
    return gauss_legendre_pieces(breaks, p + m // 2 + 2)


def kernel_moment(model: AnyKernel, x: float, m: int, tol: float = 1e-12) -> float:
    """``mu_m(x) = int (t - x)^m W(x, t) dt``."""
    if m < 0:
        raise InvalidArgumentError("moment order must be >= 0")
    nodes, weights = quadrature_nodes(model, x, m, tol)
    vals = eval_W(model, np.full(nodes.shape, float(x)), nodes)
    return float(np.sum(weights * (nodes - x) ** m * vals))


def kernel_square_integral(model: AnyKernel, x: float, tol: float = 1e-12) -> float:
    """``int W(x, t)^2 dt``."""
    nodes, weights = quadrature_nodes(model, x, 0, tol)
    vals = eval_W(model, np.full(nodes.shape, float(x)), nodes)
    return float(np.sum(weights * vals ** 2))


def moment_closed_form(model: KernelModel, x: float) -> tuple[int, float]:
    """Order ``d = min(p+1, 2q)`` of the first nonvanishing moment beyond
    ``mu_0`` and its value.

    ``mu_d = -[d = p+1] B_{p+1}({Kx + (p+1)/2}) / K^{p+1} - [d = 2q] (-1)^q lambda (2q)!``
    with ``B_n`` the Bernoulli polynomial.
    """
    p, q, K = model.p, model.q, model.K
    d = min(p + 1, 2 * q)
    val = 0.0
    if d == p + 1:
        _, f = _locate(K * x + (p + 1) / 2)
        val -= float(bernoulli_poly(p + 1, float(f))) / K ** (p + 1)
    if d == 2 * q:
        val -= (-1) ** q * model.config.lam * math.factorial(2 * q)
    return d, val


def periodic_kernel(model: KernelModel, x, t):
    """Kernel of the continuous penalized projection onto 1-periodic splines
    (needs ``K`` integer): ``sum_i phi_i(x) conj phi_i(t) / (1 + lambda mu_i)``."""
    p, q, K = model.p, model.q, model.K
    i = np.arange(1, K + 1)
    z = i / K
    w = np.exp(-2j * np.pi * z)
    pen = np.where(i == K, 0.0, (2.0 * K * np.sin(np.pi * z)) ** (2 * q))
    q2p = q_poly(2 * p, z)
    mu = pen * q_poly(2 * p - 2 * q, z) / q2p
    x = np.asarray(x, dtype=float)[..., None]
    t = np.asarray(t, dtype=float)[..., None]
    fx = phi_exp(p, K * x + (p + 1) / 2, w)
    ft = phi_exp(p, K * t + (p + 1) / 2, w)
    out = (fx * ft.conj() / q2p / (1 + model.config.lam * mu)).sum(axis=-1).real
    return out if out.ndim else float(out)


def folded_kernel(model: KernelModel, x, t, L: int):
    """``sum_{l=-L}^{L} W(x, t + l)``."""
    return sum(eval_W(model, x, np.asarray(t) + l) for l in range(-L, L + 1))


def folding_tail_bound(model: KernelModel, L: int) -> float:
    """Bound on ``|folded_kernel(L) - periodic_kernel|`` for ``x, t in [0, 1)``."""
    rho, A = _rho_A(model)
    K, p = model.K, model.p
    return 2 * K * A * rho ** (-2 * p) * rho ** (K * L) / (1 - rho ** K)
