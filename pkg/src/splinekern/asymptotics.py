"""Pointwise bias and variance of spline estimators and the optimal bandwidth.

For an estimator with bandwidth ``h = h(k_q)`` and ``p = 2q - 1`` the leading
terms are

    bias(x)     = (-1)^{q+1} h^{2q} f^{(2q)}(x) C(k_q, x) / (2q)!
    variance(x) = sigma^2 / (N h) int K(x/h, t)^2 dt

on an interior interval whose width shrinks like ``h log(1/h)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .bandwidth import c1 as _c1
from .bandwidth import c2 as _c2
from .errors import DegenerateConfigurationError, InvalidArgumentError
from .kernel import AnyKernel, KernelModel, kernel_square_integral
from .specfun import bernoulli_poly

__all__ = [
    "AsymptoticPrediction",
    "bias_constant",
    "predict_bias",
    "predict_variance",
    "kernel_square_scaled",
    "optimal_bandwidth",
    "interior_interval",
    "predict",
]

INTERIOR_MARGIN = 1.25


def bias_constant(k_q: float, q: int, K: Optional[float], x: float, p: Optional[int] = None) -> float:
    """Bias constant ``C(k_q, x)``.

    For ``p + 1 = 2q`` (the default) both the knot term, a Bernoulli
    polynomial in ``{Kx}``, and the penalty term contribute. For
    ``p + 1 > 2q`` only the penalty term remains. ``k_q = inf`` gives the
    smoothing-spline value ``c2_tilde^{2q} (2q)!``.

    Examples
    --------
    >>> round(bias_constant(0.0, 1, 4, 0.0), 12)
    -0.166666666667
    """
    if p is None:
        p = 2 * q - 1
    if p + 1 < 2 * q:
        raise InvalidArgumentError("the bias expansion needs p + 1 >= 2q")
    if k_q < 0:
        raise InvalidArgumentError("k_q must be >= 0")
    fact = math.factorial(2 * q)
    knot = 0.0
    if p + 1 == 2 * q and math.isfinite(k_q):
        frac = (K * x) % 1.0
        knot = (-1) ** q * float(bernoulli_poly(2 * q, frac))
    if k_q < 1:
        return _c1(k_q, q) ** (2 * q) * (knot + fact * (k_q / math.pi) ** (2 * q))
    c2 = _c2(k_q, q)
    if math.isinf(k_q):
        return c2 ** (2 * q) * fact
    return c2 ** (2 * q) * (fact + knot * (math.pi / k_q) ** (2 * q))


def predict_bias(deriv2q: float, h: float, q: int, C: float) -> float:
    """Leading bias ``(-1)^{q+1} h^{2q} f^{(2q)} C / (2q)!``."""
    if not h > 0:
        raise InvalidArgumentError("h must be positive")
    return (-1) ** (q + 1) * h ** (2 * q) * deriv2q * C / math.factorial(2 * q)


def kernel_square_scaled(model: AnyKernel, x: float) -> float:
    """``int K(x/h, t)^2 dt = h int W(x, s)^2 ds``."""
    return model.h * kernel_square_integral(model, x)


def predict_variance(sigma: float, N: int, model: AnyKernel, x: float) -> float:
    """Leading variance ``sigma^2 N^{-1} int W(x, s)^2 ds``."""
    if sigma < 0:
        raise InvalidArgumentError("sigma must be >= 0")
    if N < 1:
        raise InvalidArgumentError("N must be positive")
    return sigma ** 2 / N * kernel_square_integral(model, x)


def optimal_bandwidth(deriv2q: float, sigma: float, N: int, q: int, C: float, Ksq: float) -> float:
    """Bandwidth minimising ``bias^2 + variance`` at fixed kernel shape.

    ``h_opt = [N 4q C^2 f^{(2q)2} / (sigma^2 ((2q)!)^2 Ksq)]^{-1/(4q+1)}``.
    """
    if deriv2q == 0 or C == 0:
        raise InvalidArgumentError("no finite optimal bandwidth when the bias term vanishes")
    if not (sigma > 0 and Ksq > 0 and N > 0):
        raise InvalidArgumentError("sigma, Ksq and N must be positive")
    ratio = N * 4 * q * C ** 2 * deriv2q ** 2 / (sigma ** 2 * math.factorial(2 * q) ** 2 * Ksq)
    return ratio ** (-1.0 / (4 * q + 1))


def interior_interval(model: AnyKernel, q: Optional[int] = None,
                      margin: float = INTERIOR_MARGIN) -> tuple[float, float]:
    """Interval ``[delta h log(1/h), 1 - delta h log(1/h)]`` with
    ``delta = margin * 2q / log(1/gamma)``."""
    q = model.q if q is None else q
    h = model.h
    if not 0 < h < 1:
        raise DegenerateConfigurationError(f"interior interval needs 0 < h < 1, got h={h}")
    gamma = model.decay[1]
    delta = margin * 2 * q / math.log(1.0 / gamma)
    a = delta * h * math.log(1.0 / h)
    if a >= 0.5:
        raise DegenerateConfigurationError(f"interior interval is empty (h={h:.4g})")
    return a, 1.0 - a


@dataclass(frozen=True)
class AsymptoticPrediction:
    x: float
    bias: float
    variance: float
    h_opt: Optional[float]
    interior: bool


def predict(model: KernelModel, x: float, deriv2q: float, sigma: float, N: int) -> AsymptoticPrediction:
    """Bias, variance, optimal bandwidth and interior flag at ``x``."""
    q = model.q
    C = bias_constant(model.k_q, q, model.K, x, p=model.p)
    bias = predict_bias(deriv2q, model.h, q, C)
    var = predict_variance(sigma, N, model, x)
    h_opt = None
    if deriv2q != 0 and C != 0 and sigma > 0:
        h_opt = optimal_bandwidth(deriv2q, sigma, N, q, C, kernel_square_scaled(model, x))
    try:
        a, b = interior_interval(model)
        inside = a <= x <= b
    except DegenerateConfigurationError:
        inside = False
    return AsymptoticPrediction(x, bias, var, h_opt, inside)
