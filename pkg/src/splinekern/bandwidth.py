"""Estimator-type index ``k_q`` and the bandwidth ``h(k_q)``.

The bandwidth is defined by

    1 / h = int_0^K dx / (1 + lambda (pi x)^{2q}),

which after substituting ``y = lambda^{1/(2q)} pi x`` depends on ``lambda``,
``K`` only through the scale ``lambda^{1/(2q)}`` and ``k_q = lambda^{1/(2q)} pi K``.
The integral is evaluated with a hypergeometric function; ``k_q < 1`` uses
the series in ``-k^{2q}``, ``k_q >= 1`` the complementary tail in ``-k^{-2q}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import InvalidArgumentError
from .specfun import gauss_2f1, sinc

__all__ = ["BandwidthInfo", "k_index", "c1", "c2", "c2_tilde", "bandwidth_h", "lambda_for"]


def k_index(lam: float, q: int, K: float) -> float:
    """``k_q = lambda^{1/(2q)} pi K``."""
    if lam < 0 or not math.isfinite(lam):
        raise InvalidArgumentError(f"lambda must be finite and >= 0, got {lam}")
    if K < 1:
        raise InvalidArgumentError(f"K must be >= 1, got {K}")
    if q < 1:
        raise InvalidArgumentError(f"q must be >= 1, got {q}")
    return lam ** (1.0 / (2 * q)) * math.pi * K


def lambda_for(k_q: float, q: int, K: float) -> float:
    """Smoothing parameter giving index ``k_q`` with ``K`` intervals."""
    if k_q < 0:
        raise InvalidArgumentError(f"k_q must be >= 0, got {k_q}")
    return (k_q / (math.pi * K)) ** (2 * q)


def c2_tilde(q: int) -> float:
    """``1 / (pi sinc(pi / (2q)))``, the large-``k_q`` limit of ``c2``."""
    return 1.0 / (math.pi * float(sinc(math.pi / (2 * q))))


def c1(k: float, q: int) -> float:
    """``k^{-1} int_0^k dy / (1 + y^{2q})``; equals 1 at ``k = 0``."""
    if k < 0:
        raise InvalidArgumentError("k_q must be >= 0")
    if k == 0:
        return 1.0
    if k > 1:
        return math.pi * c2(k, q) / k
    a = 1.0 / (2 * q)
    return gauss_2f1(1.0, a, 1.0 + a, -(k ** (2 * q)))


def c2(k: float, q: int) -> float:
    """``pi^{-1} int_0^k dy / (1 + y^{2q})``; tends to ``c2_tilde(q)``."""
    if k < 0:
        raise InvalidArgumentError("k_q must be >= 0")
    if math.isinf(k):
        return c2_tilde(q)
    if k < 1:
        return k * c1(k, q) / math.pi
    b = 1.0 - 1.0 / (2 * q)
    tail = k ** (1 - 2 * q) * gauss_2f1(1.0, b, 1.0 + b, -(k ** (-2 * q))) / (2 * q - 1)
    return c2_tilde(q) - tail / math.pi


@dataclass(frozen=True)
class BandwidthInfo:
    """Bandwidth and regime constants of one estimator.

    ``regime`` is ``"small"`` for ``k_q < 1`` (then ``h = 1/(K c1)``) and
    ``"large"`` otherwise (``h = lambda^{1/(2q)} / c2``). The smoothing-spline
    limit has ``k_q = inf`` and ``K = None``.
    """

    q: int
    lam: float
    K: Optional[float]
    k_q: float
    h: float
    regime: str
    c1: Optional[float]
    c2: Optional[float]
    c2_tilde: float

    @property
    def smoothing_limit(self) -> bool:
        return self.K is None


def bandwidth_h(q: int, K: Optional[float], lam: float, smoothing_limit: bool = False,
                k_q: Optional[float] = None) -> BandwidthInfo:
    """Bandwidth ``h(k_q)`` for penalty order ``q``, ``K`` intervals and
    smoothing parameter ``lam``.

    Pass ``smoothing_limit=True`` (and any ``K``) for the ``K -> inf``
    smoothing spline, which needs ``lam > 0``. When ``lam`` was derived from
    a target index, passing that ``k_q`` avoids rounding it across the
    regime boundary at 1.

    Examples
    --------
    >>> bandwidth_h(2, 10, 0.0).h
    0.1
    """
    ct = c2_tilde(q)
    if smoothing_limit:
        if not lam > 0:
            raise InvalidArgumentError("the smoothing-spline limit needs lambda > 0")
        return BandwidthInfo(q, lam, None, math.inf, lam ** (1 / (2 * q)) / ct, "large", None, ct, ct)
    k = k_index(lam, q, K)
    if k_q is not None:
        if not math.isclose(k, k_q, rel_tol=1e-9, abs_tol=1e-300):
            raise InvalidArgumentError(f"k_q={k_q} is inconsistent with lambda and K (gives {k})")
        k = float(k_q)
    if k < 1:
        cc1 = c1(k, q)
        return BandwidthInfo(q, lam, K, k, 1.0 / (K * cc1), "small", cc1, None, ct)
    cc2 = c2(k, q)
    return BandwidthInfo(q, lam, K, k, lam ** (1 / (2 * q)) / cc2, "large", None, cc2, ct)
