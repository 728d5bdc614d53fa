"""Explicit complex Demmler-Reinsch basis of periodic splines on ``[0, 1)``.

For periodic splines of degree ``p`` on ``K`` equidistant intervals, sampled
at ``l/N`` with ``K | N``, the functions

    psi_i(x) = Phi_p{Kx + (p+1)/2, exp(-2 pi i i/K)} / Q_{p,M}(i/K)^{1/2}

are orthonormal for the empirical inner product and orthogonal for the
``q``-th derivative inner product, with eigenvalues ``nu_i``. The family
``phi_i`` normalised by ``Q_{2p}`` plays the same role for the continuous
inner product with eigenvalues ``mu_i``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, UnsupportedConfigurationError
from .splines import SplineConfig, phi_exp, q_pm, q_poly

__all__ = [
    "DRBasis",
    "build_dr_basis",
    "dr_orthonormality_residuals",
    "phi_orthonormality_residuals",
    "gauss_legendre_pieces",
]


def _penalty_factor(K: int, q: int, i: np.ndarray) -> np.ndarray:
    s = (2.0 * K * np.sin(np.pi * i / K)) ** (2 * q)
    return np.where(i % K == 0, 0.0, s)


@dataclass(frozen=True)
class DRBasis:
    """Demmler-Reinsch basis for one periodic spline space.

    ``nu[i-1]`` and ``mu[i-1]`` hold the eigenvalues for frequency index
    ``i = 1..K``; ``q_pm_values`` and ``q_2p_values`` are the matching
    normalisers.
    """

    config: SplineConfig
    nu: np.ndarray
    mu: np.ndarray
    q_pm_values: np.ndarray = field(repr=False)
    q_2p_values: np.ndarray = field(repr=False)

    @property
    def K(self) -> int:
        return self.config.K

    def _raw(self, i, x, deriv: int) -> np.ndarray:
        p, K = self.config.p, self.config.K
        if deriv < 0 or deriv > p:
            raise InvalidArgumentError(f"derivative order must lie in 0..{p}")
        i = np.asarray(i)
        if np.any((i < 1) | (i > K)):
            raise InvalidArgumentError(f"basis index must lie in 1..{K}")
        w = np.exp(-2j * np.pi * i / K)
        x = np.asarray(x, dtype=float)
        t = K * x + (p + 1) / 2
        # d/dt Phi_p(t, w) = (1 - 1/w) Phi_{p-1}(t, w)
        factor = (K * (1 - 1 / w)) ** deriv
        return factor * phi_exp(p - deriv, t, w)

    def psi(self, i, x, deriv: int = 0):
        """``psi_i`` (or its ``deriv``-th derivative) at ``x``; ``i`` and ``x``
        broadcast."""
        i = np.asarray(i)
        return self._raw(i, x, deriv) / np.sqrt(self.q_pm_values[i - 1])

    def phi(self, i, x, deriv: int = 0):
        """``phi_i`` (or its ``deriv``-th derivative) at ``x``."""
        i = np.asarray(i)
        return self._raw(i, x, deriv) / np.sqrt(self.q_2p_values[i - 1])

    def psi_matrix(self, x, deriv: int = 0) -> np.ndarray:
        """Matrix with entry ``[a, i-1] = psi_i(x_a)``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return self.psi(np.arange(1, self.K + 1)[None, :], x[:, None], deriv)

    def phi_matrix(self, x, deriv: int = 0) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return self.phi(np.arange(1, self.K + 1)[None, :], x[:, None], deriv)


def build_dr_basis(config: SplineConfig) -> DRBasis:
    """Build the basis and eigenvalues for ``config`` (needs ``K | N``)."""
    if config.N is None:
        raise InvalidArgumentError("the Demmler-Reinsch basis needs a sample size N")
    if not config.divisible:
        raise UnsupportedConfigurationError(
            f"K={config.K} does not divide N={config.N}; the explicit basis needs integer M")
    p, q, K = config.p, config.q, config.K
    i = np.arange(1, K + 1)
    z = i / K
    qpm = np.atleast_1d(q_pm(p, config.N // K, z))
    q2p = np.atleast_1d(q_poly(2 * p, z))
    num = _penalty_factor(K, q, i) * q_poly(2 * p - 2 * q, z)
    return DRBasis(config=config, nu=num / qpm, mu=num / q2p, q_pm_values=qpm, q_2p_values=q2p)


def gauss_legendre_pieces(breaks, npts: int):
    """Nodes and weights of an ``npts``-point Gauss-Legendre rule on each
    interval between consecutive ``breaks``."""
    breaks = np.asarray(breaks, dtype=float)
    g, w = np.polynomial.legendre.leggauss(npts)
    a, b = breaks[:-1, None], breaks[1:, None]
    nodes = (a + b) / 2 + (b - a) / 2 * g
    weights = (b - a) / 2 * w
    return nodes.ravel(), weights.ravel()


def _unit_breaks(config: SplineConfig) -> np.ndarray:
    # knots of the basis functions: K x + (p+1)/2 integer
    K, p = config.K, config.p
    shift = ((p + 1) % 2) / (2 * K)
    inner = shift + np.arange(K + 1) / K
    return np.unique(np.clip(np.concatenate([[0.0, 1.0], inner]), 0.0, 1.0))


def _gram(basis: DRBasis, which: str, deriv: int) -> np.ndarray:
    nodes, weights = gauss_legendre_pieces(_unit_breaks(basis.config), basis.config.p + 1)
    mat = basis.psi_matrix(nodes, deriv) if which == "psi" else basis.phi_matrix(nodes, deriv)
    return (mat * weights[:, None]).T @ mat.conj()


def dr_orthonormality_residuals(basis: DRBasis) -> tuple[float, float]:
    """Largest deviations from the two orthogonality relations of ``psi``.

    Returns
    -------
    discrete : float
        ``max |N^{-1} sum_l psi_i(l/N) conj psi_j(l/N) - delta_ij|``.
    continuous : float
        ``max |int psi_i^{(q)} conj psi_j^{(q)} - nu_i delta_ij|`` divided by
        ``max(1, max nu)``. The eigenvalues grow like ``K^{2q}``, so the
        relative scale is the meaningful floating-point yardstick.
    """
    cfg = basis.config
    x = np.arange(1, cfg.N + 1) / cfg.N
    psi = basis.psi_matrix(x)
    discrete = np.abs(psi.T @ psi.conj() / cfg.N - np.eye(cfg.K)).max()
    gram = _gram(basis, "psi", cfg.q)
    scale = max(1.0, float(basis.nu.max()))
    continuous = np.abs(gram - np.diag(basis.nu)).max() / scale
    return float(discrete), float(continuous)


def phi_orthonormality_residuals(basis: DRBasis) -> tuple[float, float]:
    """Same as :func:`dr_orthonormality_residuals` for the ``phi`` family,
    with the continuous inner product in place of the empirical one."""
    cfg = basis.config
    plain = np.abs(_gram(basis, "phi", 0) - np.eye(cfg.K)).max()
    scale = max(1.0, float(basis.mu.max()))
    deriv = np.abs(_gram(basis, "phi", cfg.q) - np.diag(basis.mu)).max() / scale
    return float(plain), float(deriv)
