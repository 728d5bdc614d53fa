"""Penalized spline fits on the equidistant design ``x_i = i/N``.

The estimator minimises

    N^{-1} sum_i (Y_i - s(x_i))^2 + lambda int_0^1 s^{(q)}(x)^2 dx

over splines of degree ``p`` with ``K`` equidistant knot intervals, either
in the periodic space (``K`` functions) or the open space (``K + p``
functions on extended equidistant knots).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np
from scipy import linalg

from .bandwidth import lambda_for
from .drbasis import build_dr_basis, gauss_legendre_pieces
from .errors import DegenerateConfigurationError, InvalidArgumentError
from .splines import SplineConfig, design_matrix, grid_design_matrix

__all__ = ["Dataset", "FitResult", "fit", "effective_kernel_row", "gcv", "select_model"]


@dataclass(frozen=True)
class Dataset:
    """Responses ``y`` observed at ``x_i = i/N``, ``i = 1..N``."""

    y: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if y.ndim != 1 or y.size < 2:
            raise InvalidArgumentError("y must be a one-dimensional array with at least 2 values")
        if not np.all(np.isfinite(y)):
            raise InvalidArgumentError("y contains non-finite values")
        object.__setattr__(self, "y", y)

    @property
    def N(self) -> int:
        return self.y.size

    @property
    def x(self) -> np.ndarray:
        return np.arange(1, self.N + 1) / self.N

    @classmethod
    def from_xy(cls, x, y, rtol: float = 1e-9) -> "Dataset":
        """Validate that ``x`` is the grid ``i/N`` (in order) and wrap ``y``."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != y.shape:
            raise InvalidArgumentError("x and y must have the same length")
        grid = np.arange(1, x.size + 1) / x.size
        if x.ndim != 1 or not np.allclose(x, grid, rtol=0, atol=rtol):
            raise InvalidArgumentError("x must be the uniform grid i/N, i = 1..N")
        return cls(y)


# ---------------------------------------------------------------------------
# linear algebra back ends


def _penalty_breaks(K: int, p: int, periodic: bool) -> np.ndarray:
    if periodic:
        shift = ((p + 1) % 2) / (2 * K)
        inner = shift + np.arange(K + 1) / K
        return np.unique(np.clip(np.concatenate([[0.0, 1.0], inner]), 0.0, 1.0))
    return np.arange(K + 1) / K


@lru_cache(maxsize=128)
def _penalty_gram(K: int, p: int, q: int, periodic: bool) -> np.ndarray:
    """``int_0^1 B_i^{(q)} B_j^{(q)}``, exact by Gauss-Legendre per piece."""
    nodes, weights = gauss_legendre_pieces(_penalty_breaks(K, p, periodic), p + 1)
    D = design_matrix(p, K, nodes, periodic, deriv=q)
    out = (D * weights[:, None]).T @ D
    out.setflags(write=False)
    return out


@lru_cache(maxsize=128)
def _grid_design(N: int, K: int, p: int, periodic: bool):
    B = grid_design_matrix(p, K, N, periodic)
    G = B.T @ B / N
    B.setflags(write=False)
    G.setflags(write=False)
    return B, G


class _BSplineSolver:
    """Penalized normal equations ``(B'B/N + lambda Omega) c = B'y/N``."""

    def __init__(self, N: int, cfg: SplineConfig, periodic: bool):
        self.p, self.K, self.periodic = cfg.p, cfg.K, periodic
        self.B, G = _grid_design(N, cfg.K, cfg.p, periodic)
        A = G + cfg.lam * _penalty_gram(cfg.K, cfg.p, cfg.q, periodic)
        self.N = N
        try:
            if periodic:
                self._factor = ("dense", linalg.cho_factor(A, lower=False))
            else:
                self._factor = ("banded", linalg.cholesky_banded(_to_upper_banded(A, cfg.p)))
        except linalg.LinAlgError as exc:
            raise DegenerateConfigurationError(
                f"penalized normal equations are singular for {cfg}") from exc
        self.hat_trace = float(np.trace(self.solve(G)))

    def solve(self, rhs):
        kind, fac = self._factor
        if kind == "dense":
            return linalg.cho_solve(fac, rhs)
        return linalg.cho_solve_banded((fac, False), rhs)

    def coefficients(self, y):
        return self.solve(self.B.T @ y / self.N)

    def basis(self, x):
        return design_matrix(self.p, self.K, np.mod(x, 1.0) if self.periodic else x, self.periodic)

    def predict(self, coef, x):
        return self.basis(x) @ coef

    def fitted(self, coef):
        return self.B @ coef

    def weights(self, x):
        # W(x, x_i) = b(x)' A^{-1} b(x_i)
        v = self.solve(self.basis(x).T)
        return (self.B @ v).T


def _to_upper_banded(A: np.ndarray, bw: int) -> np.ndarray:
    n = A.shape[0]
    ab = np.zeros((bw + 1, n))
    for k in range(bw + 1):
        ab[bw - k, k:] = np.diagonal(A, k)
    return ab


@lru_cache(maxsize=128)
def _dr_psi(N: int, K: int, p: int, q: int):
    basis = build_dr_basis(SplineConfig(p, q, K, 0.0, N))
    psi = basis.psi_matrix(np.arange(1, N + 1) / N)
    psi.setflags(write=False)
    return basis, psi


class _DRSolver:
    """Diagonal solve in the Demmler-Reinsch basis (periodic space, ``K | N``)."""

    def __init__(self, N: int, cfg: SplineConfig):
        self.N = N
        self.dr, self.psi = _dr_psi(N, cfg.K, cfg.p, cfg.q)
        self.shrink = 1.0 / (1.0 + cfg.lam * self.dr.nu)
        self.hat_trace = float(self.shrink.sum())

    def coefficients(self, y):
        return self.shrink * (self.psi.conj().T @ y) / self.N

    def predict(self, coef, x):
        return (self.dr.psi_matrix(x) @ coef).real

    def fitted(self, coef):
        return (self.psi @ coef).real

    def weights(self, x):
        px = self.dr.psi_matrix(x) * self.shrink
        return (px @ self.psi.conj().T).real


@lru_cache(maxsize=512)
def _solver(N: int, cfg: SplineConfig, periodic: bool, method: str):
    if periodic and method == "dr":
        return _DRSolver(N, cfg)
    return _BSplineSolver(N, cfg, periodic)


# ---------------------------------------------------------------------------
# public API


@dataclass(frozen=True)
class FitResult:
    """One penalized spline fit.

    ``coefficients`` are Demmler-Reinsch coefficients (complex) when
    ``method == "dr"`` and B-spline coefficients otherwise.
    """

    config: SplineConfig
    periodic: bool
    method: str
    coefficients: np.ndarray
    fitted: np.ndarray
    hat_trace: float
    rss: float
    _solver: object = field(repr=False, compare=False)

    @property
    def N(self) -> int:
        return self.fitted.size

    def predict(self, x) -> np.ndarray:
        """Fitted spline evaluated at ``x`` (inside ``[0, 1]``)."""
        return np.asarray(self._solver.predict(self.coefficients, np.atleast_1d(x)))


def fit(data: Dataset, config: SplineConfig, periodic: bool = False,
        method: str = "auto") -> FitResult:
    """Penalized least-squares spline fit.

    Parameters
    ----------
    data : Dataset
    config : SplineConfig
        ``config.N`` is ignored; the sample size comes from ``data``.
    periodic : bool
        Fit in the periodic spline space.
    method : {"auto", "dr", "direct"}
        ``"dr"`` diagonalises in the Demmler-Reinsch basis (periodic and
        ``K | N`` only); ``"direct"`` solves the normal equations. ``"auto"``
        picks ``"dr"`` whenever it applies.
    """
    N = data.N
    cfg = SplineConfig(config.p, config.q, config.K, config.lam, N)
    if method not in ("auto", "dr", "direct"):
        raise InvalidArgumentError(f"unknown method {method!r}")
    if method == "auto":
        method = "dr" if periodic and N % cfg.K == 0 else "direct"
    if method == "dr" and not (periodic and N % cfg.K == 0):
        raise InvalidArgumentError("the Demmler-Reinsch path needs a periodic fit with K | N")
    if not periodic and cfg.K + cfg.p > N:
        raise InvalidArgumentError(f"open space of dimension {cfg.K + cfg.p} exceeds N={N}")
    solver = _solver(N, cfg, periodic, method)
    coef = solver.coefficients(data.y)
    fitted = solver.fitted(coef)
    rss = float(np.sum((data.y - fitted) ** 2))
    return FitResult(cfg, periodic, method, coef, fitted, solver.hat_trace, rss, solver)


def effective_kernel_row(result: FitResult, x) -> np.ndarray:
    """Weights ``W(x, x_i)`` with ``fhat(x) = N^{-1} sum_i W(x, x_i) Y_i``.

    A scalar ``x`` gives a vector of length ``N``; an array gives one row
    per point.
    """
    rows = result._solver.weights(np.atleast_1d(np.asarray(x, dtype=float)))
    return rows[0] if np.ndim(x) == 0 else rows


def gcv(result: FitResult) -> float:
    """Generalized cross validation ``N rss / (N - tr S)^2``."""
    N = result.N
    if result.hat_trace >= N - 1e-9 * N:
        raise DegenerateConfigurationError("GCV is undefined for an interpolating fit")
    return N * result.rss / (N - result.hat_trace) ** 2


def select_model(data: Dataset, p: int, q: int, k_q: float, K_range: Iterable[int],
                 periodic: bool = False, loss: str = "mean"):
    """Pick ``K`` (and ``lambda = (k_q/(pi K))^{2q}``) minimising GCV.

    Candidates that are infeasible for the sample size are skipped; ties go
    to the smaller ``K``.

    ``loss="sum"`` fits with the unnormalised residual sum
    ``sum_i (Y_i - s(x_i))^2 + lambda int s^{(q)2}``, i.e. with ``lambda / N``
    in the mean-loss criterion; the returned ``lam`` is still the nominal one.

    Returns
    -------
    K, lam, FitResult
    """
    if k_q < 0 or not math.isfinite(k_q):
        raise InvalidArgumentError(f"k_q must be finite and >= 0, got {k_q}")
    if loss not in ("mean", "sum"):
        raise InvalidArgumentError(f"loss must be 'mean' or 'sum', got {loss!r}")
    weight = 1.0 if loss == "mean" else 1.0 / data.N
    best: Optional[tuple] = None
    for K in sorted(set(int(k) for k in K_range)):
        if K < 1 or K > data.N or (not periodic and K + p > data.N):
            continue
        lam = lambda_for(k_q, q, K)
        try:
            res = fit(data, SplineConfig(p, q, K, lam * weight), periodic=periodic)
            score = gcv(res)
        except DegenerateConfigurationError:
            continue
        if best is None or score < best[0] * (1 - 1e-12):
            best = (score, K, lam, res)
    if best is None:
        raise InvalidArgumentError("no feasible K in the requested range")
    return best[1], best[2], best[3]
