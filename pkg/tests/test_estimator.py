import math

import numpy as np
import pytest

from splinekern.bandwidth import k_index, lambda_for
from splinekern.drbasis import build_dr_basis
from splinekern.errors import DegenerateConfigurationError, InvalidArgumentError
from splinekern.estimator import Dataset, effective_kernel_row, fit, gcv, select_model
from splinekern.splines import SplineConfig, design_matrix


@pytest.fixture
def noisy(rng):
    N = 120
    x = np.arange(1, N + 1) / N
    return Dataset(np.sin(2 * np.pi * x) + 0.3 * x + 0.1 * rng.standard_normal(N))


class TestDataset:
    def test_grid(self):
        d = Dataset([1.0, 2.0, 3.0, 4.0])
        assert np.array_equal(d.x, [0.25, 0.5, 0.75, 1.0])
        assert d.N == 4

    def test_from_xy(self):
        x = np.arange(1, 11) / 10
        assert Dataset.from_xy(x, x ** 2).N == 10
        with pytest.raises(InvalidArgumentError):
            Dataset.from_xy(x ** 2, x)
        with pytest.raises(InvalidArgumentError):
            Dataset.from_xy(x[::-1], x)

    @pytest.mark.parametrize("y", [[1.0], [[1.0, 2.0]], [1.0, np.nan, 2.0]])
    def test_invalid(self, y):
        with pytest.raises(InvalidArgumentError):
            Dataset(y)


class TestFit:
    @pytest.mark.parametrize("q", [1, 2])
    def test_interpolation_when_k_equals_n(self, q, rng):
        N = 16
        data = Dataset(rng.standard_normal(N))
        res = fit(data, SplineConfig(2 * q - 1, q, N, 0.0), periodic=True)
        assert np.allclose(res.fitted, data.y, atol=1e-10)
        assert res.hat_trace == pytest.approx(N, abs=1e-9)

    @pytest.mark.parametrize("periodic, K", [(True, 10), (True, 7), (False, 9)])
    def test_normal_equations(self, noisy, periodic, K):
        res = fit(noisy, SplineConfig(3, 2, K, 0.0), periodic=periodic)
        B = design_matrix(3, K, noisy.x, periodic)
        assert np.abs(B.T @ (noisy.y - res.fitted)).max() < 1e-10
        dim = K if periodic else K + 3
        assert res.hat_trace == pytest.approx(dim, abs=1e-9)

    @pytest.mark.parametrize("p, q, K, kq", [(3, 2, 10, 1.5), (1, 1, 20, 0.5), (2, 1, 8, 3.0),
                                             (4, 2, 24, 0.9), (3, 3, 12, 2.0)])
    def test_dr_equals_direct(self, noisy, p, q, K, kq):
        cfg = SplineConfig(p, q, K, lambda_for(kq, q, K))
        a = fit(noisy, cfg, periodic=True, method="dr")
        b = fit(noisy, cfg, periodic=True, method="direct")
        assert np.abs(a.fitted - b.fitted).max() < 1e-8
        assert a.hat_trace == pytest.approx(b.hat_trace, abs=1e-8)
        xs = np.linspace(0, 1, 33)
        assert np.abs(a.predict(xs) - b.predict(xs)).max() < 1e-8
        assert np.abs(effective_kernel_row(a, xs) - effective_kernel_row(b, xs)).max() < 1e-7

    def test_dr_matches_eigen_expansion(self, noisy):
        N, K, lam = noisy.N, 12, 1e-5
        cfg = SplineConfig(3, 2, K, lam, N)
        basis = build_dr_basis(cfg)
        P = basis.psi_matrix(noisy.x)
        shrink = 1 / (1 + lam * basis.nu)
        ref = ((P * shrink) @ (P.conj().T @ noisy.y) / N).real
        res = fit(noisy, cfg, periodic=True, method="direct")
        assert np.abs(res.fitted - ref).max() < 1e-8
        assert res.hat_trace == pytest.approx(shrink.sum(), abs=1e-10)

    @pytest.mark.parametrize("periodic", [True, False])
    def test_rss_monotone_in_lambda(self, noisy, periodic):
        lams = [0.0, 1e-8, 1e-6, 1e-4, 1e-2, 1.0]
        rss = [fit(noisy, SplineConfig(3, 2, 15, lam), periodic=periodic).rss for lam in lams]
        assert np.all(np.diff(rss) >= -1e-12)

    @pytest.mark.parametrize("lam", [0.0, 1e-4, 10.0])
    def test_open_fit_reproduces_linear(self, lam):
        N = 100
        x = np.arange(1, N + 1) / N
        res = fit(Dataset(2.0 - 3.0 * x), SplineConfig(3, 2, 10, lam))
        assert np.abs(res.fitted - (2.0 - 3.0 * x)).max() < 1e-8

    @pytest.mark.parametrize("periodic", [True, False])
    @pytest.mark.parametrize("lam", [0.0, 1e-3, 1e3])
    def test_constant_reproduction(self, periodic, lam):
        data = Dataset(np.full(64, 2.5))
        res = fit(data, SplineConfig(3, 2, 8, lam), periodic=periodic)
        assert np.allclose(res.fitted, 2.5, atol=1e-10)
        W = effective_kernel_row(res, np.array([0.0, 0.3, 0.77, 1.0]))
        assert np.allclose(W.sum(axis=1) / data.N, 1.0, atol=1e-10)

    @pytest.mark.parametrize("periodic", [True, False])
    def test_weights_symmetric_and_reproduce_fit(self, noisy, periodic):
        res = fit(noisy, SplineConfig(3, 2, 12, 1e-5), periodic=periodic)
        W = effective_kernel_row(res, noisy.x)
        assert np.abs(W - W.T).max() < 1e-10
        assert np.allclose(W @ noisy.y / noisy.N, res.fitted, atol=1e-10)
        assert np.trace(W) / noisy.N == pytest.approx(res.hat_trace, abs=1e-9)
        assert effective_kernel_row(res, 0.5).shape == (noisy.N,)

    def test_predict_matches_fitted(self, noisy):
        for periodic in (True, False):
            res = fit(noisy, SplineConfig(2, 1, 9, 1e-4), periodic=periodic)
            assert np.allclose(res.predict(noisy.x), res.fitted, atol=1e-12)

    def test_errors(self, noisy):
        with pytest.raises(InvalidArgumentError):
            fit(Dataset(np.zeros(10)), SplineConfig(3, 2, 9, 0.0))
        with pytest.raises(InvalidArgumentError):
            fit(noisy, SplineConfig(3, 2, 7, 0.0), periodic=True, method="dr")
        with pytest.raises(InvalidArgumentError):
            fit(noisy, SplineConfig(3, 2, 8, 0.0), method="qr")


class TestGCV:
    def test_interpolating_fit_rejected(self, rng):
        res = fit(Dataset(rng.standard_normal(16)), SplineConfig(1, 1, 16, 0.0), periodic=True)
        with pytest.raises(DegenerateConfigurationError):
            gcv(res)

    def test_heavy_penalty_limit(self, noisy):
        y = noisy.y - noisy.y.mean()
        data = Dataset(y)
        res = fit(data, SplineConfig(3, 2, 12, 1e12), periodic=True)
        N = data.N
        assert gcv(res) == pytest.approx(N * np.sum(y ** 2) / (N - 1) ** 2, rel=1e-6)

    def test_lower_bound(self, noisy):
        for lam in (0.0, 1e-6, 1e-2):
            res = fit(noisy, SplineConfig(3, 2, 10, lam))
            assert gcv(res) >= res.rss / noisy.N


class TestSelect:
    def test_regression_spline_selection(self, noisy):
        K, lam, res = select_model(noisy, 3, 2, 0.0, range(2, 20))
        assert lam == 0.0 and res.config.lam == 0.0
        scores = {k: gcv(fit(noisy, SplineConfig(3, 2, k, 0.0))) for k in range(2, 20)}
        assert K == min(scores, key=scores.get)

    @pytest.mark.parametrize("kq", [0.5, 1.2, 5.0])
    def test_index_preserved(self, noisy, kq):
        K, lam, res = select_model(noisy, 3, 2, kq, range(2, 30))
        assert k_index(lam, 2, K) == pytest.approx(kq, rel=1e-14)
        assert res.config.K == K

    def test_ties_go_to_smaller_k(self):
        data = Dataset(np.full(50, 1.0))
        K, _, _ = select_model(data, 3, 2, 1.0, [9, 4, 6])
        assert K == 4

    def test_infeasible_candidates_skipped(self, noisy):
        K, _, _ = select_model(noisy, 3, 2, 1.0, [200, 10, 118])
        assert K in (10,)
        with pytest.raises(InvalidArgumentError):
            select_model(noisy, 3, 2, 1.0, [118, 300])

    def test_sum_loss_scales_lambda(self, noisy):
        K, lam, res = select_model(noisy, 3, 2, 1.5, [10], loss="sum")
        assert res.config.lam == pytest.approx(lam / noisy.N, rel=1e-15)

    def test_argument_errors(self, noisy):
        with pytest.raises(InvalidArgumentError):
            select_model(noisy, 3, 2, -1.0, [5])
        with pytest.raises(InvalidArgumentError):
            select_model(noisy, 3, 2, 1.0, [5], loss="median")
