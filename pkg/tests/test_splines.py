import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from splinekern.errors import InvalidArgumentError, UnsupportedConfigurationError
from splinekern.specfun import zeta_even
from splinekern.splines import (SplineConfig, bspline, design_matrix, grid_design_matrix,
                                phi_exp, phi_exp_bspline_sum, phi_sinc_series, q_pm, q_poly,
                                q_series, q_sinc)


def cox_de_boor(p, knots, i, x):
    """Plain recursive reference on an explicit knot vector."""
    if p == 0:
        return 1.0 if knots[i] <= x < knots[i + 1] else 0.0
    out = 0.0
    if knots[i + p] > knots[i]:
        out += (x - knots[i]) / (knots[i + p] - knots[i]) * cox_de_boor(p - 1, knots, i, x)
    if knots[i + p + 1] > knots[i + 1]:
        out += ((knots[i + p + 1] - x) / (knots[i + p + 1] - knots[i + 1])
                * cox_de_boor(p - 1, knots, i + 1, x))
    return out


class TestSplineConfig:
    def test_valid(self):
        cfg = SplineConfig(3, 2, 10, 1e-3, 100)
        assert cfg.M == 10 and cfg.divisible
        assert cfg.k_q == pytest.approx(1e-3 ** 0.25 * math.pi * 10)

    @pytest.mark.parametrize("kwargs", [dict(p=2, q=3, K=5), dict(p=2, q=0, K=5),
                                        dict(p=2, q=1, K=0), dict(p=2, q=1, K=5, lam=-1.0),
                                        dict(p=2, q=1, K=5, N=4)])
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidArgumentError):
            SplineConfig(**kwargs)


class TestBspline:
    def test_indicator_basis(self):
        assert bspline(0, 5, 3, 0.45, periodic=False) == 1.0
        assert bspline(0, 5, 2, 0.45, periodic=False) == 0.0

    def test_hat_peak(self):
        assert bspline(1, 4, 1, 0.25, periodic=True) == 1.0

    def test_partition_of_unity_example(self):
        total = sum(bspline(3, 8, i, 0.37, periodic=True) for i in range(1, 9))
        assert total == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("periodic", [True, False])
    @pytest.mark.parametrize("p", [0, 1, 2, 3, 4])
    def test_partition_of_unity_grid(self, p, periodic):
        x = np.arange(1000) / 1000
        B = design_matrix(p, 7, x, periodic)
        assert np.abs(B.sum(axis=1) - 1).max() < 1e-12
        assert B.min() >= 0

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_open_basis_matches_cox_de_boor(self, p):
        K = 6
        knots = np.arange(-p, K + p + 1) / K
        for x in np.linspace(0, 0.999, 23):
            for i in range(1, K + p + 1):
                ref = cox_de_boor(p, knots, i - 1, x)
                assert bspline(p, K, i, x, periodic=False) == pytest.approx(ref, abs=1e-14)

    @pytest.mark.parametrize("p", [1, 2, 3, 4])
    def test_design_matrix_matches_scalar(self, p):
        K = 5
        x = np.array([0.0, 0.2, 0.31, 0.5, 0.77, 0.99])
        for periodic in (True, False):
            B = design_matrix(p, K, x, periodic)
            n = K if periodic else K + p
            ref = np.array([[bspline(p, K, i, v, periodic) for i in range(1, n + 1)] for v in x])
            assert np.allclose(B, ref, atol=1e-14)

    def test_grid_design_exact_on_knots(self):
        # l/N that coincide with knots j/K are assigned to the right interval
        for p in (1, 2, 3):
            for periodic in (True, False):
                G = grid_design_matrix(p, 7, 21, periodic)
                D = design_matrix(p, 7, np.arange(1, 22) / 21, periodic)
                assert np.abs(G - D).max() < 1e-14

    def test_index_errors(self):
        with pytest.raises(InvalidArgumentError):
            bspline(2, 4, 0, 0.1)
        with pytest.raises(InvalidArgumentError):
            bspline(2, 4, 7, 0.1, periodic=False)

    def test_derivative_sums_to_zero(self):
        D = design_matrix(3, 6, np.linspace(0, 0.99, 50), True, deriv=1)
        assert np.abs(D.sum(axis=1)).max() < 1e-11


class TestPhiExp:
    @pytest.mark.parametrize("p", [1, 2, 3, 5])
    def test_z_equal_one(self, p):
        t = np.linspace(-3, 4, 17)
        assert np.allclose(phi_exp(p, t, 1.0), 1.0, atol=1e-14)

    def test_centre_gives_q(self):
        val = phi_exp(3, 2.0, np.exp(2j * np.pi * 0.3))
        assert val.imag == pytest.approx(0, abs=1e-15)
        assert val.real == pytest.approx(q_poly(2, 0.3), abs=1e-15)

    def test_sinc_series_example(self):
        val = phi_exp(1, 0.4, np.exp(-2j * np.pi * 0.2))
        ref = phi_sinc_series(1, 0.4, -0.2, lmax=10_000)
        assert abs(val - ref) < 1e-7

    @pytest.mark.parametrize("p", [2, 3, 4])
    def test_sinc_series_grid(self, p):
        t = np.linspace(-1.7, 2.9, 9)
        for z in (-0.45, -0.2, 0.1, 0.33):
            ref = phi_sinc_series(p, t, z, lmax=10_000)
            assert np.abs(phi_exp(p, t, np.exp(2j * np.pi * z)) - ref).max() < 1e-9

    @given(st.integers(1, 6), st.floats(-5, 5), st.floats(0.2, 3.0), st.floats(-3.1, 3.1))
    def test_matches_bspline_sum(self, p, t, r, arg):
        z = r * np.exp(1j * arg)
        a = phi_exp(p, t, z)
        b = phi_exp_bspline_sum(p, t, z)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(b))

    @given(st.integers(1, 5), st.floats(-4, 4), st.floats(-0.5, 0.5))
    def test_modulus_is_periodic(self, p, t, v):
        z = np.exp(-2j * np.pi * v)
        assert abs(phi_exp(p, t + 1, z)) == pytest.approx(abs(phi_exp(p, t, z)), abs=1e-12)

    def test_zero_argument(self):
        with pytest.raises(InvalidArgumentError):
            phi_exp(2, 0.5, 0.0)


class TestQ:
    def test_examples(self):
        assert q_sinc(1, 0.37) == pytest.approx(1.0, abs=1e-15)
        assert q_sinc(3, 0.0) == pytest.approx(1.0, abs=1e-15)
        assert q_sinc(3, 0.5) == pytest.approx(1 / 3, abs=1e-15)
        assert q_sinc(3, 0.5) == pytest.approx(2 * (2 / math.pi) ** 4 * (1 - 2 ** -4) * zeta_even(4))

    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_half_frequency_zeta_identity(self, n):
        # Q_{n-2}(1/2) = 2 pi^{-n} (2^n - 1) zeta(n)
        assert q_poly(n - 2, 0.5) == pytest.approx(2 * math.pi ** -n * (2 ** n - 1) * zeta_even(n))

    @pytest.mark.parametrize("p", [2, 3, 4, 5, 7])
    def test_matches_series(self, p):
        z = np.linspace(-0.5, 0.5, 21)
        assert np.abs(q_sinc(p, z) - q_series(p, z, lmax=10_000)).max() < 1e-10

    @pytest.mark.parametrize("p", [1, 2, 3, 6])
    def test_periodic_even_bounded(self, p):
        z = np.linspace(-1, 1, 101)
        v = q_sinc(p, z)
        assert np.allclose(v, q_sinc(p, z + 1))
        assert np.allclose(v, q_sinc(p, -z))
        assert np.all(v > 0) and np.all(v <= 1 + 1e-15)

    @pytest.mark.parametrize("p", [1, 2, 3, 4])
    def test_qpm_m1_is_square(self, p):
        z = np.linspace(0, 1, 13)
        assert np.allclose(q_pm(p, 1, z), q_poly(p - 1, z) ** 2, atol=1e-14)

    def test_qpm_direct_sum(self):
        z = 0.25
        t = np.arange(1, 9) / 2 + 1.0
        ref = np.mean(np.abs(phi_exp(1, t, np.exp(-2j * np.pi * z))) ** 2)
        assert q_pm(1, 2, z, N=8) == pytest.approx(ref, abs=1e-15)

    @pytest.mark.parametrize("p", [1, 2, 3, 4, 5])
    @pytest.mark.parametrize("M", [1, 2, 3, 4, 5, 8])
    def test_upper_bound(self, p, M):
        z = np.linspace(0, 1, 201)
        assert np.all(q_pm(p, M, z) <= q_poly(p - 1, z) ** 2 + 1e-14)

    @pytest.mark.parametrize("p, M", [(p, M) for p in (1, 2, 3, 4, 5) for M in (1, 2, 3, 4, 5, 8)
                                      if p % 2 == 1 or M % 2 == 1])
    def test_lower_bound_odd_degree_or_odd_ratio(self, p, M):
        z = np.linspace(0, 1, 201)
        assert np.all(q_poly(2 * p, z) <= q_pm(p, M, z) + 1e-14)

    def test_lower_bound_counterexample_even_even(self):
        # p = 2, M = 2 samples Phi_2 at t = 2 and 2.5: |Phi|^2 = 0 and 1/4 at z = 1/2
        assert q_pm(2, 2, 0.5) == pytest.approx(1 / 8, abs=1e-15)
        assert q_poly(4, 0.5) == pytest.approx(2 / 15, abs=1e-15)

    @pytest.mark.xfail(strict=True, reason="lower bound fails for even p with even M")
    @pytest.mark.parametrize("p, M", [(2, 2), (2, 4), (4, 2)])
    def test_lower_bound_even_even(self, p, M):
        z = np.linspace(0, 1, 201)
        assert np.all(q_poly(2 * p, z) <= q_pm(p, M, z) + 1e-14)

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_qpm_converges_to_q2p(self, p):
        z = 0.3
        errs = [abs(q_pm(p, M, z) - q_poly(2 * p, z)) for M in (4, 8, 16, 32)]
        c = errs[0] * 4 ** (p + 1)
        for M, e in zip((4, 8, 16, 32), errs):
            assert e <= 1.01 * c * M ** -(p + 1)

    def test_qpm_odd_order_exact_form(self):
        # for p = 2q - 1 the excess over Q_{2p} scales as sin(pi z)^{2q} M^{-2q}
        p, q = 3, 2
        z = 0.2
        consts = [(q_pm(p, M, z) - q_poly(2 * p, z)) * M ** (2 * q) / np.sin(np.pi * z) ** (2 * q)
                  for M in (4, 16, 64)]
        assert consts[1] == pytest.approx(consts[2], rel=1e-2)

    def test_qpm_fractional_needs_n(self):
        with pytest.raises(UnsupportedConfigurationError):
            q_pm(2, 2.5, 0.1)
        assert q_pm(2, 2.5, 0.1, N=10) > 0
