import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from splinekern.bandwidth import bandwidth_h, c1, c2, c2_tilde, k_index, lambda_for
from splinekern.errors import InvalidArgumentError


def h_by_quadrature(q, K, lam):
    val, _ = integrate.quad(lambda x: 1 / (1 + lam * (math.pi * x) ** (2 * q)), 0, K,
                            epsabs=1e-14, epsrel=1e-13, limit=500)
    return 1 / val


@pytest.mark.parametrize("lam, q, K, expected", [
    (0.0, 2, 10, 0.0),
    ((1.5 / (10 * math.pi)) ** 4, 2, 10, 1.5),
    (1 / math.pi ** 2, 1, 1, 1.0),
])
def test_k_index_examples(lam, q, K, expected):
    assert k_index(lam, q, K) == pytest.approx(expected, rel=1e-14, abs=0)


@given(st.one_of(st.just(0.0), st.floats(1e-6, 100)), st.integers(1, 4), st.integers(1, 200))
def test_lambda_roundtrip(k, q, K):
    assert k_index(lambda_for(k, q, K), q, K) == pytest.approx(k, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("q, value", [(1, 0.5), (2, math.sqrt(2) / 4), (3, 1 / 3)])
def test_c2_tilde(q, value):
    assert c2_tilde(q) == pytest.approx(value, rel=1e-15)


def test_q1_at_one():
    assert c1(1.0, 1) == pytest.approx(math.pi / 4, rel=1e-14)
    assert c2(1.0, 1) == pytest.approx(0.25, rel=1e-14)


@pytest.mark.parametrize("q", [1, 2, 3])
def test_branch_continuity(q):
    assert abs(c1(1.0, q) - math.pi * c2(1.0, q)) < 1e-10
    lo = c1(1 - 1e-12, q)
    hi = math.pi * c2(1 + 1e-12, q)
    assert abs(lo - hi) < 1e-10


def test_exact_endpoints():
    assert bandwidth_h(2, 10, 0.0).h == 0.1
    for q in (1, 2, 3):
        info = bandwidth_h(q, None, 0.3, smoothing_limit=True)
        assert info.h == 0.3 ** (1 / (2 * q)) / c2_tilde(q)
        assert info.smoothing_limit and math.isinf(info.k_q)


@pytest.mark.parametrize("q", [1, 2, 3])
def test_constant_ranges(q):
    for k in np.linspace(0, 0.999, 200):
        v = c1(float(k), q)
        assert math.pi / 4 < v <= 1.0
    for k in np.geomspace(1.0, 1e6, 200):
        v = c2(float(k), q)
        assert 0.25 <= v <= 0.5
    # at q = 1 the lower end 1/4 is attained exactly at k = 1
    assert c2(1.0, 2) > 0.25


@pytest.mark.parametrize("q", [1, 2, 3])
@pytest.mark.parametrize("K", [1, 7, 40])
@pytest.mark.parametrize("k", [0.0, 0.1, 0.5, 0.99, 1.0, 1.2, 5.0, 50.0])
def test_matches_defining_integral(q, K, k):
    lam = lambda_for(k, q, K)
    assert bandwidth_h(q, K, lam, k_q=k).h == pytest.approx(h_by_quadrature(q, K, lam), rel=1e-10)


@pytest.mark.parametrize("q", [1, 2, 3])
def test_monotone_scaled_inverse(q):
    ks = np.linspace(0.01, 20, 400)
    vals = [k * c1(float(k), q) if k < 1 else math.pi * c2(float(k), q) for k in ks]
    assert np.all(np.diff(vals) >= -1e-14)


def test_regime_boundary_is_large():
    assert bandwidth_h(2, 20, lambda_for(1.0, 2, 20), k_q=1.0).regime == "large"
    assert bandwidth_h(2, 20, lambda_for(0.999, 2, 20), k_q=0.999).regime == "small"


def test_errors():
    with pytest.raises(InvalidArgumentError):
        k_index(-1.0, 2, 3)
    with pytest.raises(InvalidArgumentError):
        bandwidth_h(2, None, 0.0, smoothing_limit=True)
    with pytest.raises(InvalidArgumentError):
        bandwidth_h(2, 10, lambda_for(1.0, 2, 10), k_q=2.0)
    with pytest.raises(InvalidArgumentError):
        lambda_for(-0.5, 1, 3)
