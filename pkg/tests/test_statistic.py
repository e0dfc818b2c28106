import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from hkmtest import oracle
from hkmtest.exceptions import InvalidDataError
from hkmtest.standardize import residuals_of
from hkmtest.statistic import (
    check_bandwidth,
    skewness_limit_check,
    skewness_mardia,
    skewness_mori,
    t_statistic,
)

from conftest import paired, random_affine

# frozen from the quadrature oracle (Gauss-Hermite ladder converged to 1e-9)
T_THREE_POINT = 0.015232116501258455  # {-1.2, 0.3, 0.9}, a = 1


def brute_t(y, a):
    """Direct double sum in long double, no expm1 trick."""
    y = np.asarray(y, dtype=np.longdouble)
    n, d = y.shape
    total = np.longdouble(0)
    for i in range(n):
        for j in range(n):
            total += np.exp(-np.sum((y[i] - y[j]) ** 2) / (4 * a)) - np.exp(-np.sum((y[i] + y[j]) ** 2) / (4 * a))
    return float(np.longdouble(math.pi) ** (d / 2) / (2 * n * np.longdouble(a) ** (d / 2)) * total)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_paired_sample_is_zero(rng, d, backend):
    y = paired(rng.standard_normal((7, d)))
    assert t_statistic(y, 0.7, backend=backend).t_na == pytest.approx(0.0, abs=1e-13)


def test_antisymmetric_three_points():
    r = math.sqrt(1.5)
    assert t_statistic([-r, 0.0, r], 1.0).t_na == 0.0


def test_three_point_value(backend):
    y = [[-1.2], [0.3], [0.9]]
    assert_allclose(t_statistic(y, 1.0, backend=backend).t_na, T_THREE_POINT, rtol=1e-10)
    assert_allclose(oracle.t_by_quadrature(y, 1.0), T_THREE_POINT, rtol=1e-10)


@pytest.mark.parametrize("a", [0.01, 0.1, 1.0, 10.0])
def test_matches_brute_double_sum(rng, a, backend):
    y = residuals_of(rng.exponential(size=(25, 2)))
    assert_allclose(t_statistic(y, a, backend=backend).t_na, brute_t(y, a), rtol=1e-11)


def test_delta_hat_is_t_over_n(rng):
    y = residuals_of(rng.exponential(size=(30, 1)))
    v = t_statistic(y, 0.5)
    assert v.n == 30 and v.a == 0.5
    assert v.delta_hat == v.t_na / 30


def test_no_overflow_for_small_a_and_outliers(backend):
    # A_ij underflows while exp(-y_i.y_j / a) would overflow
    y = np.array([[-8.0], [9.0], [0.5], [-0.3]])
    val = t_statistic(y, 0.01, backend=backend).t_na
    assert math.isfinite(val)
    assert_allclose(val, brute_t(y, 0.01), rtol=1e-10)


@settings(max_examples=25, deadline=None)
@given(d=st.integers(1, 3), seed=st.integers(0, 2**32 - 1), a=st.sampled_from([0.1, 1.0, 3.0]))
def test_affine_invariance(d, seed, a):
    rng = np.random.default_rng(seed)
    x = rng.gamma(2.0, size=(15 + 3 * d, d))
    m, b = random_affine(rng, d)
    t1 = t_statistic(residuals_of(x), a).t_na
    t2 = t_statistic(residuals_of(x @ m.T + b), a).t_na
    assert_allclose(t2, t1, rtol=1e-10)


@pytest.mark.parametrize("a", [0, -1.0, np.inf, np.nan, "x"])
def test_bad_bandwidth(a):
    with pytest.raises(InvalidDataError):
        check_bandwidth(a)


def test_rejects_non_finite_residuals():
    with pytest.raises(InvalidDataError):
        t_statistic([[0.0], [np.nan]], 1.0)


# -- skewness -----------------------------------------------------------------

def mardia_loop(y):
    y = np.asarray(y, dtype=np.longdouble)
    n = len(y)
    return float(sum((y[i] @ y[j]) ** 3 for i in range(n) for j in range(n)) / n**2)


def mori_loop(y):
    y = np.asarray(y, dtype=np.longdouble)
    n = len(y)
    sq = (y * y).sum(axis=1)
    return float(sum((y[i] @ y[j]) * sq[i] * sq[j] for i in range(n) for j in range(n)) / n**2)


def test_skewness_vanishes_for_paired(rng):
    y = paired(rng.standard_normal((6, 3)))
    assert skewness_mardia(y) == pytest.approx(0, abs=1e-14)
    assert skewness_mori(y) == pytest.approx(0, abs=1e-14)


def test_skewness_univariate_coincide(rng):
    y = residuals_of(rng.exponential(size=40))
    g1 = np.mean(y.ravel() ** 3)
    assert_allclose(skewness_mardia(y), g1**2, rtol=1e-12)
    assert_allclose(skewness_mori(y), g1**2, rtol=1e-12)


def test_mardia_matches_loop(rng):
    y = residuals_of(rng.exponential(size=(5, 2)))
    assert_allclose(skewness_mardia(y), mardia_loop(y), rtol=1e-12)


def test_mori_matches_loop(rng):
    y = residuals_of(rng.exponential(size=(5, 3)))
    assert_allclose(skewness_mori(y), mori_loop(y), rtol=1e-12)


def test_limit_check_paired_is_zero(rng):
    y = paired(rng.standard_normal((5, 2)))
    for _, lhs, rhs, rel in skewness_limit_check(y, [10.0, 100.0]):
        assert lhs == pytest.approx(0, abs=1e-10) and rhs == pytest.approx(0, abs=1e-12)


def test_limit_check_univariate_rhs_is_five_skew_squared(rng):
    y = residuals_of(rng.exponential(size=60))
    rows = skewness_limit_check(y, [100.0])
    assert_allclose(rows[0][2], 5 * np.mean(y.ravel() ** 3) ** 2, rtol=1e-12)


def test_limit_check_error_shrinks(rng):
    y = residuals_of(rng.exponential(size=(100, 1)))
    rel = [r[3] for r in skewness_limit_check(y, [1e2, 1e3, 1e4])]
    assert rel[0] > rel[1] > rel[2]
    assert rel[2] < 1e-2
