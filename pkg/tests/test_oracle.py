"""Checks on the brute-force quadrature oracles themselves."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hkmtest import oracle
from hkmtest.alternatives import N1, mixture_delta
from hkmtest.exceptions import InvalidDataError, NumericalError
from hkmtest.standardize import residuals_of
from hkmtest.statistic import t_statistic

from conftest import paired

# frozen: a = 1, residuals of squared normals (seed 11)
Y5 = [[-0.9524909223933009], [1.4300972783428862], [0.9801130595754775], [-0.6182065096956453], [-0.839512905829418]]
T_Y5 = 0.03771175306408975
# frozen: a = 0.5, residuals of exponentials (seed 12)
Y4 = [[-0.12414601544626754, 1.6703977332657327], [-1.0446033902035026, -0.9428317770100157],
      [-0.46691116158612755, -0.19620681244536856], [1.6356605672358975, -0.5313591438103487]]
T_Y4 = 1.5510923490363182


def test_rule_invariants():
    with pytest.raises(InvalidDataError):
        oracle.QuadratureRule(np.zeros((3, 1)), np.ones(2), "x")
    with pytest.raises(InvalidDataError):
        oracle.QuadratureRule(np.zeros((2, 1)), np.array([1.0, -1.0]), "x")


@pytest.mark.parametrize("d", [1, 2])
def test_hermite_rule_moments(d):
    rule = oracle.gauss_hermite_rule(0.3, 20, d)
    assert rule.d == d
    assert_allclose(rule.weights.sum(), (math.pi / 0.3) ** (d / 2), rtol=1e-13)
    second = rule.weights @ np.sum(rule.nodes**2, axis=1)
    assert_allclose(second, d / (2 * 0.3) * (math.pi / 0.3) ** (d / 2), rtol=1e-12)


def test_large_hermite_rule_drops_underflow():
    rule = oracle.gauss_hermite_rule(1.0, 1024)
    assert np.all(rule.weights > 0) and rule.nodes.shape[0] < 1024
    assert_allclose(rule.weights.sum(), math.sqrt(math.pi), rtol=1e-12)


def test_legendre_rule_is_mirror_symmetric():
    rule = oracle.gauss_legendre_rule(3.0, 6, order=5, d=2)
    flipped = np.flip(rule.nodes.reshape(30, 30, 2), axis=(0, 1)).reshape(-1, 2)
    assert_allclose(flipped, -rule.nodes, atol=1e-15)
    assert_allclose(rule.weights.sum(), 36.0, rtol=1e-13)


def test_t_oracle_paired_is_zero(rng):
    assert oracle.t_by_quadrature(paired(rng.standard_normal((3, 1))), 1.0) == pytest.approx(0, abs=1e-14)


def test_t_oracle_univariate():
    assert_allclose(oracle.t_by_quadrature(Y5, 1.0), T_Y5, rtol=1e-10)
    assert_allclose(t_statistic(Y5, 1.0).t_na, T_Y5, rtol=1e-10)


def test_t_oracle_bivariate():
    assert_allclose(oracle.t_by_quadrature(Y4, 0.5, n_nodes=64), T_Y4, rtol=1e-10)
    assert_allclose(t_statistic(Y4, 0.5).t_na, T_Y4, rtol=1e-8)


def test_non_convergence_is_flagged(rng):
    y = residuals_of(rng.exponential(size=(8, 1)))
    with pytest.raises(NumericalError) as info:
        oracle.t_by_quadrature(y, 0.01, n_nodes=4)
    assert {"coarse", "fine", "nodes"} <= set(info.value.diagnostics)


def test_tperm_oracle_trivial_cases(rng):
    y = paired(rng.standard_normal((3, 1)))
    assert oracle.tperm_by_quadrature(y, np.ones(6), 1.0) == pytest.approx(0, abs=1e-14)
    z = residuals_of(rng.exponential(size=(6, 1)))
    u = np.array([1.0, -1.0, 1.0, 1.0, -1.0, -1.0])
    assert_allclose(oracle.tperm_by_quadrature(z, -u, 0.7), oracle.tperm_by_quadrature(z, u, 0.7), rtol=1e-12)
    with pytest.raises(InvalidDataError):
        oracle.tperm_by_quadrature(z, u[:4], 0.7)


def test_delta_oracle_zero_function():
    assert oracle.delta_by_quadrature(lambda t: np.zeros(len(t)), 0.2) == 0.0


def test_delta_density_symmetric_sample(rng):
    g = oracle.sample_expectation(paired(rng.standard_normal((500, 1))), 0.5)
    assert oracle.delta_by_density(g, 0.5, half_width=10, panels=10) == pytest.approx(0, abs=1e-14)


def test_delta_density_closed_expectation():
    got = oracle.delta_by_density(oracle.mixture_gauss_expectation(N1, 0.1), 0.1, panels=20)
    assert_allclose(got, mixture_delta(N1, 0.1).delta, rtol=1e-9)


def test_sample_expectation_matches_direct(rng):
    xs = rng.standard_normal((50, 2))
    pts = rng.standard_normal((4, 2))
    g = oracle.sample_expectation(xs, 0.8, chunk=7)
    direct = [np.mean(np.exp(-np.sum((p - xs) ** 2, axis=1) / 1.6)) for p in pts]
    assert_allclose(g(pts), direct, rtol=1e-13)


def test_sigma2_oracle_paired(rng):
    y = paired(rng.standard_normal((3, 1)))
    assert oracle.sigma2_by_quadrature(y, 1.0) == pytest.approx(0, abs=1e-12)
