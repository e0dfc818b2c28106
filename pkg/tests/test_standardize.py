import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from hkmtest.exceptions import InvalidDataError, SingularCovarianceError
from hkmtest.standardize import as_data_matrix, residuals_of, sample_moments, standardize, symmetric_inv_sqrt

from conftest import random_affine


def test_two_point_moments():
    mean, cov = sample_moments([[0.0], [2.0]])
    assert_allclose(mean, [1.0])
    assert_allclose(cov, [[1.0]])


def test_identical_rows_give_zero_covariance():
    _, cov = sample_moments(np.tile([1.5, -2.0], (6, 1)))
    assert_allclose(cov, np.zeros((2, 2)), atol=0)


def test_cross_moments():
    mean, cov = sample_moments([[1, 0], [-1, 0], [0, 1], [0, -1]])
    assert_allclose(mean, [0, 0], atol=1e-15)
    assert_allclose(cov, np.diag([0.5, 0.5]))


def test_inv_sqrt_identity_and_diagonal():
    assert_allclose(symmetric_inv_sqrt(np.eye(3)), np.eye(3), atol=1e-15)
    assert_allclose(symmetric_inv_sqrt(np.diag([4.0, 9.0])), np.diag([0.5, 1 / 3]), rtol=1e-14)


def test_inv_sqrt_known_eigensystem(rng):
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    lam = np.array([0.2, 1.5, 7.0])
    a = q @ np.diag(lam) @ q.T
    m = symmetric_inv_sqrt(a)
    assert np.linalg.norm(m @ a @ m - np.eye(3)) < 1e-10
    assert_allclose(m, q @ np.diag(lam ** -0.5) @ q.T, atol=1e-12)
    assert_allclose(m, m.T, atol=0)


def test_hand_computed_residuals():
    s = standardize([[0.0], [1.0], [2.0]])
    assert_allclose(s.mean, [1.0])
    assert_allclose(s.covariance, [[2 / 3]])
    r = np.sqrt(1.5)
    assert_allclose(s.residuals.ravel(), [-r, 0.0, r], atol=1e-15)


def test_already_standard_data_unchanged():
    x = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
    assert_allclose(residuals_of(x), x, atol=1e-14)


def test_residuals_are_white(rng):
    x = rng.standard_normal((40, 3)) @ np.array([[2, 0, 0], [1, 1, 0], [0.5, -1, 3.0]])
    y = standardize(x).residuals
    assert_allclose(y.mean(axis=0), 0, atol=1e-14)
    assert_allclose(y.T @ y / len(y), np.eye(3), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(d=st.integers(1, 3), n_extra=st.integers(2, 30), seed=st.integers(0, 2**32 - 1))
def test_gram_matrix_affine_invariant(d, n_extra, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((d + n_extra, d)) ** 3
    a, b = random_affine(rng, d)
    y1 = residuals_of(x)
    y2 = residuals_of(x @ a.T + b)
    assert_allclose(y2 @ y2.T, y1 @ y1.T, rtol=1e-10, atol=1e-10)


def test_one_dimensional_input_is_a_column():
    assert as_data_matrix([1.0, 2.0, 4.0]).shape == (3, 1)


@pytest.mark.parametrize("bad", [[[1.0, np.nan], [2.0, 3.0]], [[np.inf], [1.0]], [], [[[1.0]]]])
def test_rejects_malformed_input(bad):
    with pytest.raises(InvalidDataError):
        as_data_matrix(bad)


def test_too_few_rows():
    with pytest.raises(SingularCovarianceError):
        standardize([[0.0, 1.0], [1.0, 0.0]])


def test_constant_column_is_singular(rng):
    x = np.column_stack([rng.standard_normal(20), np.full(20, 3.0)])
    with pytest.raises(SingularCovarianceError):
        standardize(x)
