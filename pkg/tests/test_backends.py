"""The compiled core and the numpy fallback must agree."""

import importlib
import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hkmtest import _backend, _kernels
from hkmtest.exceptions import InvalidDataError
from hkmtest.permutation import sign_matrix
from hkmtest.standardize import residuals_of

needs_ext = pytest.mark.skipif("cython" not in _backend.available(), reason="compiled core not built")


@pytest.fixture(params=[(1, 0.01), (2, 0.1), (3, 1.0), (2, 50.0)])
def case(request, rng):
    d, a = request.param
    return residuals_of(rng.exponential(size=(37, d))), a


def test_fallback_always_available():
    assert "python" in _backend.available()
    assert _backend.get("python") is _kernels


def test_unknown_backend():
    with pytest.raises(InvalidDataError):
        _backend.get("fortran")


@needs_ext
def test_pair_sum(case):
    y, a = case
    c, p = _backend.get("cython"), _backend.get("python")
    assert_allclose(c.pair_sum(y, a), p.pair_sum(y, a), rtol=1e-13)


@needs_ext
def test_rho_rows(case):
    y, a = case
    (c1, c2), (p1, p2) = _backend.get("cython").rho_rows(y, a), _backend.get("python").rho_rows(y, a)
    assert_allclose(c1, p1, rtol=1e-12, atol=1e-15)
    assert_allclose(c2, p2, rtol=1e-12, atol=1e-15)


@needs_ext
def test_pair_matrices_and_tperm(case):
    y, a = case
    cm, pm = _backend.get("cython").pair_matrices(y, a), _backend.get("python").pair_matrices(y, a)
    for x, z in zip(cm, pm):
        assert_allclose(x, z, rtol=1e-12, atol=1e-300)
    signs = sign_matrix(4, 40, y.shape[0])
    # the sums cancel down from n^2 terms of order one when a is large
    assert_allclose(_backend.get("cython").tperm_sums(y, signs, a), _backend.get("python").tperm_sums(y, signs, a),
                    rtol=1e-11, atol=1e-14 * y.shape[0] ** 2)


@needs_ext
@pytest.mark.skipif(bool(os.environ.get("HKMTEST_PURE_PYTHON")), reason="fallback forced")
def test_compiled_is_default():
    assert _backend.name == "cython"


def test_environment_forces_fallback():
    env = dict(os.environ, HKMTEST_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import hkmtest; print(hkmtest.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_reload_keeps_selection():
    mod = importlib.reload(_backend)
    assert mod.name in mod.available()
    assert np.isfinite(mod.kernels.pair_sum(np.array([[0.5], [-0.2]]), 1.0))
