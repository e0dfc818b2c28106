import numpy as np
import pytest

from hkmtest import _backend


def random_affine(rng, d):
    """A well-conditioned nonsingular matrix and a shift."""
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    a = q * rng.uniform(0.3, 3.0, size=d)
    return a, rng.normal(scale=5.0, size=d)


def paired(y):
    """Exactly antisymmetric residual set {y, -y}."""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    return np.vstack([y, -y])


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=_backend.available())
def backend(request):
    return request.param
