"""Empirical standardization (scaled residuals).

Everything downstream only sees ``Y_j = S^{-1/2} (X_j - mean)``, where ``S``
is the 1/n sample covariance and ``S^{-1/2}`` its symmetric inverse square
root.  The Gram matrix ``Y Y^T`` is then invariant under ``X -> A X + b``.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidDataError, SingularCovarianceError

# relative eigenvalue threshold for declaring the covariance singular
EIG_FLOOR = 1e-12


def as_data_matrix(data):
    """Validate ``data`` and return it as a float64 (n, d) array.

    1-D input is read as n observations of a univariate variable.
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise InvalidDataError(f"data must be 1-D or 2-D, got shape {x.shape}")
    n, d = x.shape
    if n < 1 or d < 1:
        raise InvalidDataError(f"data must have n >= 1 and d >= 1, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        bad = np.argwhere(~np.isfinite(x))[0]
        raise InvalidDataError(f"non-finite entry at row {bad[0]}, column {bad[1]}")
    return x


@dataclass(frozen=True)
class StandardizedSample:
    """Scaled residuals together with the transform that produced them.

    Attributes
    ----------
    residuals : (n, d) ndarray
        ``inv_sqrt @ (X_j - mean)`` for each row.
    mean : (d,) ndarray
    covariance : (d, d) ndarray
        Sample covariance with 1/n normalization.
    inv_sqrt : (d, d) ndarray
        Symmetric inverse square root of ``covariance``.
    """

    residuals: np.ndarray
    mean: np.ndarray
    covariance: np.ndarray
    inv_sqrt: np.ndarray

    @property
    def n(self):
        return self.residuals.shape[0]

    @property
    def d(self):
        return self.residuals.shape[1]


def sample_moments(data):
    """Sample mean and 1/n sample covariance of the rows of ``data``."""
    x = as_data_matrix(data)
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / x.shape[0]
    # exact symmetry
    cov = 0.5 * (cov + cov.T)
    return mean, cov


def symmetric_inv_sqrt(covariance):
    """Unique symmetric positive definite ``M`` with ``M @ C @ M = I``.

    Raises
    ------
    SingularCovarianceError
        If the smallest eigenvalue is below ``EIG_FLOOR`` times the largest.
    """
    c = np.asarray(covariance, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise InvalidDataError(f"covariance must be square, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise InvalidDataError("covariance has non-finite entries")
    if not np.allclose(c, c.T, rtol=1e-12, atol=1e-14 * max(1.0, np.abs(c).max())):
        raise InvalidDataError("covariance must be symmetric")
    evals, evecs = np.linalg.eigh(0.5 * (c + c.T))
    top = evals[-1]
    if not top > 0 or evals[0] <= EIG_FLOOR * top:
        raise SingularCovarianceError(
            "sample covariance is singular (smallest/largest eigenvalue "
            f"{evals[0]:.3g}/{top:.3g}); need n >= d + 1 and no constant or collinear columns"
        )
    m = (evecs / np.sqrt(evals)) @ evecs.T
    return 0.5 * (m + m.T)


def standardize(data):
    """Scaled residuals of ``data``; see :class:`StandardizedSample`."""
    x = as_data_matrix(data)
    n, d = x.shape
    if n < d + 1:
        raise SingularCovarianceError(f"need n >= d + 1 observations, got n={n}, d={d}")
    mean, cov = sample_moments(x)
    inv_sqrt = symmetric_inv_sqrt(cov)
    residuals = (x - mean) @ inv_sqrt
    return StandardizedSample(residuals=residuals, mean=mean, covariance=cov, inv_sqrt=inv_sqrt)


def residuals_of(data):
    """Shortcut for ``standardize(data).residuals``."""
    return standardize(data).residuals
