"""Variance estimation for T_{n,a}/n under a fixed alternative.

The plug-in estimator of the limiting variance is a double integral of the
empirical covariance kernel.  It is evaluated here without any numerical
integration, through the closed-form Gaussian integrals

    rho1(u, v) = int sin(u.t) sin(v.t) exp(-a|t|^2) dt
    rho2(u, v) = int t cos(u.t) sin(v.t) exp(-a|t|^2) dt

and a handful of O(n^2 d) aggregates of them.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from . import _backend
from .exceptions import InvalidDataError
from .statistic import as_residuals, check_bandwidth, t_statistic


def rho1(u, v, a):
    """``1/2 (pi/a)^{d/2} (exp(-|u-v|^2/4a) - exp(-|u+v|^2/4a))``.

    ``u`` and ``v`` broadcast against each other over leading axes; the last
    axis is the dimension d.
    """
    a = check_bandwidth(a)
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    v = np.atleast_1d(np.asarray(v, dtype=np.float64))
    d = np.broadcast_shapes(u.shape, v.shape)[-1]
    dm = np.sum((u - v) ** 2, axis=-1)
    dot = np.sum(u * v, axis=-1)
    out = -0.5 * (math.pi / a) ** (d / 2) * np.exp(-dm / (4.0 * a)) * np.expm1(-dot / a)
    return out[()] if out.ndim == 0 else out


def rho2(u, v, a):
    """``1/(4a) (pi/a)^{d/2} ((v-u) exp(-|v-u|^2/4a) + (v+u) exp(-|v+u|^2/4a))``; d-vector valued."""
    a = check_bandwidth(a)
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    v = np.atleast_1d(np.asarray(v, dtype=np.float64))
    d = np.broadcast_shapes(u.shape, v.shape)[-1]
    em = np.exp(-np.sum((v - u) ** 2, axis=-1, keepdims=True) / (4.0 * a))
    ep = np.exp(-np.sum((v + u) ** 2, axis=-1, keepdims=True) / (4.0 * a))
    return (math.pi / a) ** (d / 2) / (4.0 * a) * ((v - u) * em + (v + u) * ep)


@dataclass(frozen=True)
class KernelAggregates:
    """Averages of rho1 / rho2 over the sample.

    Attributes
    ----------
    v1 : float
        ``n^{-2} sum_{i,j} rho1(Y_i, Y_j)``
    v2 : (d,) ndarray
        ``n^{-2} sum_{i,j} rho2(Y_i, Y_j)``
    vbar1 : (n,) ndarray
        ``n^{-1} sum_l rho1(Y_j, Y_l)`` for each j
    vbar2 : (n, d) ndarray
        ``n^{-1} sum_l rho2(Y_j, Y_l)`` for each j
    sigma_n : (d, d) ndarray
        ``n^{-2} sum_{i,k} rho1(Y_i, Y_k) Y_i Y_i^T``
    gamma_n : (d, d) ndarray
        ``n^{-2} sum_{i,l} rho2(Y_i, Y_l) Y_i^T``
    """

    v1: float
    v2: np.ndarray
    vbar1: np.ndarray
    vbar2: np.ndarray
    sigma_n: np.ndarray
    gamma_n: np.ndarray


def aggregates(residuals, a, backend=None):
    """Compute :class:`KernelAggregates` for standardized residuals."""
    y = as_residuals(residuals)
    a = check_bandwidth(a)
    n, d = y.shape
    r1, r2 = _backend.get(backend).rho_rows(y, a)
    scale = (math.pi / a) ** (d / 2)
    vbar1 = 0.5 * scale * np.asarray(r1) / n
    vbar2 = scale / (4.0 * a) * np.asarray(r2) / n
    sigma_n = (y * vbar1[:, None]).T @ y / n
    return KernelAggregates(
        v1=float(vbar1.mean()),
        v2=vbar2.mean(axis=0),
        vbar1=vbar1,
        vbar2=vbar2,
        sigma_n=0.5 * (sigma_n + sigma_n.T),
        gamma_n=vbar2.T @ y / n,
    )


def sigma2_terms(residuals, a, agg=None, backend=None):
    """The nine summands of the closed-form variance estimator, in order."""
    y = as_residuals(residuals)
    if agg is None:
        agg = aggregates(y, a, backend=backend)
    v1, v2, vb1, vb2 = agg.v1, agg.v2, agg.vbar1, agg.vbar2
    # n^{-1} sum_j vbar2(Y_j) Y_j^T is gamma_n itself
    quad = np.einsum("ji,ik,jk->j", y, agg.gamma_n, y)  # Y_j^T Gamma_n Y_j
    yv2 = np.einsum("ij,ij->i", y, vb2).mean()  # n^{-1} sum_j Y_j^T vbar2(Y_j)
    # n^{-2} sum_{j,k} Y_j (Y_j^T Y_k)(Y_j^T vbar2(Y_k)) = n^{-1} sum_j Y_j (Y_j^T Gamma_n Y_j)
    seventh = (y * quad[:, None]).mean(axis=0)
    return np.array(
        [
            4.0 * np.mean(vb1 * vb1),
            -4.0 * v1 * v1,
            -8.0 * ((vb1[:, None] * y).mean(axis=0) @ v2),
            4.0 * (v2 @ v2),
            -4.0 * np.trace(agg.sigma_n @ agg.gamma_n),
            4.0 * v1 * yv2,
            4.0 * (v2 @ seventh),
            np.mean(quad * quad),
            -(yv2 * yv2),
        ]
    )


def sigma2_hat(residuals, a, backend=None):
    """Consistent estimator of the variance of the normal limit of sqrt(n)(T/n - Delta).

    May be negative in small samples; the value is returned unclamped.
    """
    return float(np.sum(sigma2_terms(residuals, a, backend=backend)))


@dataclass(frozen=True)
class DeltaEstimate:
    """Point estimate of Delta with an asymptotic confidence interval.

    When ``sigma2_negative`` is set there is no interval and ``ci_lo`` /
    ``ci_hi`` are NaN.
    """

    delta_hat: float
    sigma2_hat: float
    ci_lo: float
    ci_hi: float
    level: float
    n: int

    @property
    def sigma2_negative(self):
        return self.sigma2_hat < 0

    def covers(self, delta):
        """Whether the interval contains ``delta`` (False when there is no interval)."""
        return (not self.sigma2_negative) and self.ci_lo <= delta <= self.ci_hi


def normal_quantile(p):
    """Standard normal quantile."""
    return float(norm.ppf(p))


def confidence_interval(delta_hat, sigma2_hat, n, level=0.95):
    """Two-sided interval ``delta_hat +- z_{(1+level)/2} sqrt(sigma2_hat / n)``."""
    if not 0 < level < 1:
        raise InvalidDataError(f"level must lie in (0, 1), got {level}")
    if n < 1:
        raise InvalidDataError(f"n must be positive, got {n}")
    delta_hat = float(delta_hat)
    sigma2_hat = float(sigma2_hat)
    if sigma2_hat < 0:
        lo = hi = float("nan")
    else:
        half = normal_quantile(0.5 * (1.0 + level)) * math.sqrt(sigma2_hat / n)
        lo, hi = delta_hat - half, delta_hat + half
    return DeltaEstimate(delta_hat=delta_hat, sigma2_hat=sigma2_hat, ci_lo=lo, ci_hi=hi, level=float(level), n=int(n))


def estimate_delta(residuals, a, level=0.95, backend=None):
    """``T_{n,a}/n`` with its variance estimate and confidence interval."""
    y = as_residuals(residuals)
    stat = t_statistic(y, a, backend=backend)
    s2 = sigma2_hat(y, a, backend=backend)
    return confidence_interval(stat.delta_hat, s2, y.shape[0], level)
