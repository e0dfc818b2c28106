"""The HKM statistic T_{n,a} and the skewness measures in its large-a limit."""

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .exceptions import InvalidDataError, NumericalError

# default weight parameter for the test; the simulation studies use 0.01 and 0.1
DEFAULT_A = 1.0
SIMULATION_A = (0.01, 0.1)

# totals in [-NEG_CLAMP, 0) are rounding noise and are clamped to zero
NEG_CLAMP = 1e-12


def check_bandwidth(a):
    """Return ``a`` as float after checking ``0 < a < inf``."""
    try:
        a = float(a)
    except (TypeError, ValueError):
        raise InvalidDataError(f"bandwidth a must be a real number, got {a!r}") from None
    if not (a > 0 and math.isfinite(a)):
        raise InvalidDataError(f"bandwidth a must be positive and finite, got {a}")
    return a


def as_residuals(residuals):
    y = np.ascontiguousarray(residuals, dtype=np.float64)
    if y.ndim == 1:
        y = np.ascontiguousarray(y[:, None])
    if y.ndim != 2 or y.shape[0] < 1 or y.shape[1] < 1:
        raise InvalidDataError(f"residuals must be an (n, d) array, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise InvalidDataError("residuals contain non-finite values")
    return y


@dataclass(frozen=True)
class StatisticValue:
    t_na: float
    a: float
    n: int

    @property
    def delta_hat(self):
        """Point estimate T_{n,a} / n of the asymmetry measure."""
        return self.t_na / self.n


def _clamp(total, scale, what):
    if total < 0:
        if total >= -NEG_CLAMP * max(1.0, scale):
            return 0.0
        raise NumericalError(f"{what} is negative ({total!r}); this indicates an internal error")
    return total


def t_statistic(residuals, a=DEFAULT_A, backend=None):
    """HKM statistic from the closed pairwise form.

    ``T = pi^{d/2} / (2 n a^{d/2}) * sum_{i,j} [exp(-|Y_i - Y_j|^2/4a) - exp(-|Y_i + Y_j|^2/4a)]``

    Parameters
    ----------
    residuals : (n, d) array_like
        Scaled residuals, see :func:`hkmtest.standardize.standardize`.
    a : float
        Weight parameter, ``a > 0``.
    backend : {None, 'cython', 'python'}
        Kernel implementation; None picks the compiled one when available.

    Returns
    -------
    StatisticValue
    """
    y = as_residuals(residuals)
    a = check_bandwidth(a)
    n, d = y.shape
    raw = _backend.get(backend).pair_sum(y, a)
    raw = _clamp(raw, float(n), "pairwise kernel sum")
    t = math.pi ** (d / 2) / (2.0 * n * a ** (d / 2)) * raw
    return StatisticValue(t_na=t, a=a, n=n)


def skewness_mardia(residuals):
    """Mardia's skewness ``b_{n,1} = n^{-2} sum_{i,j} (Y_i.Y_j)^3``.

    Evaluated as the squared norm of the mean third-order tensor, which is
    the same quantity in O(n d^3).
    """
    y = as_residuals(residuals)
    n = y.shape[0]
    tensor = np.einsum("ni,nj,nk->ijk", y, y, y) / n
    return float(max(np.sum(tensor * tensor), 0.0))


def skewness_mori(residuals):
    """Mori-Rohatgi-Szekely skewness ``b_{n,2} = |n^{-1} sum_j Y_j |Y_j|^2|^2``."""
    y = as_residuals(residuals)
    v = (y * np.einsum("ij,ij->i", y, y)[:, None]).mean(axis=0)
    return float(v @ v)


def skewness_limit_check(residuals, a_grid, backend=None):
    """Compare the scaled statistic with ``2 b_{n,1} + 3 b_{n,2}`` along ``a_grid``.

    For each ``a`` returns ``(a, lhs, rhs, rel_err)`` where
    ``lhs = 96 / (n pi^{d/2}) a^{d/2+3} T_{n,a}``.  ``rel_err`` is NaN when
    ``rhs == 0`` and ``lhs != 0``; it is 0 when both vanish.
    """
    y = as_residuals(residuals)
    n, d = y.shape
    rhs = 2.0 * skewness_mardia(y) + 3.0 * skewness_mori(y)
    rows = []
    for a in a_grid:
        a = check_bandwidth(a)
        t = t_statistic(y, a, backend=backend).t_na
        lhs = 96.0 / (n * math.pi ** (d / 2)) * a ** (d / 2 + 3) * t
        if rhs != 0:
            rel = abs(lhs - rhs) / abs(rhs)
        else:
            rel = 0.0 if lhs == 0 else float("nan")
        rows.append((a, lhs, rhs, rel))
    return rows
