"""Affine invariant HKM test for multivariate reflected symmetry about an unknown center.

Typical use::

    from hkmtest import standardize, permutation_test, estimate_delta

    y = standardize(x).residuals
    res = permutation_test(y, a=1.0, m=1000, seed=1)
    est = estimate_delta(y, a=1.0)
"""

__version__ = "0.1.0"

from . import _backend
from .exceptions import DomainError, HKMError, InvalidDataError, NumericalError, SingularCovarianceError
from .permutation import PermutationResult, permutation_test, t_perm
from .standardize import StandardizedSample, sample_moments, standardize, symmetric_inv_sqrt
from .statistic import StatisticValue, skewness_limit_check, skewness_mardia, skewness_mori, t_statistic
from .variance import DeltaEstimate, aggregates, confidence_interval, estimate_delta, rho1, rho2, sigma2_hat

BACKEND = _backend.name

__all__ = [
    "BACKEND",
    "DeltaEstimate",
    "DomainError",
    "HKMError",
    "InvalidDataError",
    "NumericalError",
    "PermutationResult",
    "SingularCovarianceError",
    "StandardizedSample",
    "StatisticValue",
    "aggregates",
    "confidence_interval",
    "estimate_delta",
    "permutation_test",
    "rho1",
    "rho2",
    "sample_moments",
    "sigma2_hat",
    "skewness_limit_check",
    "skewness_mardia",
    "skewness_mori",
    "standardize",
    "symmetric_inv_sqrt",
    "t_perm",
    "t_statistic",
]
