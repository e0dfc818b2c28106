"""Sign-flip permutation test for the HKM statistic.

Sign vectors come from a counter-based generator (Philox): the master seed
fixes the key and replicate block ``b`` starts at counter ``b << 192``.  The
signs of a replicate therefore depend only on ``(seed, replicate index)``,
never on how blocks are scheduled across worker threads.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .exceptions import InvalidDataError
from .statistic import StatisticValue, as_residuals, check_bandwidth, t_statistic

DEFAULT_M = 1000
# replicates per RNG block; part of the reproducibility contract
SIGN_BLOCK = 256


def _philox_key(seed):
    return np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)


def sign_block(seed, block, n, size=SIGN_BLOCK):
    """Sign vectors of replicate block ``block``: (size, n) float64 of +-1."""
    bitgen = np.random.Philox(key=_philox_key(seed), counter=int(block) << 192)
    bits = np.random.Generator(bitgen).integers(0, 2, size=(size, n), dtype=np.int8)
    return 2.0 * bits - 1.0


def sign_matrix(seed, m, n):
    """First ``m`` sign vectors of the stream defined by ``seed``."""
    nblocks = -(-m // SIGN_BLOCK)
    return np.vstack([sign_block(seed, b, n) for b in range(nblocks)])[:m]


def t_perm(residuals, signs, a, backend=None):
    """Permutation statistic for one sign vector (or a stack of them).

    ``signs`` of shape (n,) gives a float; shape (m, n) gives an (m,) array.
    """
    y = as_residuals(residuals)
    a = check_bandwidth(a)
    n, d = y.shape
    u = np.asarray(signs, dtype=np.float64)
    single = u.ndim == 1
    u = np.ascontiguousarray(np.atleast_2d(u))
    if u.shape[1] != n:
        raise InvalidDataError(f"sign vector length {u.shape[1]} does not match n={n}")
    if not np.all(np.abs(u) == 1.0):
        raise InvalidDataError("sign vectors must have entries exactly +1 or -1")
    raw = _backend.get(backend).tperm_sums(y, u, a)
    vals = math.pi ** (d / 2) / (2.0 * n * a ** (d / 2)) * np.asarray(raw)
    return float(vals[0]) if single else vals


def permutation_pvalue(observed, replicates):
    """``(1 + #{replicate >= observed}) / (m + 1)``."""
    reps = np.asarray(replicates, dtype=np.float64)
    return (1.0 + np.count_nonzero(reps >= observed)) / (reps.size + 1.0)


def critical_value(replicates, alpha):
    """Empirical (1 - alpha)-quantile: the ceil((1 - alpha) m)-th smallest replicate."""
    reps = np.sort(np.asarray(replicates, dtype=np.float64))
    k = max(1, math.ceil((1.0 - alpha) * reps.size - 1e-9))
    return float(reps[min(k, reps.size) - 1])


@dataclass(frozen=True)
class PermutationResult:
    observed: StatisticValue
    replicates: np.ndarray = field(repr=False)
    p_value: float
    critical_value: float
    alpha: float
    m: int
    seed: object

    @property
    def reject(self):
        """True when T_{n,a} exceeds the empirical critical value."""
        return self.observed.t_na > self.critical_value


def permutation_replicates(residuals, a, m=DEFAULT_M, seed=None, workers=1, backend=None):
    """``m`` permutation statistics for the sign stream of ``seed``."""
    y = as_residuals(residuals)
    a = check_bandwidth(a)
    n, d = y.shape
    kern = _backend.get(backend)
    mats = kern.pair_matrices(y, a)
    nblocks = -(-m // SIGN_BLOCK)

    def run(b):
        size = min(SIGN_BLOCK, m - b * SIGN_BLOCK)
        u = np.ascontiguousarray(sign_block(seed, b, n)[:size])
        return np.asarray(kern.tperm_sums(y, u, a, mats))

    if workers > 1 and nblocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(nblocks)))
    else:
        parts = [run(b) for b in range(nblocks)]
    raw = np.concatenate(parts)
    return math.pi ** (d / 2) / (2.0 * n * a ** (d / 2)) * raw


def permutation_test(residuals, a=1.0, m=DEFAULT_M, alpha=0.05, seed=None, workers=1, backend=None):
    """Permutation test of reflected symmetry.

    Parameters
    ----------
    residuals : (n, d) array_like
        Scaled residuals.
    a : float
        Weight parameter.
    m : int
        Number of sign-flip replicates.
    alpha : float
        Level used for the reported critical value.
    seed : int or None
        Master seed of the sign stream.  None draws fresh OS entropy, which
        is recorded in the result so the run can be repeated.
    workers : int
        Threads over which replicate blocks are spread.

    Returns
    -------
    PermutationResult
    """
    if int(m) != m or m < 1:
        raise InvalidDataError(f"m must be a positive integer, got {m}")
    if not 0 < alpha < 1:
        raise InvalidDataError(f"alpha must lie in (0, 1), got {alpha}")
    m = int(m)
    if seed is None:
        seed = int(np.random.SeedSequence().entropy)
    observed = t_statistic(residuals, a, backend=backend)
    reps = permutation_replicates(residuals, a, m=m, seed=seed, workers=workers, backend=backend)
    return PermutationResult(
        observed=observed,
        replicates=reps,
        p_value=permutation_pvalue(observed.t_na, reps),
        critical_value=critical_value(reps, alpha),
        alpha=float(alpha),
        m=m,
        seed=seed,
    )
