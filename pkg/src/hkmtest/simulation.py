"""Monte Carlo studies: estimation tables and level / power of the test.

Replication ``r`` of a study draws its data from
``SeedSequence(seed, spawn_key=(tag, n, r))``, so every replication is
reproducible on its own and results do not depend on the worker count.
"""

import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .alternatives import get_distribution
from .permutation import permutation_test
from .standardize import residuals_of
from .statistic import t_statistic
from .variance import confidence_interval, sigma2_hat

DEFAULT_REPS = 1000
SIZES = (40, 80, 100, 250, 500)


def replication_seed(seed, tag, n, r):
    """Seed sequence of replication ``r`` for study ``tag`` at sample size ``n``."""
    return np.random.SeedSequence(seed, spawn_key=(zlib.crc32(tag.encode()), int(n), int(r)))


def _map(func, items, workers):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, items))
    return [func(i) for i in items]


@dataclass(frozen=True)
class SimulationRow:
    """One line of an estimation table.

    ``coverage`` is the percentage of replications whose confidence interval
    contains the true Delta; replications with a negative variance estimate
    have no interval and count as not covering.
    """

    dist: str
    n: int
    a: float
    reps: int
    delta: float
    mean_delta_hat: float
    mean_sigma2_hat: float
    n_negative: int
    coverage: float
    relative_mse: float

    def as_dict(self):
        return asdict(self)


def estimate_replicates(dist, n, a, reps, seed, workers=1):
    """Per-replication ``(T/n, sigma2_hat)`` as an (reps, 2) array."""
    sampler, _ = get_distribution(dist)

    def one(r):
        y = residuals_of(sampler(n, replication_seed(seed, f"est-{dist}", n, r)))
        return t_statistic(y, a).delta_hat, sigma2_hat(y, a)

    return np.array(_map(one, range(reps), workers), dtype=np.float64).reshape(reps, 2)


def summarize(dist, n, a, values, delta, level=0.95):
    """Table row from per-replication ``(T/n, sigma2_hat)`` values."""
    dh, s2 = values[:, 0], values[:, 1]
    covered = sum(confidence_interval(x, v, n, level).covers(delta) for x, v in zip(dh, s2))
    return SimulationRow(
        dist=dist,
        n=int(n),
        a=float(a),
        reps=int(values.shape[0]),
        delta=float(delta),
        mean_delta_hat=float(dh.mean()),
        mean_sigma2_hat=float(s2.mean()),
        n_negative=int(np.count_nonzero(s2 < 0)),
        coverage=100.0 * covered / values.shape[0],
        relative_mse=float(np.mean((dh - delta) ** 2) / delta),
    )


def run_estimation_study(dist, sizes=SIZES, a=0.01, reps=DEFAULT_REPS, seed=0, level=0.95, workers=1):
    """Estimation table for one distribution: one :class:`SimulationRow` per sample size."""
    _, truth = get_distribution(dist)
    delta = truth(a).delta
    return [summarize(dist, n, a, estimate_replicates(dist, n, a, reps, seed, workers), delta, level) for n in sizes]


def rejection_rate(sampler, n, a=1.0, m=200, alpha=0.05, reps=500, seed=0, tag="level", workers=1):
    """Fraction of ``reps`` permutation tests (at level alpha) that reject.

    ``sampler(n, seed)`` returns an (n, d) data matrix.  A replication
    rejects when T_{n,a} exceeds the empirical (1 - alpha)-quantile of its
    permutation replicates.
    """

    def one(r):
        ss = replication_seed(seed, tag, n, r)
        data_seed, sign_seed = ss.spawn(2)
        y = residuals_of(sampler(n, data_seed))
        res = permutation_test(y, a, m=m, alpha=alpha, seed=sign_seed.generate_state(1)[0].item())
        return res.reject

    hits = _map(one, range(reps), workers)
    return float(np.mean(hits))
