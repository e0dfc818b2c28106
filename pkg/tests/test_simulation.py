import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from hkmtest.simulation import (
    estimate_replicates,
    rejection_rate,
    replication_seed,
    run_estimation_study,
    summarize,
)


def test_replication_seeds_are_distinct():
    states = {tuple(replication_seed(0, "est-N1", 40, r).generate_state(2)) for r in range(50)}
    assert len(states) == 50
    assert not np.array_equal(replication_seed(0, "a", 40, 0).generate_state(2),
                              replication_seed(0, "b", 40, 0).generate_state(2))


def test_replicates_reproducible_and_thread_independent():
    v1 = estimate_replicates("E", 40, 0.1, 8, seed=3)
    v2 = estimate_replicates("E", 40, 0.1, 8, seed=3, workers=4)
    assert v1.shape == (8, 2)
    assert_array_equal(v1, v2)
    assert_array_equal(estimate_replicates("E", 40, 0.1, 4, seed=3), v1[:4])


def test_summarize_columns():
    values = np.array([[0.10, 0.5], [0.30, -0.2], [0.20, 0.4]])
    row = summarize("N1", 50, 0.1, values, delta=0.2, level=0.95)
    assert row.n_negative == 1
    assert_allclose(row.mean_delta_hat, 0.2)
    assert_allclose(row.mean_sigma2_hat, 0.7 / 3)
    assert_allclose(row.relative_mse, (0.01 + 0.01 + 0.0) / 3 / 0.2)
    # the negative-variance replication has no interval and cannot cover
    assert row.coverage == pytest.approx(200 / 3)


def test_study_rows():
    rows = run_estimation_study("N2", sizes=(40, 80), a=0.01, reps=5, seed=1)
    assert [r.n for r in rows] == [40, 80]
    assert all(r.reps == 5 and 0 <= r.coverage <= 100 for r in rows)
    assert rows[0].as_dict()["dist"] == "N2"


def test_rejection_rate_extremes():
    def skewed(n, seed):
        return np.random.default_rng(seed).exponential(size=(n, 1))

    assert rejection_rate(skewed, 120, a=1.0, m=99, reps=10, seed=0) == 1.0
