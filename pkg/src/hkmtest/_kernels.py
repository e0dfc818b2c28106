"""Pure numpy implementations of the O(n^2) kernel sums.

These are the fallback for the compiled ``_ckernels`` module and define the
reference semantics of every kernel.  All functions take standardized
residuals ``y`` of shape (n, d) and return *unscaled* sums; the
``pi**(d/2) / a**(d/2)`` style prefactors are applied by the callers.

Notation used below, for a pair of rows (i, j)::

    A_ij = exp(-|y_i - y_j|^2 / (4a))
    B_ij = exp(-|y_i + y_j|^2 / (4a)) = A_ij * exp(-y_i.y_j / a)

The difference ``A_ij - B_ij`` is formed as ``-A_ij * expm1(-y_i.y_j/a)`` so
that nothing cancels when ``a`` is large; where that expm1 factor would
overflow (small ``a``, strongly negative ``y_i.y_j``) it is formed directly.
"""

import math

import numpy as np

# rows per block; bounds the temporaries to block * n doubles
BLOCK_ROWS = 256
# largest expm1 argument used; beyond it A - B is formed directly
EXPM1_MAX = 700.0


def _block_ab(y, sq, start, stop, a):
    g = y[start:stop] @ y.T
    d2 = sq[start:stop, None] + sq[None, :] - 2.0 * g
    np.maximum(d2, 0.0, out=d2)
    amat = np.exp(-d2 / (4.0 * a))
    x = -g / a
    diff = -amat * np.expm1(np.minimum(x, EXPM1_MAX))
    big = x >= EXPM1_MAX
    if big.any():
        sp = np.maximum(d2[big] + 4.0 * g[big], 0.0)
        diff[big] = amat[big] - np.exp(-sp / (4.0 * a))
    return amat, diff


def pair_sum(y, a):
    """Sum over all (i, j) of ``A_ij - B_ij``."""
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = y.shape[0]
    sq = np.einsum("ij,ij->i", y, y)
    partials = []
    for start in range(0, n, BLOCK_ROWS):
        stop = min(start + BLOCK_ROWS, n)
        _, diff = _block_ab(y, sq, start, stop, a)
        partials.extend(diff.sum(axis=1).tolist())
    return math.fsum(partials)


def rho_rows(y, a):
    """Row sums needed by the variance estimator.

    Returns
    -------
    r1 : (n,) ndarray
        ``r1[i] = sum_l (A_il - B_il)``
    r2 : (n, d) ndarray
        ``r2[i] = sum_l (y_l - y_i) A_il + (y_l + y_i) B_il``
    """
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = y.shape[0]
    sq = np.einsum("ij,ij->i", y, y)
    r1 = np.empty(n)
    r2 = np.empty_like(y)
    for start in range(0, n, BLOCK_ROWS):
        stop = min(start + BLOCK_ROWS, n)
        amat, diff = _block_ab(y, sq, start, stop, a)
        r1[start:stop] = diff.sum(axis=1)
        # A + B = 2A - (A - B)
        r2[start:stop] = (2.0 * amat - diff) @ y - y[start:stop] * r1[start:stop, None]
    return r1, r2


def pair_matrices(y, a):
    """Dense ``(A + B) / 2`` and ``(A - B) / 2``; O(n^2) memory."""
    y = np.ascontiguousarray(y, dtype=np.float64)
    sq = np.einsum("ij,ij->i", y, y)
    amat, diff = _block_ab(y, sq, 0, y.shape[0], a)
    half_diff = 0.5 * diff
    return amat - half_diff, half_diff


def tperm_sums(y, signs, a, mats=None):
    """Unscaled permutation statistic for each row of ``signs``.

    ``signs`` has shape (m, n) with entries +-1.  With ``Z_j = u_j y_j``,
    ``zbar`` the mean of the ``Z_j``, ``c = |zbar|^2 / (2a)`` and
    ``w_j = Z_j.zbar / (2a)``, each entry equals::

        sum_ij (2 + c - (1 + w_i - w_j)^2) exp(-|Z_i - Z_j|^2 / 4a)
             + (c - (1 + w_i + w_j)^2)     exp(-|Z_i + Z_j|^2 / 4a)

    The Gaussian factors only depend on whether ``u_i == u_j``, so they are
    ``P +- Q * u u^T`` with ``P = (A + B)/2`` and ``Q = (A - B)/2``, and every
    double sum reduces to matrix products against ``P`` and ``Q``.
    """
    y = np.ascontiguousarray(y, dtype=np.float64)
    if mats is None:
        mats = pair_matrices(y, a)
    return tperm_from_matrices(y, signs, a, *mats)


def tperm_from_matrices(y, signs, a, pmat, qmat):
    """The reduction of :func:`tperm_sums` given ``P`` and ``Q``; shared by both backends."""
    n = y.shape[0]
    u = np.asarray(signs, dtype=np.float64).T  # (n, m)
    m = u.shape[1]
    zbar = (y.T @ u) / n  # (d, m)
    c = np.einsum("km,km->m", zbar, zbar) / (2.0 * a)
    w = u * (y @ zbar) / (2.0 * a)  # (n, m)

    pw = pmat @ np.hstack([np.ones((n, 1)), w])
    qu = qmat @ np.hstack([u, u * w])
    p1, pw = pw[:, :1], pw[:, 1:]
    qu1, quw = u * qu[:, :m], u * qu[:, m:]

    e1m, e1p = p1 + qu1, p1 - qu1  # E^- 1, E^+ 1
    ewm, ewp = pw + quw, pw - quw  # E^- w, E^+ w
    w2 = w * w
    s_minus = (1.0 + c) * e1m.sum(axis=0) - 2.0 * (w2 * e1m).sum(axis=0) + 2.0 * (w * ewm).sum(axis=0)
    s_plus = (
        (c - 1.0) * e1p.sum(axis=0)
        - 4.0 * (w * e1p).sum(axis=0)
        - 2.0 * (w2 * e1p).sum(axis=0)
        - 2.0 * (w * ewp).sum(axis=0)
    )
    return s_minus + s_plus
