# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel sums; same contracts as ``hkmtest._kernels``.

The pair loops run without the GIL, so independent calls may share threads.
Reduction order is fixed, hence results are bitwise reproducible.  The
permutation reduction itself is matrix products and lives in ``_kernels``.
"""

import numpy as np

from libc.math cimport exp, expm1

from ._kernels import tperm_from_matrices


# beyond this the expm1 factor overflows; cancellation no longer matters there
cdef double _EXPM1_MAX = 700.0


cdef inline double _a_minus_b(double sq, double g, double inv4a, double inva) noexcept nogil:
    """``A - B`` for one pair from ``sq = |y_i - y_j|^2`` and ``g = y_i.y_j``."""
    cdef double x = -g * inva, sp
    if x < _EXPM1_MAX:
        return -exp(-sq * inv4a) * expm1(x)
    sp = sq + 4.0 * g
    if sp < 0.0:
        sp = 0.0
    return exp(-sq * inv4a) - exp(-sp * inv4a)


cdef inline double _sqdist(const double[:, ::1] y, Py_ssize_t i, Py_ssize_t j,
                           Py_ssize_t d, double *dot) noexcept nogil:
    cdef Py_ssize_t k
    cdef double s = 0.0, g = 0.0, t
    for k in range(d):
        t = y[i, k] - y[j, k]
        s += t * t
        g += y[i, k] * y[j, k]
    dot[0] = g
    return s


def pair_sum(const double[:, ::1] y, double a):
    """Sum over all (i, j) of ``A_ij - B_ij`` with Neumaier compensation."""
    cdef Py_ssize_t n = y.shape[0], d = y.shape[1], i, j, k
    cdef double inv4a = 1.0 / (4.0 * a), inva = 1.0 / a
    cdef double total = 0.0, comp = 0.0, term, t, g, sq
    with nogil:
        for i in range(n):
            sq = 0.0
            for k in range(d):
                sq += y[i, k] * y[i, k]
            term = -expm1(-sq * inva)
            t = total + term
            if abs(total) >= abs(term):
                comp += (total - t) + term
            else:
                comp += (term - t) + total
            total = t
            for j in range(i + 1, n):
                sq = _sqdist(y, i, j, d, &g)
                term = 2.0 * _a_minus_b(sq, g, inv4a, inva)
                t = total + term
                if abs(total) >= abs(term):
                    comp += (total - t) + term
                else:
                    comp += (term - t) + total
                total = t
    return total + comp


def rho_rows(const double[:, ::1] y, double a):
    """Row sums ``r1`` (n,) and ``r2`` (n, d) for the variance estimator."""
    cdef Py_ssize_t n = y.shape[0], d = y.shape[1], i, j, k
    cdef double inv4a = 1.0 / (4.0 * a), inva = 1.0 / a
    cdef double sq, g, av, diff, apb
    r1_arr = np.zeros(n)
    r2_arr = np.zeros((n, d))
    cdef double[::1] r1 = r1_arr
    cdef double[:, ::1] r2 = r2_arr
    with nogil:
        for i in range(n):
            sq = 0.0
            for k in range(d):
                sq += y[i, k] * y[i, k]
            # A_ii = 1, B_ii = exp(-|y_i|^2 / a)
            r1[i] += -expm1(-sq * inva)
            av = exp(-sq * inva)
            for k in range(d):
                r2[i, k] += 2.0 * y[i, k] * av
            for j in range(i + 1, n):
                sq = _sqdist(y, i, j, d, &g)
                av = exp(-sq * inv4a)
                diff = _a_minus_b(sq, g, inv4a, inva)
                apb = 2.0 * av - diff
                r1[i] += diff
                r1[j] += diff
                for k in range(d):
                    r2[i, k] += y[j, k] * apb - y[i, k] * diff
                    r2[j, k] += y[i, k] * apb - y[j, k] * diff
    return r1_arr, r2_arr


def pair_matrices(const double[:, ::1] y, double a):
    """Dense ``(A + B) / 2`` and ``(A - B) / 2``."""
    cdef Py_ssize_t n = y.shape[0], d = y.shape[1], i, j
    cdef double inv4a = 1.0 / (4.0 * a), inva = 1.0 / a
    cdef double sq, g, av, half_diff
    p_arr = np.empty((n, n))
    q_arr = np.empty((n, n))
    cdef double[:, ::1] p = p_arr
    cdef double[:, ::1] q = q_arr
    with nogil:
        for i in range(n):
            for j in range(i, n):
                sq = _sqdist(y, i, j, d, &g)
                av = exp(-sq * inv4a)
                half_diff = 0.5 * _a_minus_b(sq, g, inv4a, inva)
                p[i, j] = av - half_diff
                q[i, j] = half_diff
                p[j, i] = p[i, j]
                q[j, i] = half_diff
    return p_arr, q_arr


def tperm_sums(const double[:, ::1] y, signs, double a, mats=None):
    """Unscaled permutation statistic for each row of ``signs`` (m, n).

    A per-replicate pair loop is O(m n^2) scalar work; the matrix-product
    reduction does the same work in BLAS and is several times faster, so only
    ``P`` and ``Q`` are built here.
    """
    if mats is None:
        mats = pair_matrices(y, a)
    return tperm_from_matrices(np.asarray(y), signs, a, mats[0], mats[1])
