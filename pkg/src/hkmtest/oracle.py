"""Brute-force quadrature of the integral definitions.

Test-only: nothing in the production code paths imports this module.  Each
routine integrates the defining expression directly (sines and cosines on
a quadrature grid) and shares no algebra with the closed forms it checks.
Without an explicit rule, a routine evaluates a rule and its refinement
and raises :class:`~hkmtest.exceptions.NumericalError` when they disagree
beyond ``rtol``, so a non-converged value never passes silently.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .exceptions import InvalidDataError, NumericalError
from .statistic import as_residuals, check_bandwidth


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray  # (N, d)
    weights: np.ndarray  # (N,)
    kind: str

    def __post_init__(self):
        if self.nodes.shape[0] != self.weights.shape[0]:
            raise InvalidDataError("nodes and weights differ in length")
        if not np.all(self.weights > 0):
            raise InvalidDataError("quadrature weights must be positive")

    @property
    def d(self):
        return self.nodes.shape[1]


def _tensor(points_1d, weights_1d, d):
    grids = np.meshgrid(*([points_1d] * d), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*([weights_1d] * d), indexing="ij")
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    keep = weights > 0
    return nodes[keep], weights[keep]


def gauss_hermite_rule(a, n_nodes, d=1):
    """Tensor Gauss-Hermite rule for the weight ``exp(-a |t|^2)`` on R^d.

    Nodes are ``x / sqrt(a)`` for the standard rule with weight ``exp(-x^2)``.
    Nodes whose weight underflows to zero are dropped.
    """
    a = check_bandwidth(a)
    x, w = special.roots_hermite(int(n_nodes))
    keep = w > 0  # outer weights underflow for large rules
    x, w = x[keep], w[keep]
    nodes, weights = _tensor(x / math.sqrt(a), w / math.sqrt(a), d)
    return QuadratureRule(nodes=nodes, weights=weights, kind="gauss-hermite-tensor")


def gauss_legendre_rule(half_width, panels, order=8, d=1):
    """Composite Gauss-Legendre tensor rule on ``[-half_width, half_width]^d`` (unit weight).

    The node set is symmetric: reversing the node order along every axis
    maps ``x`` to ``-x``.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(-half_width, half_width, panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    pts = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
    wts = (0.5 * (hi - lo) * w).ravel()
    nodes, weights = _tensor(pts, wts, d)
    return QuadratureRule(nodes=nodes, weights=weights, kind="gauss-legendre-tensor")


def _ladder(evaluate, make_rule, n_nodes, rtol, atol, what):
    coarse = evaluate(make_rule(n_nodes))
    fine = evaluate(make_rule(2 * n_nodes))
    if abs(fine - coarse) > rtol * abs(fine) + atol:
        raise NumericalError(
            f"{what}: quadrature not converged",
            {"nodes": n_nodes, "coarse": coarse, "fine": fine},
        )
    return fine


def t_by_quadrature(residuals, a, rule=None, n_nodes=128, rtol=1e-9, atol=1e-13):
    """``int (n^{-1/2} sum_j sin(t.Y_j))^2 exp(-a|t|^2) dt``."""
    y = as_residuals(residuals)
    n, d = y.shape
    if rule is None:
        return _ladder(
            lambda r: t_by_quadrature(y, a, r),
            lambda k: gauss_hermite_rule(a, k, d),
            n_nodes, rtol, atol, "t_by_quadrature",
        )
    s = np.sin(rule.nodes @ y.T).sum(axis=1)
    return float(rule.weights @ (s * s)) / n


def tperm_by_quadrature(residuals, signs, a, rule=None, n_nodes=128, rtol=1e-9, atol=1e-13):
    """Integral of the squared permutation process for one sign vector.

    ``W(t) = n^{-1/2} sum_j u_j (sin(t.y_j) - R_n(t) t.y_j)`` with
    ``R_n(t) = n^{-1} sum_k cos(t.y_k)``.
    """
    y = as_residuals(residuals)
    n, d = y.shape
    u = np.asarray(signs, dtype=np.float64)
    if u.shape != (n,):
        raise InvalidDataError(f"signs must have shape ({n},), got {u.shape}")
    if rule is None:
        return _ladder(
            lambda r: tperm_by_quadrature(y, u, a, r),
            lambda k: gauss_hermite_rule(a, k, d),
            n_nodes, rtol, atol, "tperm_by_quadrature",
        )
    proj = rule.nodes @ y.T  # t.y_j
    r_n = np.cos(proj).mean(axis=1)
    w = ((np.sin(proj) - r_n[:, None] * proj) * u).sum(axis=1) / math.sqrt(n)
    return float(rule.weights @ (w * w))


def delta_by_quadrature(char_imag, a, d=1, rule=None, n_nodes=128, rtol=1e-9, atol=1e-13):
    """``int I(t)^2 exp(-a|t|^2) dt`` for a vectorized ``char_imag: (N, d) -> (N,)``."""
    if rule is None:
        return _ladder(
            lambda r: delta_by_quadrature(char_imag, a, d, r),
            lambda k: gauss_hermite_rule(a, k, d),
            n_nodes, rtol, atol, "delta_by_quadrature",
        )
    vals = np.asarray(char_imag(rule.nodes), dtype=np.float64).reshape(-1)
    return float(rule.weights @ (vals * vals))


def delta_adaptive_1d(char_imag, a, limit=2000):
    """1-D variant of :func:`delta_by_quadrature` using adaptive quadrature on [0, inf)."""
    a = check_bandwidth(a)
    val, err = integrate.quad(lambda t: float(char_imag(np.array([[t]]))[0]) ** 2 * math.exp(-a * t * t),
                              0.0, np.inf, limit=limit, epsabs=1e-14, epsrel=1e-12)
    return 2.0 * val


def delta_by_density(expectation, a, d=1, half_width=12.0, panels=48, order=8):
    """Density form of Delta.

    ``1/(4 a^d) int (g(x) - g(-x))^2 dx`` with ``g(x) = E exp(-|x - X|^2 / (2a))``.
    ``expectation`` maps an (N, d) array of points to the (N,) values of
    ``g``; it may be a closed form or a Monte Carlo average, see
    :func:`sample_expectation`.
    """
    a = check_bandwidth(a)
    rule = gauss_legendre_rule(half_width, panels, order, d)
    g = np.asarray(expectation(rule.nodes), dtype=np.float64)
    shape = (panels * order,) * d
    mirrored = np.flip(g.reshape(shape)).ravel()
    diff = g - mirrored
    return float(rule.weights @ (diff * diff)) / (4.0 * a ** d)


def sample_expectation(sample, a, chunk=65536):
    """``g(x) = mean_i exp(-|x - X_i|^2 / (2a))`` over a sample of shape (N, d)."""
    xs = np.asarray(sample, dtype=np.float64)
    if xs.ndim == 1:
        xs = xs[:, None]

    def g(points):
        points = np.atleast_2d(points)
        total = np.zeros(points.shape[0])
        for start in range(0, xs.shape[0], chunk):
            blk = xs[start:start + chunk]
            d2 = (
                np.sum(points * points, axis=1)[:, None]
                + np.sum(blk * blk, axis=1)[None, :]
                - 2.0 * points @ blk.T
            )
            total += np.exp(-np.maximum(d2, 0.0) / (2.0 * a)).sum(axis=1)
        return total / xs.shape[0]

    return g


def sigma2_by_quadrature(residuals, a, rule=None, n_nodes=128, rtol=1e-9, atol=1e-13, block=512):
    """Plug-in variance ``4 int int K_n(s,t) I_n(s) I_n(t) w(s,t) ds dt``.

    ``K_n`` is the empirical covariance kernel, built node by node from the
    empirical R_n, I_n, C_n, S_n and the empirical moment terms; it is
    materialized in blocks of ``block`` rows.
    """
    y = as_residuals(residuals)
    n, d = y.shape
    if rule is None:
        return _ladder(
            lambda r: sigma2_by_quadrature(y, a, r, block=block),
            lambda k: gauss_hermite_rule(a, k, d),
            n_nodes, rtol, atol, "sigma2_by_quadrature",
        )
    nodes = rule.nodes
    proj = nodes @ y.T  # (N, n): t.Y_j
    sn, cs = np.sin(proj), np.cos(proj)
    r_n = cs.mean(axis=1)
    i_n = sn.mean(axis=1)
    c_n = cs @ y / n  # (N, d)
    cy = c_n @ y.T  # C_n(t).Y_j
    tc = np.einsum("ij,ij->i", nodes, c_n)  # t.C_n(t)
    pc = proj * cy
    v = rule.weights * i_n

    total = 0.0
    nn = nodes.shape[0]
    for start in range(0, nn, block):
        sl = slice(start, min(start + block, nn))
        # rows index s, columns index t
        k = sn[sl] @ sn.T / n                                   # E sin(s.Y) sin(t.Y)
        k -= np.outer(i_n[sl], i_n)                             # I(s) I(t)
        k -= (sn[sl] @ proj.T / n) * r_n[None, :]               # R(t) t.S(s)
        k -= r_n[sl, None] * (proj[sl] @ sn.T / n)              # R(s) s.S(t)
        k += np.outer(r_n[sl], r_n) * (nodes[sl] @ nodes.T)     # R(s) R(t) s.t
        k -= 0.5 * (sn[sl] @ pc.T / n)                          # t' E[sin(s.Y) Y Y'] C(t)
        k += 0.5 * np.outer(i_n[sl], tc)                        # I(s) t.C(t)
        k -= 0.5 * (pc[sl] @ sn.T / n)                          # s' E[sin(t.Y) Y Y'] C(s)
        k += 0.5 * np.outer(tc[sl], i_n)                        # I(t) s.C(s)
        k += 0.5 * r_n[sl, None] * (proj[sl] @ pc.T / n)        # s' R(s) E[Y t'Y Y'] C(t)
        k += 0.5 * r_n[None, :] * (pc[sl] @ proj.T / n)         # t' R(t) E[Y s'Y Y'] C(s)
        k += 0.25 * (pc[sl] @ pc.T / n - np.outer(tc[sl], tc))  # C(s)' E[YY' s t' YY'] C(t) - s.C(s) t.C(t)
        total += float(v[sl] @ (k @ v))
    return 4.0 * total


def mixture_gauss_expectation(spec, a):
    """Closed-form ``g(x) = E exp(-|x - X|^2/(2a))`` for a normal mixture."""
    sd1 = spec.first_variance

    def comp(points, mean1):
        x1 = points[:, 0] - mean1
        out = math.sqrt(a / (a + sd1)) * np.exp(-x1 * x1 / (2.0 * (a + sd1)))
        rest = points[:, 1:]
        if rest.shape[1]:
            out = out * (a / (a + 1.0)) ** (rest.shape[1] / 2) * np.exp(-np.sum(rest * rest, axis=1) / (2.0 * (a + 1.0)))
        return out

    def g(points):
        points = np.atleast_2d(points)
        return spec.p * comp(points, 1.0) + (1.0 - spec.p) * comp(points, -spec.shift)

    return g


def exponential_gauss_expectation(a):
    """Closed-form ``g(x) = E exp(-(x - X)^2/(2a))`` for ``X = E - 1``, E ~ Exp(1)."""

    def g(points):
        z = np.atleast_2d(points)[:, 0] + 1.0
        log_val = -z + 0.5 * a + 0.5 * math.log(2.0 * math.pi * a) + special.log_ndtr((z - a) / math.sqrt(a))
        return np.exp(log_val)

    return g


def exponential_expectation_quad(func, t):
    """``E f(X, t)`` for ``X = E - 1`` by adaptive quadrature against the Exp(1) density."""
    val, _ = integrate.quad(lambda e: func(e - 1.0, t) * math.exp(-e), 0.0, np.inf, limit=500, epsabs=1e-13, epsrel=1e-12)
    return val
