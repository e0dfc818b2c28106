"""Alternative distributions used in the simulation studies, with ground truth.

* ``N1`` / ``N2``: the normal mixture ``X = T Y1 + (1 - T) Y2`` with mixing
  weight ``p = 0.25`` / ``p = 0.4``; mean zero, identity covariance, and an
  analytic asymmetry measure Delta.
* ``E``: the centered standard exponential ``E - 1``.  Delta and the limiting
  variance sigma^2 are computed from the closed-form characteristic function
  by quadrature.

All samplers accept anything ``numpy.random.default_rng`` accepts as seed.
"""

import functools
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, InvalidDataError, NumericalError
from .statistic import check_bandwidth


@dataclass(frozen=True)
class AlternativeTruth:
    """Population values for one distribution and weight parameter ``a``.

    ``sigma2`` is None when it is not available for the distribution.
    ``method`` is one of 'analytic', 'quadrature', 'monte-carlo'.
    """

    delta: float
    sigma2: float | None
    method: str


@dataclass(frozen=True)
class NormalMixtureSpec:
    p: float
    d: int = 1

    def __post_init__(self):
        if not 0 <= self.p < 0.5:
            raise DomainError(f"mixing weight must satisfy 0 <= p < 1/2, got {self.p}")
        if int(self.d) != self.d or self.d < 1:
            raise InvalidDataError(f"dimension must be a positive integer, got {self.d}")

    @property
    def shift(self):
        """Mean of the second component along e1 is ``-shift``."""
        return self.p / (1.0 - self.p)

    @property
    def first_variance(self):
        """Variance of the first coordinate within each component."""
        return (1.0 - 2.0 * self.p) / (1.0 - self.p)


N1 = NormalMixtureSpec(0.25)
N2 = NormalMixtureSpec(0.4)


def sample_mixture(spec, n, seed=None):
    """Draw ``n`` observations (n, d) from the normal mixture."""
    rng = np.random.default_rng(seed)
    comp = rng.random(n) < spec.p
    x = rng.standard_normal((n, spec.d))
    x[:, 0] = x[:, 0] * math.sqrt(spec.first_variance) + np.where(comp, 1.0, -spec.shift)
    return x


def mixture_char_imag(spec, t):
    """Imaginary part I(t) = E sin(t.X) of the mixture's characteristic function.

    ``t`` has shape (..., d); a scalar or 1-D array is read as d = 1 points.
    """
    t = np.asarray(t, dtype=np.float64)
    if spec.d == 1 and (t.ndim == 0 or t.shape[-1] != 1):
        t = t[..., None]
    t1 = t[..., 0]
    quad = np.sum(t * t, axis=-1) + (spec.first_variance - 1.0) * t1 * t1
    p = spec.p
    return np.exp(-0.5 * quad) * (p * np.sin(t1) - (1.0 - p) * np.sin(spec.shift * t1))


def sine_gauss_integral(alpha, beta, gamma):
    """``int sin(alpha x) sin(beta x) exp(-gamma x^2) dx`` over the real line."""
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    c = math.sqrt(math.pi) / (2.0 * math.sqrt(gamma))
    return c * (math.exp(-((alpha - beta) ** 2) / (4.0 * gamma)) - math.exp(-((alpha + beta) ** 2) / (4.0 * gamma)))


def mixture_delta(spec, a):
    """Analytic asymmetry measure Delta of the normal mixture."""
    a = check_bandwidth(a)
    p = spec.p
    gam = a + spec.first_variance
    if not gam > 0:
        raise DomainError(f"gamma_a = {gam} must be positive")
    # the three sine-Gaussian integrals of the expanded square, in t1
    bracket = (
        p * p * sine_gauss_integral(1.0, 1.0, gam)
        + (1.0 - p) ** 2 * sine_gauss_integral(spec.shift, spec.shift, gam)
        - 2.0 * p * (1.0 - p) * sine_gauss_integral(1.0, spec.shift, gam)
    )
    other = (math.pi / (a + 1.0)) ** ((spec.d - 1) / 2)
    return AlternativeTruth(delta=other * bracket, sigma2=None, method="analytic")


def mixture_delta_closed(spec, a):
    """The same Delta written out as one closed-form expression."""
    a = check_bandwidth(a)
    p = spec.p
    g = a + spec.first_variance
    q = 1.0 - p
    bracket = (
        0.5 * p * p * (1.0 - math.exp(-1.0 / g))
        + 0.5 * q * q * (1.0 - math.exp(-p * p / (q * q * g)))
        - p * q * (math.exp(-((1.0 - 2.0 * p) ** 2) / (4.0 * q * q * g)) - math.exp(-1.0 / (4.0 * q * q * g)))
    )
    return (math.pi / (a + 1.0)) ** ((spec.d - 1) / 2) * math.sqrt(math.pi / g) * bracket


def sample_centered_exponential(n, seed=None, d=1):
    """``n`` draws (n, d) of ``E - 1`` with ``E ~ Exp(1)`` i.i.d. per coordinate.

    Inverse-CDF sampling: ``-log(U) - 1`` with ``U`` uniform on (0, 1].
    """
    rng = np.random.default_rng(seed)
    u = 1.0 - rng.random((n, d))
    return -np.log(u) - 1.0


# characteristic function of X = E - 1 and its first two derivatives

def exp_cf(t):
    return np.exp(-1j * t) / (1.0 - 1j * t)


def exp_cf_d1(t):
    return -t * exp_cf(t) / (1.0 - 1j * t)


def exp_cf_d2(t):
    q = 1.0 / (1.0 - 1j * t)
    phi = exp_cf(t)
    return -(phi * q + t * exp_cf_d1(t) * q + 1j * t * phi * q * q)


# central moments E X^3, E X^4 of the centered standard exponential
EXP_M3 = 2.0
EXP_M4 = 9.0


def _trapezoid_truth(cf, cf_d1, cf_d2, m3, m4, a, h):
    """Delta and sigma^2 of a standardized univariate law on a trapezoid grid.

    With ``phi`` the characteristic function: R = Re phi, I = Im phi,
    C(t) = E[X cos tX] = Im phi', S(t) = E[X sin tX] = -Re phi',
    E[X^2 sin tX] = -Im phi''.  In one dimension the covariance kernel K(s, t)
    splits into E[sin sX sin tX] = (R(s-t) - R(s+t))/2, which needs the full
    grid, plus products of functions of s and of t alone.
    """
    half = math.sqrt(45.0 / a)
    k = int(math.ceil(half / h))
    t = h * np.arange(-k, k + 1)
    phi, d1, d2 = cf(t), cf_d1(t), cf_d2(t)
    r, im = phi.real, phi.imag
    c, s, sx2 = d1.imag, -d1.real, -d2.imag
    omega = im * np.exp(-a * t * t) * h  # I(t) w(t) dt

    delta = float(np.sum(im * omega))

    j1 = 0.0
    for start in range(0, t.size, 512):
        blk = t[start:start + 512, None]
        rm = cf(blk - t[None, :]).real
        rp = cf(blk + t[None, :]).real
        j1 += 0.5 * float(omega[start:start + 512] @ ((rm - rp) @ omega))

    int_s_i = float(np.sum(s * omega))       # int S I w
    int_tr_i = float(np.sum(t * r * omega))  # int t R I w
    int_sx2_i = float(np.sum(sx2 * omega))   # int E[X^2 sin tX] I w
    int_tc_i = float(np.sum(t * c * omega))  # int t C I w
    k_int = (
        j1
        - delta * delta
        - 2.0 * int_tr_i * int_s_i
        + int_tr_i ** 2
        - int_sx2_i * int_tc_i
        + delta * int_tc_i
        + m3 * int_tr_i * int_tc_i
        + 0.25 * (m4 - 1.0) * int_tc_i ** 2
    )
    return delta, 4.0 * k_int


@functools.lru_cache(maxsize=None)
def exponential_truth(a, h=0.2, rtol=1e-9, max_halvings=4):
    """Delta and sigma^2 for the centered standard exponential.

    Trapezoid rule on ``[-L, L]^2`` with ``L = sqrt(45/a)``; the integrands
    are analytic in the strip ``|Im t| < 1``, so the error decays like
    ``exp(a - 2 pi / h)``.  The step is halved until two successive results
    agree to ``rtol``; a :class:`NumericalError` is raised if that does not
    happen within ``max_halvings`` halvings.
    """
    a = check_bandwidth(a)
    prev = _trapezoid_truth(exp_cf, exp_cf_d1, exp_cf_d2, EXP_M3, EXP_M4, a, h)
    for _ in range(max_halvings):
        h /= 2.0
        cur = _trapezoid_truth(exp_cf, exp_cf_d1, exp_cf_d2, EXP_M3, EXP_M4, a, h)
        if all(abs(x1 - x0) <= rtol * abs(x1) for x0, x1 in zip(prev, cur)):
            return AlternativeTruth(delta=cur[0], sigma2=cur[1], method="quadrature")
        prev = cur
    raise NumericalError(
        "exponential truth quadrature did not converge",
        {"a": a, "h": h, "delta": cur[0], "sigma2": cur[1]},
    )


# registry used by the simulation harness
DISTRIBUTIONS = {
    "N1": (lambda n, seed: sample_mixture(N1, n, seed), lambda a: mixture_delta(N1, a)),
    "N2": (lambda n, seed: sample_mixture(N2, n, seed), lambda a: mixture_delta(N2, a)),
    "E": (lambda n, seed: sample_centered_exponential(n, seed), exponential_truth),
}


def get_distribution(name):
    """Return ``(sampler, truth)`` for 'N1', 'N2' or 'E'."""
    try:
        return DISTRIBUTIONS[name]
    except KeyError:
        raise InvalidDataError(f"unknown distribution {name!r}; choose from {sorted(DISTRIBUTIONS)}") from None
