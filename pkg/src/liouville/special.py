"""Special functions of Liouville theory: log-Gamma, ``ell``, Upsilon and DOZZ.

Upsilon is evaluated from its integral representation inside the strip
``0 < Re z < Q`` and continued to the whole plane with the two shift
relations.  Everything is computed in log space and exponentiated once, so
the long products of shift factors never overflow.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special as sc

from .errors import LiouvilleError, PoleError

__all__ = [
    "LiouvilleParams",
    "ConformalWeight",
    "conformal_weight",
    "log_gamma",
    "ell",
    "upsilon",
    "log_upsilon",
    "upsilon_is_zero",
    "upsilon_prime_zero",
    "dozz",
    "dozz_log_prefactor",
]

SQRT2 = math.sqrt(2.0)

# lattice tests and pole detection
_LATTICE_TOL = 1e-12


@dataclass(frozen=True)
class LiouvilleParams:
    """Coupling constants ``(gamma, mu)`` together with the derived ``Q`` and ``c_L``."""

    gamma: float
    mu: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.gamma < 2.0:
            raise LiouvilleError(f"gamma must lie in (0, 2), got {self.gamma}")
        if not self.mu > 0.0:
            raise LiouvilleError(f"mu must be positive, got {self.mu}")

    @property
    def Q(self) -> float:
        return 2.0 / self.gamma + self.gamma / 2.0

    @property
    def cL(self) -> float:
        return 1.0 + 6.0 * self.Q**2

    def delta(self, alpha):
        """Conformal weight of the vertex operator with momentum ``alpha``."""
        return conformal_weight(alpha, self.Q)

    def with_mu(self, mu: float) -> "LiouvilleParams":
        return LiouvilleParams(self.gamma, mu)


def conformal_weight(alpha, Q):
    """``(alpha/2) (Q - alpha/2)``; real input gives a float, complex gives complex."""
    return 0.5 * alpha * (Q - 0.5 * alpha)


@dataclass(frozen=True)
class ConformalWeight:
    alpha: complex
    delta: complex

    @classmethod
    def from_alpha(cls, alpha, params: LiouvilleParams) -> "ConformalWeight":
        alpha = complex(alpha)
        return cls(alpha, conformal_weight(alpha, params.Q))

    @classmethod
    def spectral(cls, P: float, params: LiouvilleParams) -> "ConformalWeight":
        """Weight on the spectrum line ``alpha = Q + iP``; equals ``(Q^2 + P^2)/4``."""
        Q = params.Q
        return cls(complex(Q, P), complex((Q * Q + P * P) / 4.0, 0.0))


# ---------------------------------------------------------------------------
# Gamma function and ell
# ---------------------------------------------------------------------------


def _nonpositive_integer(z: complex) -> bool:
    if abs(z.imag) > _LATTICE_TOL * max(1.0, abs(z)):
        return False
    x = z.real
    return x <= 0.5 and abs(x - round(x)) <= _LATTICE_TOL * max(1.0, abs(x))


def log_gamma(z) -> complex:
    """Principal branch of ``ln Gamma(z)`` for complex ``z``.

    Raises :class:`PoleError` at ``z = 0, -1, -2, ...``.
    """
    z = complex(z)
    if _nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at z={z}", location=z)
    return complex(sc.loggamma(z))


def ell(z) -> complex:
    """``Gamma(z) / Gamma(1 - z)``.

    Returns exactly ``0`` at ``z = 1, 2, ...`` and raises :class:`PoleError`
    at ``z = 0, -1, ...``.
    """
    z = complex(z)
    if _nonpositive_integer(z):
        raise PoleError(f"ell has a pole at z={z}", location=z)
    if _nonpositive_integer(1.0 - z):
        return 0j
    if z.imag == 0.0:
        x = z.real
        sign = sc.gammasgn(x) * sc.gammasgn(1.0 - x)
        return complex(sign * math.exp(sc.gammaln(x) - sc.gammaln(1.0 - x)))
    return cmath.exp(sc.loggamma(z) - sc.loggamma(1.0 - z))


def _log_ell(z: complex) -> complex:
    # branch of the log is irrelevant: only exp() of sums is ever used
    return complex(sc.loggamma(z) - sc.loggamma(1.0 - z))


# ---------------------------------------------------------------------------
# Upsilon
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = leggauss(20)
_TAYLOR_CUT = 1e-3


def _taylor_integral(a: complex, b: float, c: float, t0: float) -> complex:
    """Integral over ``[0, t0]`` of the series of the Upsilon integrand (through t^3)."""
    a2 = a * a
    a4 = a2 * a2
    bc = b * c
    c0 = -a2
    c1 = -a4 / (48 * bc) + a2 * b / (24 * c) + a2 / 2 + a2 * c / (24 * b)
    c2 = -a2 / 6
    c3 = (
        -a4 * a2 / (1440 * bc)
        + a4 * b / (288 * c)
        + a4 * c / (288 * b)
        - 7 * a2 * b**3 / (1440 * c)
        - a2 * bc / 144
        + a2 / 24
        - 7 * a2 * c**3 / (1440 * b)
    )
    return c0 * t0 + c1 * t0**2 / 2 + c2 * t0**3 / 3 + c3 * t0**4 / 4


def _integrand(t: np.ndarray, a: complex, b: float, c: float) -> np.ndarray:
    # sinh^2 is even in a, so work with Re a >= 0 and factor out the growth:
    # sinh^2(at/2) / (sinh(bt) sinh(ct)) = e^{(a-b-c)t} (1-e^{-at})^2 / ((1-e^{-2bt})(1-e^{-2ct}))
    if a.real < 0:
        a = -a
    num = np.expm1(-a * t) ** 2
    den = np.expm1(-2 * b * t) * np.expm1(-2 * c * t)
    ratio = np.exp((a - b - c) * t) * num / den
    return (a * a * np.exp(-t) - ratio) / t


def _panel_sum(lo: float, hi: float, n_panels: int, a, b, c, compensated: bool) -> complex:
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    vals = w * _integrand(t, a, b, c)
    if compensated:
        return complex(math.fsum(vals.real), math.fsum(vals.imag))
    return complex(vals.sum())


def _log_upsilon_strip(z: complex, params: LiouvilleParams, compensated: bool = False) -> complex:
    Q = params.Q
    b = params.gamma / 4.0
    c = 1.0 / params.gamma
    a = Q / 2.0 - z
    if a == 0:
        return 0j
    # sinh ratio decays like exp(-(Q/2 - |Re a|) t); the first term like exp(-t)
    decay = min(1.0, Q / 2.0 - abs(a.real))
    if decay <= 0:
        raise LiouvilleError(f"z={z} is outside the strip 0 < Re z < Q")
    t_max = max(10.0, (36.0 + math.log1p(abs(a) ** 2)) / decay)
    # panel width resolves the oscillation e^{i Im(a) t}
    width = min(1.0, 8.0 / max(abs(a.imag), 1e-300))
    total = _taylor_integral(a, b, c, _TAYLOR_CUT)
    total += _panel_sum(_TAYLOR_CUT, 1.0, max(2, math.ceil((1.0 - _TAYLOR_CUT) / width)), a, b, c, compensated)
    total += _panel_sum(1.0, t_max, max(4, math.ceil((t_max - 1.0) / width)), a, b, c, compensated)
    return total


def upsilon_is_zero(z, params: LiouvilleParams, tol: float = 1e-10) -> bool:
    """True when ``z`` lies on the zero lattice ``-(g/2)N - (2/g)N`` or ``Q + (g/2)N + (2/g)N``."""
    z = complex(z)
    if abs(z.imag) > tol:
        return False
    g2 = params.gamma / 2.0
    tg = 2.0 / params.gamma
    for x in (-z.real, z.real - params.Q):
        if x < -tol:
            continue
        m = 0
        while m * g2 <= x + tol:
            r = (x - m * g2) / tg
            k = round(r)
            if k >= 0 and abs(r - k) * tg <= tol * max(1.0, abs(x)):
                return True
            m += 1
    return False


def _shift_log_factor(w: complex, params: LiouvilleParams, small_shift_is_gamma: bool) -> complex:
    """log of the factor ``L`` in ``Upsilon(w + delta) = L(w) Upsilon(w)``."""
    gamma = params.gamma
    log_base = math.log(gamma / 2.0)
    if small_shift_is_gamma:
        x = gamma * w / 2.0
        return _log_ell(x) + (1.0 - gamma * w) * log_base
    x = 2.0 * w / gamma
    return _log_ell(x) + (4.0 * w / gamma - 1.0) * log_base


def log_upsilon(z, params: LiouvilleParams, compensated: bool = False) -> complex:
    """Logarithm of ``Upsilon_{gamma/2}(z)`` (imaginary part defined mod 2 pi).

    Raises :class:`PoleError` if ``z`` is a zero of Upsilon.
    """
    z = complex(z)
    if upsilon_is_zero(z, params):
        raise PoleError(f"Upsilon vanishes at z={z}", location=z)
    Q = params.Q
    use_gamma = params.gamma <= SQRT2
    step = params.gamma / 2.0 if use_gamma else 2.0 / params.gamma
    k = round((Q / 2.0 - z.real) / step)
    acc = 0j
    if k > 0:
        # Upsilon(z) = Upsilon(z + k step) / prod_j L(z + j step)
        for j in range(k):
            acc -= _shift_log_factor(z + j * step, params, use_gamma)
    elif k < 0:
        # Upsilon(z) = prod_j L(z - j step) Upsilon(z - |k| step)
        for j in range(1, -k + 1):
            acc += _shift_log_factor(z - j * step, params, use_gamma)
    return acc + _log_upsilon_strip(z + k * step, params, compensated)


def upsilon(z, params: LiouvilleParams, compensated: bool = False) -> complex:
    """Zamolodchikov's ``Upsilon_{gamma/2}(z)``, an entire function of ``z``.

    Zeros on the lattice are returned as exact ``0``.  Real arguments give a
    real result (imaginary part set to zero).
    """
    z = complex(z)
    if upsilon_is_zero(z, params):
        return 0j
    val = cmath.exp(log_upsilon(z, params, compensated))
    if z.imag == 0.0:
        return complex(val.real, 0.0)
    return val


@lru_cache(maxsize=64)
def _upsilon_prime_zero(gamma: float) -> float:
    params = LiouvilleParams(gamma)
    return upsilon(gamma / 2.0, params).real


def upsilon_prime_zero(params: LiouvilleParams) -> float:
    """``Upsilon'(0)``, equal to ``Upsilon(gamma/2)`` by the z -> 0 limit of the first shift relation."""
    return _upsilon_prime_zero(params.gamma)


# ---------------------------------------------------------------------------
# DOZZ
# ---------------------------------------------------------------------------


def dozz_log_prefactor(alpha_sum, params: LiouvilleParams) -> complex:
    """log of ``(pi mu ell(g^2/4) (g/2)^{2 - g^2/2})^{(2Q - alpha_sum)/g}``."""
    g = params.gamma
    base = math.pi * params.mu * ell(g * g / 4.0).real * (g / 2.0) ** (2.0 - g * g / 2.0)
    return complex(2.0 * params.Q - alpha_sum) / g * math.log(base)


def _sort_key(a: complex):
    return (a.real, a.imag)


def dozz(a1, a2, a3, params: LiouvilleParams) -> complex:
    """The DOZZ three-point structure constant ``C_{gamma,mu}(a1, a2, a3)``.

    Raises :class:`PoleError` (with the vanishing Upsilon argument as
    ``location``) when a denominator factor is zero.
    """
    # canonical order makes the permutation symmetry exact in floating point
    alphas = sorted((complex(a1), complex(a2), complex(a3)), key=_sort_key)
    abar = sum(alphas)
    Q = params.Q
    den_args = [abar / 2 - Q] + [abar / 2 - a for a in alphas]
    for arg in den_args:
        if upsilon_is_zero(arg, params):
            raise PoleError(f"DOZZ pole: Upsilon({arg}) = 0 in the denominator", location=arg)
    for a in alphas:
        if upsilon_is_zero(a, params):
            return 0j
    log_val = dozz_log_prefactor(abar, params) + math.log(upsilon_prime_zero(params))
    for a in alphas:
        log_val += log_upsilon(a, params)
    for arg in den_args:
        log_val -= log_upsilon(arg, params)
    val = cmath.exp(log_val)
    if all(a.imag == 0.0 for a in alphas):
        return complex(val.real, 0.0)
    return val
