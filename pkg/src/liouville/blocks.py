"""Four-point conformal block coefficients and truncated series evaluation.

``beta_n = sum_{|nu|=|nu'|=n} v(D1, D2, DP, nu) F^{-1}(nu, nu') v(D4, D3, DP, nu')``
with ``v(D, D', D'', nu) = prod_j (nu_j D' - D + D'' + sum_{u<j} nu_u)``.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceWarning
from .partitions import YoungDiagram, young_diagrams
from .virasoro import DEFAULT_MAX_LEVEL, invert_shapovalov, shapovalov_matrix

__all__ = [
    "BlockParams",
    "BlockSeries",
    "v_weight",
    "v_vector",
    "beta_n",
    "block_coefficients",
    "block_eval",
    "block_series",
    "radius_diagnostic",
    "coefficients_csv",
]


@dataclass(frozen=True)
class BlockParams:
    """External weights ``d1..d4``, intermediate weight ``dP`` and central charge ``cL``."""

    d1: complex
    d2: complex
    d3: complex
    d4: complex
    dP: complex
    cL: float

    @classmethod
    def from_alphas(cls, alphas, P: float, params) -> "BlockParams":
        """Weights from momenta ``alpha_1..alpha_4`` and ``alpha = Q + iP`` on the spectrum line."""
        Q = params.Q
        d = [params.delta(a) for a in alphas]
        return cls(*d, (Q * Q + P * P) / 4.0, params.cL)

    def crossed(self) -> "BlockParams":
        """Weights with the first and third external operators exchanged."""
        return BlockParams(self.d3, self.d2, self.d1, self.d4, self.dP, self.cL)

    @property
    def on_spectrum_line(self) -> bool:
        dP = complex(self.dP)
        return dP.imag == 0.0 and all(complex(d).imag == 0.0 for d in (self.d1, self.d2, self.d3, self.d4))


@dataclass
class BlockSeries:
    """Coefficients ``beta_0..beta_N`` with the empirical growth rate used for tail bounds."""

    coefficients: np.ndarray
    truncation: int
    growth_rate: float

    def tail_estimate(self, z) -> float:
        az = abs(z)
        if self.truncation < 1:
            return 0.0
        if self.growth_rate * az >= 1:
            return math.inf
        return abs(self.coefficients[-1]) * az**self.truncation * az / (1 - az * self.growth_rate)

    def evaluate(self, z):
        """``(value, tail_estimate)`` of the truncated series at ``z``."""
        z = complex(z)
        if abs(z) >= 1:
            raise ValueError("block series requires |z| < 1")
        value = complex(np.polynomial.polynomial.polyval(z, self.coefficients))
        if self.growth_rate * abs(z) >= 1:
            warnings.warn(
                f"block series ratio test fails: r|z| = {self.growth_rate * abs(z):.3g} >= 1",
                DivergenceWarning,
                stacklevel=3,
            )
        return value, self.tail_estimate(z)


def v_weight(d, dprime, dsecond, nu: YoungDiagram):
    """``prod_j (nu_j d' - d + d'' + sum_{u<j} nu_u)`` over the parts of ``nu`` in stored order."""
    out = 1
    partial = 0
    for p in nu.parts:
        out *= p * dprime - d + dsecond + partial
        partial += p
    return out


def v_vector(d, dprime, dsecond, n: int) -> np.ndarray:
    """``v_weight`` for every diagram at level ``n`` in canonical order."""
    vals = [v_weight(d, dprime, dsecond, nu) for nu in young_diagrams(n)]
    real = all(complex(x).imag == 0 for x in (d, dprime, dsecond))
    return np.array(vals, dtype=float if real else complex)


def _gram(n: int, params: BlockParams) -> np.ndarray:
    return shapovalov_matrix(n).evaluate(params.dP, params.cL)


def beta_n(n: int, params: BlockParams, method: str = "inverse") -> complex:
    """Block coefficient ``beta_n``.

    ``method="inverse"`` builds ``F^{-1}`` (Cholesky on the spectrum line);
    ``method="solve"`` solves ``F x = v_right`` instead.  Both agree to
    rounding; the second is the cheaper path.
    """
    if n == 0:
        return 1.0
    left = v_vector(params.d1, params.d2, params.dP, n)
    right = v_vector(params.d4, params.d3, params.dP, n)
    if method == "inverse":
        if params.on_spectrum_line:
            inv, _ = invert_shapovalov(n, complex(params.dP).real, params.cL)
        else:
            inv = np.linalg.inv(_gram(n, params))
        val = left @ inv @ right
    elif method == "solve":
        val = left @ np.linalg.solve(_gram(n, params), right)
    else:
        raise ValueError(f"unknown method {method!r}")
    return val.item() if hasattr(val, "item") else val


def block_coefficients(params: BlockParams, N: int = DEFAULT_MAX_LEVEL, method: str = "solve") -> np.ndarray:
    """``[beta_0, ..., beta_N]``; real dtype when every weight is real."""
    vals = np.array([beta_n(n, params, method) for n in range(N + 1)], dtype=complex)
    return vals.real.copy() if not vals.imag.any() else vals


def _growth_rate(beta: np.ndarray) -> float:
    N = len(beta) - 1
    if N < 1:
        return 0.0
    ratios = []
    for n in range(max(1, N // 2), N + 1):
        if beta[n - 1] != 0:
            ratios.append(abs(beta[n] / beta[n - 1]))
    return max(ratios, default=0.0)


def block_eval(z, params: BlockParams, N_trunc: int = DEFAULT_MAX_LEVEL, coefficients=None):
    """Truncated block ``sum_{n<=N} beta_n z^n`` and a ratio-test tail estimate.

    Returns ``(value, tail_estimate)``.  The tail estimate is
    ``|beta_N z^N| |z| / (1 - |z| r)`` with ``r`` the largest ratio
    ``|beta_n / beta_{n-1}|`` over ``N/2 <= n <= N``; a
    :class:`DivergenceWarning` is emitted (and the estimate is ``inf``) when
    ``r |z| >= 1``.
    """
    beta = block_coefficients(params, N_trunc) if coefficients is None else np.asarray(coefficients)[: N_trunc + 1]
    return BlockSeries(beta, len(beta) - 1, _growth_rate(beta)).evaluate(z)


def block_series(params: BlockParams, N: int = DEFAULT_MAX_LEVEL) -> BlockSeries:
    beta = block_coefficients(params, N)
    return BlockSeries(beta, N, _growth_rate(beta))


def radius_diagnostic(params: BlockParams, N: int = DEFAULT_MAX_LEVEL) -> np.ndarray:
    """Root-test sequence ``|beta_n|^{1/n}`` for ``n = 1..N`` (inspection only)."""
    beta = block_coefficients(params, N)
    n = np.arange(1, N + 1)
    return np.abs(beta[1:]) ** (1.0 / n)


def coefficients_csv(beta) -> str:
    """CSV rows ``n, Re beta_n, Im beta_n, |beta_n|^{1/n}`` (root test empty at n = 0)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["n", "re_beta", "im_beta", "root_test"])
    for n, b in enumerate(np.asarray(beta, dtype=complex).tolist()):
        root = "" if n == 0 else repr(abs(b) ** (1.0 / n))
        writer.writerow([n, repr(b.real), repr(b.imag), root])
    return buf.getvalue()
