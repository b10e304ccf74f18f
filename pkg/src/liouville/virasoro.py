"""Shapovalov form of the Virasoro algebra, computed exactly in (Delta, c).

A word ``(t_1, ..., t_k)`` stands for ``L_{t_1} ... L_{t_k}`` acting on a
highest-weight vector; :func:`reduce_word` returns the vacuum expectation
``<Delta| L_{t_1} ... L_{t_k} |Delta>`` by commuting positive modes to the
right.  ``F(nu, nu') = <L_{nu} L_{-nu'}>`` with ``L_{-nu} = L_{-nu_k} ... L_{-nu_1}``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.linalg

from .errors import NotPositiveDefiniteError
from .partitions import YoungDiagram, partition_count, young_diagrams
from .polynomial import DeltaCPoly

__all__ = [
    "DEFAULT_MAX_LEVEL",
    "VirasoroWord",
    "ShapovalovMatrix",
    "KacReport",
    "reduce_word",
    "shapovalov_matrix",
    "shapovalov_word",
    "exact_determinant",
    "kac_degree",
    "kac_zeros",
    "det_polynomial",
    "kac_check",
    "invert_shapovalov",
]

DEFAULT_MAX_LEVEL = 8

_ONE = DeltaCPoly.constant(1)
_DELTA = DeltaCPoly.delta()
_C_OVER_12 = DeltaCPoly.central_charge() * Fraction(1, 12)


@dataclass(frozen=True)
class VirasoroWord:
    """``scalar * L_{indices[0]} ... L_{indices[-1]}`` applied to the highest-weight vector."""

    indices: tuple
    scalar: DeltaCPoly = field(default_factory=lambda: DeltaCPoly.constant(1))

    def value(self) -> DeltaCPoly:
        return self.scalar * reduce_word(self.indices)


@lru_cache(maxsize=None)
def _reduce(word: tuple) -> DeltaCPoly:
    if not word:
        return _ONE
    if sum(word) != 0:
        # positive total annihilates |Delta>, negative total is killed by <Delta|
        return DeltaCPoly()
    if word[-1] > 0 or word[0] < 0:
        return DeltaCPoly()
    if word[-1] == 0:
        return _DELTA * _reduce(word[:-1])
    if word[0] == 0:
        return _DELTA * _reduce(word[1:])
    # rightmost positive mode, followed by a non-positive one
    j = max(i for i, t in enumerate(word) if t > 0)
    a, b = word[j], word[j + 1]
    head, tail = word[:j], word[j + 2 :]
    result = _reduce(head + (b, a) + tail)
    if a != b:
        result = result + _reduce(head + (a + b,) + tail) * (a - b)
    if a == -b:
        result = result + _reduce(head + tail) * _C_OVER_12 * (a**3 - a)
    return result


def reduce_word(word) -> DeltaCPoly:
    """Exact ``<Delta| L_{t_1} ... L_{t_k} |Delta>`` as a polynomial in (Delta, c).

    Accepts a tuple of integers or a :class:`VirasoroWord`.
    """
    if isinstance(word, VirasoroWord):
        return word.value()
    return _reduce(tuple(int(t) for t in word))


def shapovalov_word(nu: YoungDiagram, nu_prime: YoungDiagram) -> tuple:
    """Word for ``L_{nu} L_{-nu'}`` = ``L_{nu_1} ... L_{nu_k} L_{-nu'_l} ... L_{-nu'_1}``."""
    return tuple(nu.parts) + tuple(-p for p in reversed(nu_prime.parts))


@dataclass(frozen=True)
class ShapovalovMatrix:
    """Level-N Gram matrix of descendants with exact polynomial entries."""

    level: int
    diagrams: tuple
    entries: tuple  # tuple of tuples of DeltaCPoly

    @property
    def size(self) -> int:
        return len(self.diagrams)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def is_symmetric(self) -> bool:
        n = self.size
        return all(self.entries[i][j] == self.entries[j][i] for i in range(n) for j in range(i))

    @property
    def _coefficients(self) -> np.ndarray:
        coeffs = getattr(self, "_coeff_cache", None)
        if coeffs is None:
            n = self.size
            dd = max((e.degree_delta for row in self.entries for e in row), default=0) + 1
            dc = max((e.degree_c for row in self.entries for e in row), default=0) + 1
            dd, dc = max(dd, 1), max(dc, 1)
            coeffs = np.zeros((n, n, dd, dc))
            for i in range(n):
                for j in range(n):
                    coeffs[i, j] = self.entries[i][j].coefficient_array((dd, dc))
            object.__setattr__(self, "_coeff_cache", coeffs)
        return coeffs

    def evaluate(self, delta, c) -> np.ndarray:
        """Numeric matrix at ``(delta, c)`` (float or complex)."""
        coeffs = self._coefficients
        dp = np.asarray(delta) ** np.arange(coeffs.shape[2])
        cp = np.asarray(c) ** np.arange(coeffs.shape[3])
        return np.einsum("ijpq,p,q->ij", coeffs, dp, cp)

    def evaluate_exact(self, delta, c) -> list:
        """Matrix of Fractions at rational ``(delta, c)``."""
        delta, c = Fraction(delta), Fraction(c)
        return [[e(delta, c) for e in row] for row in self.entries]

    def to_json(self) -> dict:
        labels = [str(d) for d in self.diagrams]
        return {
            "level": self.level,
            "variables": ["Delta", "c"],
            "rows": labels,
            "columns": labels,
            "entries": [[e.to_json() for e in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ShapovalovMatrix":
        diagrams = tuple(YoungDiagram.parse(s) for s in data["rows"])
        entries = tuple(tuple(DeltaCPoly.from_json(e) for e in row) for row in data["entries"])
        return cls(int(data["level"]), diagrams, entries)


@lru_cache(maxsize=None)
def shapovalov_matrix(N: int) -> ShapovalovMatrix:
    """Exact Shapovalov matrix at level ``N``, indexed by :func:`young_diagrams`."""
    if N < 0:
        raise ValueError("level must be non-negative")
    diagrams = young_diagrams(N)
    n = len(diagrams)
    rows = [[None] * n for _ in range(n)]
    for i, nu in enumerate(diagrams):
        for j in range(i, n):
            rows[i][j] = reduce_word(shapovalov_word(nu, diagrams[j]))
            rows[j][i] = rows[i][j] if i == j else reduce_word(shapovalov_word(diagrams[j], nu))
    return ShapovalovMatrix(N, diagrams, tuple(tuple(r) for r in rows))


# ---------------------------------------------------------------------------
# Kac determinant
# ---------------------------------------------------------------------------


def exact_determinant(matrix) -> Fraction:
    """Determinant of a square matrix of Fractions by Gaussian elimination."""
    a = [[Fraction(x) for x in row] for row in matrix]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f:
                row_r, row_c = a[r], a[col]
                for k in range(col, n):
                    row_r[k] -= f * row_c[k]
    return det


def kac_zeros(N: int, gamma):
    """``[(r, s, Delta_{r,s}), ...]`` for ``r s <= N``; exact when ``gamma`` is a Fraction."""
    if isinstance(gamma, Fraction):
        b = gamma / 2
        Q = b + 1 / b
        quarter = Fraction(1, 4)
    else:
        b = gamma / 2.0
        Q = b + 1.0 / b
        quarter = 0.25
    out = []
    for r in range(1, N + 1):
        for s in range(1, N // r + 1):
            shift = r * b + s / b
            out.append((r, s, quarter * (Q * Q - shift * shift)))
    return out


def kac_degree(N: int) -> int:
    """Sum of ``p(N - r s)`` over ``r s <= N``: the Delta-degree of the Kac determinant."""
    return sum(partition_count(N - r * s) for r in range(1, N + 1) for s in range(1, N // r + 1))


def det_polynomial(N: int, c) -> list:
    """Exact coefficients (low to high) of ``det F_N`` as a polynomial in Delta at fixed rational ``c``."""
    mat = shapovalov_matrix(N)
    c = Fraction(c)
    bound = sum(len(nu.parts) for nu in mat.diagrams)
    xs = list(range(bound + 1))
    ys = [exact_determinant(mat.evaluate_exact(x, c)) for x in xs]
    # Newton divided differences, then expand to the monomial basis
    coef = list(ys)
    for k in range(1, len(xs)):
        for i in range(len(xs) - 1, k - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - k])
    poly = [Fraction(0)] * len(xs)
    for k in range(len(xs) - 1, -1, -1):
        # poly = poly * (x - xs[k]) + coef[k]
        shifted = [Fraction(0)] + poly[:-1]
        poly = [shifted[i] - xs[k] * poly[i] for i in range(len(poly))]
        poly[0] += coef[k]
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


@dataclass
class KacReport:
    level: int
    gamma: float
    tolerance: float
    # (r, s, Delta_rs, |det| exact at rational gamma, normalised |det| in binary64)
    zeros: list
    kappa: Fraction
    factorization_residual: Fraction
    passed: bool

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "gamma": self.gamma,
            "tolerance": self.tolerance,
            "zeros": [
                {"r": r, "s": s, "delta": float(d), "det_exact": float(e), "det_float_normalised": f}
                for r, s, d, e, f in self.zeros
            ],
            "kappa": str(self.kappa),
            "factorization_residual": str(self.factorization_residual),
            "passed": self.passed,
        }


def _normalised_float_det(mat: np.ndarray) -> float:
    # Hadamard ratio |det| / prod ||row||: scale-free, bounded by 1
    norms = np.linalg.norm(mat, axis=1)
    sign, logdet = np.linalg.slogdet(mat)
    if sign == 0:
        return 0.0
    return float(np.exp(logdet - np.sum(np.log(norms))))


def kac_check(N: int, params, tolerance: float = 1e-9, n_samples: int = 3, seed: int = 0) -> KacReport:
    """Verify the Kac factorisation of ``det F_N`` at the coupling of ``params``.

    ``gamma`` is read as the decimal rational it prints as (0.7 -> 7/10), so
    the Kac zeros and the central charge are exact rationals and the
    determinant at each zero is computed in exact arithmetic.  The binary64
    determinant at the float zeros is reported as a Hadamard ratio.
    ``kappa_N`` is fitted at a generic weight and the factorisation is then
    checked at ``n_samples`` further random rational weights.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    gamma_q = Fraction(repr(float(params.gamma)))
    b = gamma_q / 2
    c_q = 1 + 6 * (b + 1 / b) ** 2
    mat = shapovalov_matrix(N)
    exact_zeros = kac_zeros(N, gamma_q)
    float_zeros = kac_zeros(N, float(params.gamma))
    c_f = float(params.cL)

    zeros = []
    ok = True
    for (r, s, d_q), (_, _, d_f) in zip(exact_zeros, float_zeros):
        det_q = abs(exact_determinant(mat.evaluate_exact(d_q, c_q)))
        det_f = _normalised_float_det(mat.evaluate(d_f, c_f))
        zeros.append((r, s, d_q, det_q, det_f))
        ok &= det_q < Fraction(1, 10**20) and det_f < tolerance

    def product(delta):
        out = Fraction(1)
        for r, s, d in exact_zeros:
            out *= (delta - d) ** partition_count(N - r * s)
        return out

    rng = random.Random(seed)
    generic = Fraction(rng.randint(1, 10**6), rng.randint(1, 10**3)) + Fraction(1, 7)
    kappa = exact_determinant(mat.evaluate_exact(generic, c_q)) / product(generic)
    residual = Fraction(0)
    for _ in range(n_samples):
        d = Fraction(rng.randint(-(10**6), 10**6), rng.randint(1, 10**3))
        det = exact_determinant(mat.evaluate_exact(d, c_q))
        residual = max(residual, abs(det - kappa * product(d)))
    ok &= residual == 0
    return KacReport(N, float(params.gamma), tolerance, zeros, kappa, residual, ok)


# ---------------------------------------------------------------------------
# numeric inversion on the spectrum line
# ---------------------------------------------------------------------------


def invert_shapovalov(N: int, deltaP: float, cL: float):
    """Inverse of the level-N Shapovalov matrix at real ``(deltaP, cL)``.

    Uses a Cholesky factorisation and returns ``(inverse, condition_number)``.
    Raises :class:`NotPositiveDefiniteError` if the matrix is not positive
    definite (off the spectrum line or too close to a Kac zero).
    """
    F = shapovalov_matrix(N).evaluate(float(deltaP), float(cL))
    try:
        factor = scipy.linalg.cho_factor(F, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            f"level-{N} Shapovalov matrix not positive definite at Delta={deltaP}, c={cL}"
        ) from exc
    inverse = scipy.linalg.cho_solve(factor, np.eye(F.shape[0]))
    return inverse, float(np.linalg.cond(F))
