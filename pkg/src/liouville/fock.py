"""Free-field (Fock space) realisation of two commuting Virasoro algebras.

States are polynomials in the real Gaussian coordinates ``x_n, y_n`` with
complex coefficients.  The complex modes are ``phi_n = (x_n + i y_n)/(2 sqrt n)``
and ``phi_{-n} = conj(phi_n)``; the Heisenberg operators are

    A_n  = (i/2) d/dphi_n,        A_{-n}  = (i/2)(d/dphi_{-n} - 2n phi_n)
    At_n = (i/2) d/dphi_{-n},     At_{-n} = (i/2)(d/dphi_n - 2n phi_{-n})

for ``n > 0``, and ``L_n^alpha`` is the Segal-Sugawara combination with the
zero mode replaced by its eigenvalue on ``exp((alpha - Q) c)``.  Inner
products are Gaussian expectations computed from exact moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import hermite_e

from .partitions import YoungDiagram, young_diagrams
from .virasoro import shapovalov_matrix

__all__ = [
    "FockPolynomial",
    "HermiteState",
    "apply_A",
    "apply_At",
    "apply_L",
    "apply_Lt",
    "descendant_poly",
    "fock_inner",
    "gram_matrix",
    "apply_number_operator",
    "descendant_pairs",
    "oracle_residual",
]



def _strip(key: tuple) -> tuple:
    end = len(key)
    while end and key[end - 1] == 0:
        end -= 1
    return key[:end]


def _bump(key: tuple, idx: int, delta: int) -> tuple:
    if idx >= len(key):
        key = key + (0,) * (idx - len(key) + 1)
    out = list(key)
    out[idx] += delta
    return _strip(tuple(out))


class FockPolynomial:
    """Finite polynomial in ``x_1, y_1, x_2, y_2, ...`` with complex coefficients.

    ``terms`` maps exponent tuples ``(e_x1, e_y1, e_x2, e_y2, ...)`` (trailing
    zeros stripped) to coefficients.  The zero polynomial has no terms.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for k, v in terms.items():
                if v != 0:
                    k = _strip(tuple(k))
                    clean[k] = clean.get(k, 0) + complex(v)
        self.terms = {k: v for k, v in clean.items() if v != 0}

    @classmethod
    def one(cls) -> "FockPolynomial":
        return cls({(): 1.0})

    @classmethod
    def x(cls, n: int) -> "FockPolynomial":
        return cls({_bump((), 2 * (n - 1), 1): 1.0})

    @classmethod
    def y(cls, n: int) -> "FockPolynomial":
        return cls({_bump((), 2 * (n - 1) + 1, 1): 1.0})

    @classmethod
    def phi(cls, n: int) -> "FockPolynomial":
        """Complex mode ``phi_n`` (``n > 0``) or ``phi_{-|n|} = conj(phi_|n|)`` (``n < 0``)."""
        m = abs(n)
        s = 1.0 / (2.0 * math.sqrt(m))
        sign = 1.0 if n > 0 else -1.0
        return cls({_bump((), 2 * (m - 1), 1): s, _bump((), 2 * (m - 1) + 1, 1): sign * 1j * s})

    @property
    def n_max(self) -> int:
        return max(((len(k) + 1) // 2 for k in self.terms), default=0)

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"FockPolynomial({self.terms!r})"

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return FockPolynomial(out)

    def __sub__(self, other):
        return self + other * -1

    def __neg__(self):
        return self * -1

    def __mul__(self, other):
        if isinstance(other, FockPolynomial):
            out = {}
            for k1, a in self.terms.items():
                for k2, b in other.terms.items():
                    n = max(len(k1), len(k2))
                    k = tuple(
                        (k1[i] if i < len(k1) else 0) + (k2[i] if i < len(k2) else 0) for i in range(n)
                    )
                    out[k] = out.get(k, 0) + a * b
            return FockPolynomial(out)
        other = complex(other)
        return FockPolynomial({k: v * other for k, v in self.terms.items()})

    __rmul__ = __mul__

    def conj(self) -> "FockPolynomial":
        return FockPolynomial({k: v.conjugate() for k, v in self.terms.items()})

    def allclose(self, other, atol: float = 1e-10) -> bool:
        diff = self - other
        scale = max([1.0] + [abs(v) for v in self.terms.values()] + [abs(v) for v in other.terms.values()])
        return all(abs(v) <= atol * scale for v in diff.terms.values())

    # -- elementary operations on one real coordinate -----------------------------

    def _d(self, idx: int) -> "FockPolynomial":
        out = {}
        for k, v in self.terms.items():
            e = k[idx] if idx < len(k) else 0
            if e:
                nk = _bump(k, idx, -1)
                out[nk] = out.get(nk, 0) + v * e
        return FockPolynomial(out)

    def _times(self, idx: int) -> "FockPolynomial":
        out = {}
        for k, v in self.terms.items():
            nk = _bump(k, idx, 1)
            out[nk] = out.get(nk, 0) + v
        return FockPolynomial(out)

    def d_phi(self, n: int) -> "FockPolynomial":
        """``d/dphi_n = sqrt(n)(d_x - i d_y)`` for ``n > 0``; ``d/dphi_{-n} = sqrt(n)(d_x + i d_y)``."""
        m = abs(n)
        ix, iy = 2 * (m - 1), 2 * (m - 1) + 1
        sign = -1.0 if n > 0 else 1.0
        return (self._d(ix) + self._d(iy) * (sign * 1j)) * math.sqrt(m)

    def times_phi(self, n: int) -> "FockPolynomial":
        m = abs(n)
        ix, iy = 2 * (m - 1), 2 * (m - 1) + 1
        sign = 1.0 if n > 0 else -1.0
        return (self._times(ix) + self._times(iy) * (sign * 1j)) * (1.0 / (2.0 * math.sqrt(m)))

    def evaluate(self, x, y) -> complex:
        """Evaluate at real coordinates ``x = (x_1, ...)``, ``y = (y_1, ...)``."""
        total = 0j
        for k, v in self.terms.items():
            term = v
            for i, e in enumerate(k):
                if e:
                    term *= (x[i // 2] if i % 2 == 0 else y[i // 2]) ** e
            total += term
        return total


# ---------------------------------------------------------------------------
# Heisenberg and Virasoro operators
# ---------------------------------------------------------------------------


def apply_A(n: int, state: FockPolynomial) -> FockPolynomial:
    """Heisenberg mode ``A_n`` (``n != 0``)."""
    if n == 0:
        raise ValueError("A_0 acts on the zero-mode direction; use apply_L with alpha")
    if n > 0:
        return state.d_phi(n) * 0.5j
    m = -n
    return (state.d_phi(-m) - state.times_phi(m) * (2 * m)) * 0.5j


def apply_At(n: int, state: FockPolynomial) -> FockPolynomial:
    """Mode ``A~_n`` of the second (antiholomorphic) family: ``phi_n <-> phi_{-n}`` swapped."""
    if n == 0:
        raise ValueError("A~_0 acts on the zero-mode direction; use apply_Lt with alpha")
    if n > 0:
        return state.d_phi(-n) * 0.5j
    m = -n
    return (state.d_phi(m) - state.times_phi(-m) * (2 * m)) * 0.5j


def _apply_L_generic(n: int, alpha: complex, Q: float, state: FockPolynomial, A) -> FockPolynomial:
    if not state:
        return FockPolynomial()
    K = state.n_max
    if n == 0:
        out = state * (alpha / 2.0 * (Q - alpha / 2.0))
        for m in range(1, K + 1):
            inner = A(m, state)
            if inner:
                out = out + A(-m, inner) * 2.0
        return out
    out = A(n, state) * (1j * (alpha - Q - n * Q))
    # A_m with m > K annihilates; A_{n-m} with n - m > K after creating mode |m| is zero too
    for m in range(n - K, K + 1):
        if m == 0 or m == n:
            continue
        inner = A(m, state)
        if inner:
            out = out + A(n - m, inner)
    return out


def apply_L(n: int, alpha, state: FockPolynomial, Q: float) -> FockPolynomial:
    """Virasoro generator ``L_n^{0,alpha}`` acting on a Fock polynomial."""
    return _apply_L_generic(int(n), complex(alpha), float(Q), state, apply_A)


def apply_Lt(n: int, alpha, state: FockPolynomial, Q: float) -> FockPolynomial:
    """Second commuting family ``L~_n^{0,alpha}``."""
    return _apply_L_generic(int(n), complex(alpha), float(Q), state, apply_At)


def descendant_poly(alpha, nu: YoungDiagram, nutilde: YoungDiagram, Q: float) -> FockPolynomial:
    """``L_{-nu} L~_{-nutilde} 1`` with ``L_{-nu} = L_{-nu_k} ... L_{-nu_1}``."""
    state = FockPolynomial.one()
    for p in nutilde.parts:
        state = apply_Lt(-p, alpha, state, Q)
    for p in nu.parts:
        state = apply_L(-p, alpha, state, Q)
    return state


# ---------------------------------------------------------------------------
# Gaussian inner product
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _moment(k: int) -> int:
    """``E[x^k]`` for a standard normal: ``(k-1)!!`` for even ``k``."""
    if k % 2:
        return 0
    return math.prod(range(k - 1, 0, -2)) if k else 1


def _pair_moment(k1: tuple, k2: tuple) -> int:
    n = max(len(k1), len(k2))
    out = 1
    for i in range(n):
        e = (k1[i] if i < len(k1) else 0) + (k2[i] if i < len(k2) else 0)
        if e % 2:
            return 0
        out *= _moment(e)
    return out


def fock_inner(a: FockPolynomial, b: FockPolynomial) -> complex:
    """``E[a * conj(b)]`` under i.i.d. standard Gaussians; conjugate-linear in ``b``."""
    total = 0j
    for k1, v1 in a.terms.items():
        for k2, v2 in b.terms.items():
            m = _pair_moment(k1, k2)
            if m:
                total += v1 * v2.conjugate() * m
    return total


@lru_cache(maxsize=None)
def _monomial_in_hermite(k: int) -> tuple:
    """``x^k = sum_j c_j He_j(x) / sqrt(j!)``; all ``c_j`` are non-negative."""
    coeffs = hermite_e.poly2herme([0] * k + [1])
    return tuple((j, float(c) * math.sqrt(math.factorial(j))) for j, c in enumerate(coeffs) if c)


def _hermite_expansion(key: tuple) -> dict:
    out = {(): 1.0}
    for i, k in enumerate(key):
        nxt = {}
        for head, c in out.items():
            for j, cj in _monomial_in_hermite(k):
                nxt[head + (j,)] = c * cj
        out = nxt
    return out


def _hermite_rows(left, right):
    """Coefficient rows of both lists in a shared orthonormal Hermite basis."""
    polys = list(left) + list(right)
    width = max((len(k) for p in polys for k in p.terms), default=0)
    expansions = {}
    index = {}
    for p in polys:
        for k in p.terms:
            if k not in expansions:
                expansions[k] = _hermite_expansion(k + (0,) * (width - len(k)))
                for h in expansions[k]:
                    index.setdefault(h, len(index))

    def as_matrix(ps):
        mat = np.zeros((len(ps), len(index)), dtype=complex)
        for r, p in enumerate(ps):
            for k, v in p.terms.items():
                for h, c in expansions[k].items():
                    mat[r, index[h]] += v * c
        return mat

    return as_matrix(left), as_matrix(right)


def gram_matrix(left, right) -> np.ndarray:
    """Matrix ``G[i, j] = fock_inner(left[i], right[j])``.

    Both sides are expanded in the orthonormal Hermite basis, where the
    Gaussian inner product is a plain dot product; this avoids the
    cancellation of a monomial moment matrix at high degree.
    """
    a, b = _hermite_rows(left, right)
    return a @ b.conj().T


# ---------------------------------------------------------------------------
# number operator and Hermite basis
# ---------------------------------------------------------------------------


def apply_number_operator(state: FockPolynomial) -> FockPolynomial:
    """``P = sum_n n (X_n^* X_n + Y_n^* Y_n)`` with ``X^* X = -d_x^2 + x d_x``."""
    out = FockPolynomial()
    for idx in range(2 * state.n_max):
        n = idx // 2 + 1
        first = state._d(idx)
        if not first:
            continue
        out = out + (first._times(idx) - first._d(idx)) * n
    return out


@dataclass(frozen=True)
class HermiteState:
    """Normalised ``psi_{kl} = prod_n He_{k_n}(x_n) He_{l_n}(y_n) / sqrt(prod k_n! l_n!)``."""

    k: tuple
    l: tuple

    @property
    def eigenvalue(self) -> int:
        """``|k| + |l|`` with ``|k| = sum_n n k_n``."""
        return sum((n + 1) * e for n, e in enumerate(self.k)) + sum((n + 1) * e for n, e in enumerate(self.l))

    @property
    def polynomial(self) -> FockPolynomial:
        state = FockPolynomial.one()
        norm = 1.0
        for i in range(max(len(self.k), len(self.l))):
            for deg, idx in ((self.k[i] if i < len(self.k) else 0, 2 * i), (self.l[i] if i < len(self.l) else 0, 2 * i + 1)):
                if not deg:
                    continue
                coeffs = hermite_e.herme2poly([0] * deg + [1])
                factor = FockPolynomial({_bump((), idx, p): c for p, c in enumerate(coeffs) if c})
                state = state * factor
                norm *= math.factorial(deg)
        return state * (1.0 / math.sqrt(norm))


# ---------------------------------------------------------------------------
# comparison with the abstract Shapovalov form
# ---------------------------------------------------------------------------


def descendant_pairs(max_level: int) -> list:
    """All ``(nu, nutilde)`` with ``|nu| + |nutilde| <= max_level``."""
    out = []
    for total in range(max_level + 1):
        for a in range(total + 1):
            for nu in young_diagrams(a):
                for nut in young_diagrams(total - a):
                    out.append((nu, nut))
    return out


def oracle_residual(alpha, max_level: int, Q: float) -> float:
    """Largest mismatch between the Fock Gram matrix and ``F(nu, nu') F(nut, nut')``.

    The Fock side pairs ``L_{-nu} L~_{-nut} 1`` at ``alpha`` with the same
    descendants at ``2Q - conj(alpha)``.  Each entry's error is measured
    against its Cauchy-Schwarz scale ``||left_i|| ||right_j||``, the size
    rounding can reach in floating point (entries that vanish exactly are
    otherwise dominated by cancellation noise).
    """
    alpha = complex(alpha)
    dual = 2 * Q - alpha.conjugate()
    pairs = descendant_pairs(max_level)
    a, b = _hermite_rows(
        [descendant_poly(alpha, nu, nut, Q) for nu, nut in pairs],
        [descendant_poly(dual, nu, nut, Q) for nu, nut in pairs],
    )
    gram = a @ b.conj().T
    scale = np.outer(np.linalg.norm(a, axis=1), np.linalg.norm(b, axis=1))
    delta = alpha / 2 * (Q - alpha / 2)
    c = 1 + 6 * Q * Q
    blocks = {0: (np.ones((1, 1)), {young_diagrams(0)[0]: 0})}
    for n in range(1, max_level + 1):
        blocks[n] = (shapovalov_matrix(n).evaluate(delta, c), {d: i for i, d in enumerate(young_diagrams(n))})
    target = np.zeros(gram.shape, dtype=complex)
    for i, (nu, nut) in enumerate(pairs):
        for j, (nu2, nut2) in enumerate(pairs):
            if nu.length == nu2.length and nut.length == nut2.length:
                F1, idx1 = blocks[nu.length]
                F2, idx2 = blocks[nut.length]
                target[i, j] = F1[idx1[nu], idx1[nu2]] * F2[idx2[nut], idx2[nut2]]
    return float(np.max(np.abs(gram - target) / scale))
