"""Exact bivariate polynomials in (Delta, c) with rational coefficients."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

__all__ = ["DeltaCPoly"]


class DeltaCPoly:
    """Polynomial ``sum_{i,j} a_ij Delta^i c^j`` with :class:`~fractions.Fraction` coefficients.

    Instances are treated as immutable; arithmetic returns new objects.  The
    zero polynomial has an empty term map.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for key, coef in terms.items():
                coef = Fraction(coef)
                if coef:
                    clean[(int(key[0]), int(key[1]))] = coef
        self.terms = clean

    @classmethod
    def constant(cls, value) -> "DeltaCPoly":
        return cls({(0, 0): value})

    @classmethod
    def delta(cls) -> "DeltaCPoly":
        return cls({(1, 0): 1})

    @classmethod
    def central_charge(cls) -> "DeltaCPoly":
        return cls({(0, 1): 1})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, DeltaCPoly):
            other = DeltaCPoly.constant(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "DeltaCPoly(0)"
        parts = []
        for (i, j), a in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                s for s in (f"D^{i}" if i > 1 else "D" if i else "", f"c^{j}" if j > 1 else "c" if j else "") if s
            )
            parts.append(f"{a}*{mono}" if mono else str(a))
        return "DeltaCPoly(" + " + ".join(parts) + ")"

    def _coerce(self, other):
        return other if isinstance(other, DeltaCPoly) else DeltaCPoly.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return DeltaCPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return DeltaCPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, DeltaCPoly):
            other = Fraction(other)
            return DeltaCPoly({k: v * other for k, v in self.terms.items()})
        out = {}
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0) + a * b
        return DeltaCPoly(out)

    __rmul__ = __mul__

    @property
    def degree_delta(self) -> int:
        return max((i for i, _ in self.terms), default=-1)

    @property
    def degree_c(self) -> int:
        return max((j for _, j in self.terms), default=-1)

    def __call__(self, delta, c):
        """Evaluate at ``(delta, c)``; exact for Fraction/int arguments."""
        exact = isinstance(delta, (int, Fraction)) and isinstance(c, (int, Fraction))
        total = 0
        for (i, j), a in self.terms.items():
            total += (a if exact else float(a)) * delta**i * c**j
        return total

    def coefficient_array(self, shape) -> np.ndarray:
        arr = np.zeros(shape)
        for (i, j), a in self.terms.items():
            arr[i, j] = float(a)
        return arr

    def to_json(self) -> dict:
        return {f"{i},{j}": str(a) for (i, j), a in sorted(self.terms.items())}

    @classmethod
    def from_json(cls, data: dict) -> "DeltaCPoly":
        return cls({tuple(int(x) for x in k.split(",")): Fraction(v) for k, v in data.items()})
