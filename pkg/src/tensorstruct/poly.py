"""Small multivariate polynomials with exact differentiation.

Coefficients are floats keyed by exponent tuples.  This is the exact
derivative mode for chart fields: differentiation is closed-form, so
polynomial-mode oracles carry no finite-difference truncation error.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Poly"]


class Poly:
    """sum_e coeffs[e] * x^e with e an exponent tuple of fixed length."""

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim, coeffs=None):
        self.dim = int(dim)
        self.coeffs = {}
        if coeffs:
            for expo, c in coeffs.items():
                if c != 0.0:
                    self.coeffs[tuple(int(e) for e in expo)] = float(c)

    @classmethod
    def constant(cls, dim, value):
        return cls(dim, {(0,) * dim: float(value)})

    @classmethod
    def coordinate(cls, dim, index):
        expo = [0] * dim
        expo[index] = 1
        return cls(dim, {tuple(expo): 1.0})

    def __call__(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        total = 0.0
        for expo, c in self.coeffs.items():
            term = c
            for xi, e in zip(x, expo):
                if e:
                    term *= xi ** e
            total += term
        return total

    def _binary(self, other, sign):
        if not isinstance(other, Poly):
            other = Poly.constant(self.dim, other)
        out = dict(self.coeffs)
        for expo, c in other.coeffs.items():
            out[expo] = out.get(expo, 0.0) + sign * c
        return Poly(self.dim, out)

    def __add__(self, other):
        return self._binary(other, 1.0)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, -1.0)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Poly(self.dim, {e: -c for e, c in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(self.dim, {e: c * float(other) for e, c in self.coeffs.items()})
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                expo = tuple(a + b for a, b in zip(e1, e2))
                out[expo] = out.get(expo, 0.0) + c1 * c2
        return Poly(self.dim, out)

    __rmul__ = __mul__

    def diff(self, index):
        out = {}
        for expo, c in self.coeffs.items():
            e = expo[index]
            if e:
                new = list(expo)
                new[index] = e - 1
                key = tuple(new)
                out[key] = out.get(key, 0.0) + c * e
        return Poly(self.dim, out)

    def degree(self):
        return max((sum(e) for e in self.coeffs), default=0)

    def is_zero(self):
        return not self.coeffs

    def __repr__(self):
        return f"Poly(dim={self.dim}, terms={len(self.coeffs)})"
