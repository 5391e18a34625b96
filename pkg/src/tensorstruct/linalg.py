"""Dense real linear-algebra kernel with an explicit tolerance policy.

Everything downstream funnels its numerics through here: symmetric square
roots, adjoints with respect to a metric, and rank/kernel decisions.  All
operations are pure; matrices are plain ``numpy`` arrays of floats and are
never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NotPositiveDefinite,
    NotSymmetric,
)

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "as_matrix",
    "fro",
    "spd_sqrt",
    "metric_adjoint",
    "kernel_and_image",
    "rank_of",
    "signature_of",
]


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance pair used by every validating operation.

    The rank threshold for a matrix with largest singular value ``smax`` is
    ``atol + rtol * smax``; residual checks accept ``r <= rtol * scale + atol``.
    """

    atol: float = 1e-9
    rtol: float = 1e-9

    def __post_init__(self):
        if self.atol < 0 or self.rtol < 0:
            raise ValueError("tolerances must be nonnegative")
        if self.atol == 0 and self.rtol == 0:
            raise ValueError("atol and rtol cannot both be zero")

    def accepts(self, residual, scale=1.0):
        return residual <= self.rtol * scale + self.atol

    def rank_threshold(self, smax):
        return self.atol + self.rtol * smax


DEFAULT_TOL = Tolerance()


def as_matrix(m, square=False, name="matrix"):
    """Coerce to a float ndarray and enforce finiteness (no NaN/Inf)."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-dimensional, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def fro(a):
    """Frobenius norm."""
    return float(np.linalg.norm(a))


def spd_sqrt(m, tol: Tolerance = DEFAULT_TOL):
    """Symmetric positive-definite square root via eigendecomposition.

    Parameters
    ----------
    m : array_like
        Symmetric positive definite matrix.
    tol : Tolerance
        Symmetry is accepted when ``|m - m.T| <= rtol*|m| + atol``; positive
        definiteness requires every eigenvalue above ``atol``.

    Returns
    -------
    ndarray
        Symmetric R with ``R @ R == m`` within ``rtol*|m| + atol``.

    Raises
    ------
    NotSymmetric, NotPositiveDefinite
    """
    m = as_matrix(m, square=True)
    asym = fro(m - m.T)
    if not tol.accepts(asym, fro(m)):
        raise NotSymmetric(f"asymmetry {asym:.3e} exceeds tolerance")
    w, q = np.linalg.eigh(0.5 * (m + m.T))
    if w.min(initial=np.inf) <= tol.atol:
        raise NotPositiveDefinite(f"smallest eigenvalue {w.min():.3e} <= atol")
    r = (q * np.sqrt(w)) @ q.T
    return 0.5 * (r + r.T)


def metric_adjoint(a, g):
    """Adjoint of ``a`` with respect to the inner product ``g``.

    Returns ``A* = g^{-1} a^T g`` so that ``g(A*u, v) = g(u, Av)`` for all
    u, v.  ``g`` must be symmetric positive definite; this is not re-checked
    here beyond shape (callers validate once and reuse).
    """
    a = as_matrix(a, square=True, name="a")
    g = as_matrix(g, square=True, name="g")
    if a.shape != g.shape:
        raise DimensionMismatch(f"operator {a.shape} vs metric {g.shape}")
    return np.linalg.solve(g, a.T @ g)


def kernel_and_image(a, tol: Tolerance = DEFAULT_TOL):
    """Orthonormal kernel and image bases plus the numerical rank.

    Singular values below ``atol + rtol * smax`` are treated as zero.

    Returns
    -------
    (kernel, image, rank)
        ``kernel`` has shape (cols, cols - rank), ``image`` has shape
        (rows, rank); both have orthonormal columns.
    """
    a = as_matrix(a)
    u, s, vt = np.linalg.svd(a)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol.rank_threshold(smax)))
    kernel = vt[rank:].T
    image = u[:, :rank]
    return kernel, image, rank


def rank_of(a, tol: Tolerance = DEFAULT_TOL):
    return kernel_and_image(a, tol)[2]


def signature_of(g, tol: Tolerance = DEFAULT_TOL):
    """Eigenvalue sign counts (n_plus, n_minus, n_zero) of a symmetric matrix.

    Eigenvalues within ``atol + rtol*max|eig|`` of zero count as zero.
    """
    g = as_matrix(g, square=True)
    w = np.linalg.eigvalsh(0.5 * (g + g.T))
    cut = tol.rank_threshold(np.abs(w).max(initial=0.0))
    n_plus = int(np.sum(w > cut))
    n_minus = int(np.sum(w < -cut))
    return n_plus, n_minus, g.shape[0] - n_plus - n_minus
