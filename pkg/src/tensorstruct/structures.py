"""Linear structures on R^n: validators and canonical normal forms.

Covers symplectic/Darboux forms, Krein and neutral inner products, tangent,
cotangent, complex and para-complex structures.  One convention is fixed
throughout the package and is normative:

    B(u, v) = u^T S v,

so the flat map of B sends u to the covector with coordinate column S^T u.
For a symmetric metric G this makes the flat map's matrix G itself, and for
a skew form S it is -S.

Canonical matrices on R^(2k):

    complex      [[0, -I], [I, 0]]
    para-complex [[0,  I], [I, 0]]
    tangent      [[0,  I], [0, 0]]
    symplectic   [[0,  I], [-I, 0]]

Validation never raises on bad structure data: every invariant becomes a
report entry with its measured residual, so the CLI can surface degenerate
inputs instead of crashing on them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    Degenerate,
    DimensionMismatch,
    InvalidDecomposition,
    InvalidStructure,
    MissingDecomposition,
)
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, fro, kernel_and_image, signature_of
from .report import Report

__all__ = [
    "BilinearForm",
    "SymplecticForm",
    "KreinMetric",
    "ComplexStructure",
    "ParaComplexStructure",
    "TangentStructure",
    "CotangentStructure",
    "complex_canonical",
    "para_complex_canonical",
    "tangent_canonical",
    "symplectic_canonical",
    "krein_from_matrix",
    "validate",
    "fundamental_symmetry",
    "krein_isomorphism",
    "tangent_normal_form",
    "complex_normal_form",
    "para_from_complex",
    "darboux_basis",
]


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BilinearForm:
    """A bilinear form B(u,v) = u^T S v with a declared symmetry tag."""

    matrix: np.ndarray
    symmetry: str  # "symmetric" | "skew"

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix, square=True))
        if self.symmetry not in ("symmetric", "skew"):
            raise ValueError(f"unknown symmetry tag {self.symmetry!r}")

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __call__(self, u, v):
        return float(np.asarray(u) @ self.matrix @ np.asarray(v))


@dataclass(frozen=True)
class SymplecticForm:
    """A skew form expected to be nondegenerate (checked by ``validate``)."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix, square=True))

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def form(self):
        return BilinearForm(self.matrix, "skew")

    def __call__(self, u, v):
        return float(np.asarray(u) @ self.matrix @ np.asarray(v))


@dataclass(frozen=True)
class KreinMetric:
    """Symmetric form with a splitting into positive and negative subspaces.

    ``plus_basis`` / ``minus_basis`` hold basis vectors as columns.  The two
    subspaces must be g-orthogonal and span the whole space; the metric is
    positive definite on the first and negative definite on the second.
    """

    matrix: np.ndarray
    plus_basis: np.ndarray
    minus_basis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix, square=True))
        n = self.matrix.shape[0]
        plus = np.asarray(self.plus_basis, dtype=float).reshape(n, -1)
        minus = np.asarray(self.minus_basis, dtype=float).reshape(n, -1)
        object.__setattr__(self, "plus_basis", plus)
        object.__setattr__(self, "minus_basis", minus)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def signature(self):
        return self.plus_basis.shape[1], self.minus_basis.shape[1]

    @property
    def is_neutral(self):
        return self.plus_basis.shape[1] == self.minus_basis.shape[1]

    @property
    def form(self):
        return BilinearForm(self.matrix, "symmetric")


@dataclass(frozen=True)
class ComplexStructure:
    """Endomorphism squaring to -Id, optionally with a decomposition.

    A decomposition is a triple ``(basis1, basis2, iso)``: two complementary
    isomorphic subspaces (bases as columns) and the iso mapping
    basis2-coordinates to basis1-coordinates, in which the structure takes
    the block form [[0, -iso], [iso^-1, 0]].
    """

    matrix: np.ndarray
    decomposition: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix, square=True))
        if self.decomposition is not None:
            b1, b2, iso = self.decomposition
            n = self.matrix.shape[0]
            b1 = np.asarray(b1, dtype=float).reshape(n, -1)
            b2 = np.asarray(b2, dtype=float).reshape(n, -1)
            iso = as_matrix(iso, square=True, name="iso")
            object.__setattr__(self, "decomposition", (b1, b2, iso))

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class ParaComplexStructure:
    """Endomorphism squaring to +Id with balanced +1/-1 eigenspaces."""

    matrix: np.ndarray
    eigen_plus: np.ndarray
    eigen_minus: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix, square=True))
        n = self.matrix.shape[0]
        object.__setattr__(self, "eigen_plus",
                           np.asarray(self.eigen_plus, dtype=float).reshape(n, -1))
        object.__setattr__(self, "eigen_minus",
                           np.asarray(self.eigen_minus, dtype=float).reshape(n, -1))

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class TangentStructure:
    """Nilpotent endomorphism J with im J = ker J."""

    matrix: np.ndarray
    kernel_basis: np.ndarray
    complement_basis: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix, square=True))
        n = self.matrix.shape[0]
        object.__setattr__(self, "kernel_basis",
                           np.asarray(self.kernel_basis, dtype=float).reshape(n, -1))
        object.__setattr__(self, "complement_basis",
                           np.asarray(self.complement_basis, dtype=float).reshape(n, -1))

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class CotangentStructure:
    """Symplectic form together with a maximal isotropic (Lagrangian) space."""

    symplectic: SymplecticForm
    lagrangian_basis: np.ndarray
    complement_basis: np.ndarray

    def __post_init__(self):
        n = self.symplectic.dim
        object.__setattr__(self, "lagrangian_basis",
                           np.asarray(self.lagrangian_basis, dtype=float).reshape(n, -1))
        object.__setattr__(self, "complement_basis",
                           np.asarray(self.complement_basis, dtype=float).reshape(n, -1))

    @property
    def dim(self):
        return self.symplectic.dim


# ---------------------------------------------------------------------------
# canonical models
# ---------------------------------------------------------------------------

def _half(dim):
    if dim % 2:
        raise DimensionMismatch(f"dimension must be even, got {dim}")
    return dim // 2


def complex_canonical(dim) -> ComplexStructure:
    """[[0, -I], [I, 0]] with the coordinate decomposition attached."""
    k = _half(dim)
    m = np.zeros((dim, dim))
    m[:k, k:] = -np.eye(k)
    m[k:, :k] = np.eye(k)
    b1 = np.eye(dim)[:, :k]
    b2 = np.eye(dim)[:, k:]
    return ComplexStructure(m, (b1, b2, np.eye(k)))


def para_complex_canonical(dim) -> ParaComplexStructure:
    """[[0, I], [I, 0]]; eigenvectors are (e_i +- e_{k+i})/sqrt(2)."""
    k = _half(dim)
    m = np.zeros((dim, dim))
    m[:k, k:] = np.eye(k)
    m[k:, :k] = np.eye(k)
    eye = np.eye(dim)
    plus = (eye[:, :k] + eye[:, k:]) / np.sqrt(2.0)
    minus = (eye[:, :k] - eye[:, k:]) / np.sqrt(2.0)
    return ParaComplexStructure(m, plus, minus)


def tangent_canonical(dim) -> TangentStructure:
    """[[0, I], [0, 0]]."""
    k = _half(dim)
    m = np.zeros((dim, dim))
    m[:k, k:] = np.eye(k)
    eye = np.eye(dim)
    return TangentStructure(m, eye[:, :k], eye[:, k:])


def symplectic_canonical(dim) -> SymplecticForm:
    """[[0, I], [-I, 0]]."""
    k = _half(dim)
    m = np.zeros((dim, dim))
    m[:k, k:] = np.eye(k)
    m[k:, :k] = -np.eye(k)
    return SymplecticForm(m)


def krein_from_matrix(g, tol: Tolerance = DEFAULT_TOL) -> KreinMetric:
    """Build a KreinMetric from a symmetric nondegenerate matrix.

    The splitting comes from the eigendecomposition: eigenvectors with
    positive (negative) eigenvalues span the positive (negative) part, which
    makes the two parts automatically g-orthogonal.  Eigenvalues within the
    rank threshold of zero mean the form is degenerate.
    """
    g = as_matrix(g, square=True)
    sym = 0.5 * (g + g.T)
    w, q = np.linalg.eigh(sym)
    cut = tol.rank_threshold(np.abs(w).max(initial=0.0))
    if np.any(np.abs(w) <= cut):
        raise Degenerate("symmetric form has (numerically) zero eigenvalues")
    # descending eigenvalues, so the positive block comes first and the
    # basis order is deterministic
    order = np.argsort(-w)
    w, q = w[order], q[:, order]
    plus = q[:, w > 0]
    minus = q[:, w < 0]
    return KreinMetric(g, plus, minus)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def _spans(columns, dim, tol):
    """Residual-style check that the column set spans R^dim."""
    if columns.shape[1] == 0:
        return dim == 0, 0.0
    s = np.linalg.svd(columns, compute_uv=False)
    rank = int(np.sum(s > tol.rank_threshold(s[0])))
    return rank == dim, float(s[-1]) if columns.shape[1] >= dim else 0.0


def _subspace_gap(a, b, tol=DEFAULT_TOL):
    """Distance between the column spaces of a and b (norm of projector gap)."""
    qa = np.linalg.qr(a)[0] if a.shape[1] else np.zeros_like(a)
    qb = np.linalg.qr(b)[0] if b.shape[1] else np.zeros_like(b)
    pa = qa @ qa.T
    pb = qb @ qb.T
    return fro(pa - pb)


def validate(structure, tol: Tolerance = DEFAULT_TOL) -> Report:
    """Check every defining invariant of a structure; residuals per entry."""
    report = Report()
    if isinstance(structure, BilinearForm):
        _validate_bilinear(structure, tol, report)
    elif isinstance(structure, SymplecticForm):
        _validate_symplectic(structure, tol, report)
    elif isinstance(structure, KreinMetric):
        _validate_krein(structure, tol, report)
    elif isinstance(structure, ComplexStructure):
        _validate_complex(structure, tol, report)
    elif isinstance(structure, ParaComplexStructure):
        _validate_para(structure, tol, report)
    elif isinstance(structure, TangentStructure):
        _validate_tangent(structure, tol, report)
    elif isinstance(structure, CotangentStructure):
        _validate_cotangent(structure, tol, report)
    else:
        raise TypeError(f"cannot validate {type(structure).__name__}")
    return report


def _validate_bilinear(b, tol, report):
    s = b.matrix
    scale = max(fro(s), 1.0)
    if b.symmetry == "symmetric":
        res = fro(s - s.T)
        report.add("symmetric", tol.accepts(res, scale), res)
    else:
        res = fro(s + s.T)
        report.add("skew", tol.accepts(res, scale), res)


def _validate_symplectic(o, tol, report):
    s = o.matrix
    scale = max(fro(s), 1.0)
    res = fro(s + s.T)
    report.add("skew", tol.accepts(res, scale), res)
    report.add("even_dimension", o.dim % 2 == 0, float(o.dim % 2))
    _, _, rank = kernel_and_image(s, tol)
    report.add("nondegenerate", rank == o.dim, float(o.dim - rank))


def _validate_krein(g, tol, report):
    s = g.matrix
    n = g.dim
    scale = max(fro(s), 1.0)
    res = fro(s - s.T)
    report.add("symmetric", tol.accepts(res, scale), res)

    spans, _ = _spans(np.hstack([g.plus_basis, g.minus_basis]), n, tol)
    p, q = g.signature
    report.add("bases_span", spans and p + q == n, float(n - p - q))

    if p:
        gp = g.plus_basis.T @ s @ g.plus_basis
        wmin = np.linalg.eigvalsh(0.5 * (gp + gp.T)).min()
        report.add("positive_on_plus", wmin > tol.atol, float(max(0.0, -wmin)))
    if q:
        gm = g.minus_basis.T @ s @ g.minus_basis
        wmax = np.linalg.eigvalsh(0.5 * (gm + gm.T)).max()
        report.add("negative_on_minus", wmax < -tol.atol, float(max(0.0, wmax)))
    if p and q:
        cross = fro(g.plus_basis.T @ s @ g.minus_basis)
        report.add("parts_orthogonal", tol.accepts(cross, scale), cross)
    report.note(f"signature ({p}, {q}); neutral: {g.is_neutral}")


def _validate_complex(c, tol, report):
    m = c.matrix
    n = c.dim
    scale = max(fro(m) ** 2, 1.0)
    res = fro(m @ m + np.eye(n))
    report.add("squares_to_minus_id", tol.accepts(res, scale), res)
    report.add("even_dimension", n % 2 == 0, float(n % 2))
    if c.decomposition is not None:
        b1, b2, iso = c.decomposition
        spans, _ = _spans(np.hstack([b1, b2]), n, tol)
        report.add("decomposition_spans", spans, 0.0 if spans else 1.0)
        # block form [[0, -iso], [iso^-1, 0]]: structure maps basis1 into
        # basis2 via iso^-1 and basis2 into basis1 via -iso
        try:
            r1 = fro(m @ b1 - b2 @ np.linalg.solve(iso, np.eye(iso.shape[0])))
            r2 = fro(m @ b2 + b1 @ iso)
            ok = tol.accepts(r1, scale) and tol.accepts(r2, scale)
            report.add("decomposition_block_form", ok, max(r1, r2))
        except np.linalg.LinAlgError:
            report.add("decomposition_block_form", False, np.inf, "iso singular")


def _validate_para(j, tol, report):
    m = j.matrix
    n = j.dim
    scale = max(fro(m) ** 2, 1.0)
    res = fro(m @ m - np.eye(n))
    report.add("squares_to_id", tol.accepts(res, scale), res)
    tr = abs(float(np.trace(m)))
    report.add("trace_zero", tol.accepts(tr, max(n, 1)), tr)
    p = j.eigen_plus.shape[1]
    q = j.eigen_minus.shape[1]
    report.add("balanced_eigenspaces", p == q and p + q == n, float(abs(p - q)))
    if p:
        rp = fro(m @ j.eigen_plus - j.eigen_plus)
        report.add("plus_eigenspace", tol.accepts(rp, scale), rp)
    if q:
        rm = fro(m @ j.eigen_minus + j.eigen_minus)
        report.add("minus_eigenspace", tol.accepts(rm, scale), rm)
    spans, _ = _spans(np.hstack([j.eigen_plus, j.eigen_minus]), n, tol)
    report.add("eigenspaces_span", spans, 0.0 if spans else 1.0)


def _validate_tangent(t, tol, report):
    m = t.matrix
    n = t.dim
    scale = max(fro(m) ** 2, 1.0)
    res = fro(m @ m)
    report.add("squares_to_zero", tol.accepts(res, scale), res)
    report.add("even_dimension", n % 2 == 0, float(n % 2))
    kernel, image, rank = kernel_and_image(m, tol)
    report.add("rank_is_half_dim", 2 * rank == n, float(abs(2 * rank - n)))
    if 2 * rank == n:
        gap = _subspace_gap(image, kernel)
        report.add("image_equals_kernel", tol.accepts(gap, 1.0), gap)
    rk = fro(m @ t.kernel_basis)
    report.add("kernel_basis_annihilated", tol.accepts(rk, scale), rk)
    _, _, rank_on_complement = kernel_and_image(m @ t.complement_basis, tol)
    want = t.complement_basis.shape[1]
    report.add("restriction_isomorphism", rank_on_complement == want,
               float(want - rank_on_complement))


def _validate_cotangent(c, tol, report):
    _validate_symplectic(c.symplectic, tol, report)
    s = c.symplectic.matrix
    n = c.dim
    scale = max(fro(s), 1.0)
    lag = c.lagrangian_basis
    res = fro(lag.T @ s @ lag)
    report.add("lagrangian_isotropic", tol.accepts(res, scale), res)
    report.add("lagrangian_maximal", 2 * lag.shape[1] == n,
               float(abs(2 * lag.shape[1] - n)))
    report.add("complement_dimension",
               lag.shape[1] == c.complement_basis.shape[1],
               float(abs(lag.shape[1] - c.complement_basis.shape[1])))
    spans, _ = _spans(np.hstack([lag, c.complement_basis]), n, tol)
    report.add("decomposition_spans", spans, 0.0 if spans else 1.0)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def fundamental_symmetry(g: KreinMetric, tol: Tolerance = DEFAULT_TOL):
    """Fundamental symmetry J and fundamental inner product gamma of g.

    J fixes the positive part and flips the negative part, so that
    ``g(u, v) = gamma(u, Jv)`` and ``gamma(u, v) = g(u, Jv)`` with gamma
    positive definite, and ``gamma(u, Jv) = gamma(Ju, v)``.

    Raises
    ------
    InvalidDecomposition
        If the stored bases do not span, or gamma fails to be symmetric
        positive definite (non-orthogonal splitting).
    """
    p, q = g.signature
    n = g.dim
    if p + q != n:
        raise InvalidDecomposition(f"bases give {p}+{q} directions in dimension {n}")
    basis = np.hstack([g.plus_basis, g.minus_basis])
    try:
        inv = np.linalg.inv(basis)
    except np.linalg.LinAlgError as exc:
        raise InvalidDecomposition("plus/minus bases do not span") from exc
    j = basis @ np.diag(np.concatenate([np.ones(p), -np.ones(q)])) @ inv
    gamma = g.matrix @ j
    gamma = np.asarray(gamma)
    scale = max(fro(gamma), 1.0)
    if not tol.accepts(fro(gamma - gamma.T), scale):
        raise InvalidDecomposition("splitting is not g-orthogonal: gamma not symmetric")
    if np.linalg.eigvalsh(0.5 * (gamma + gamma.T)).min() <= tol.atol:
        raise InvalidDecomposition("gamma is not positive definite")
    return j, BilinearForm(0.5 * (gamma + gamma.T), "symmetric")


def krein_isomorphism(g1: KreinMetric, g2: KreinMetric, tol: Tolerance = DEFAULT_TOL):
    """Isomorphism phi with phi^T G2 phi = G1, or a signature verdict.

    Returns ``(phi, None)`` on success and ``(None, "incompatible_signature")``
    when the signatures differ (no isomorphism can exist).
    """
    if g1.dim != g2.dim:
        raise DimensionMismatch(f"ambient dimensions differ: {g1.dim} vs {g2.dim}")
    if g1.signature != g2.signature:
        return None, "incompatible_signature"

    def factor(g):
        # G = W Sigma W^T with Sigma = diag(+1..., -1...) in a fixed order
        w, q = np.linalg.eigh(0.5 * (g.matrix + g.matrix.T))
        order = np.argsort(-w)
        w, q = w[order], q[:, order]
        cut = tol.rank_threshold(np.abs(w).max(initial=0.0))
        if np.any(np.abs(w) <= cut):
            raise Degenerate("Krein matrix numerically degenerate")
        return q * np.sqrt(np.abs(w))

    w1 = factor(g1)
    w2 = factor(g2)
    # G_i = W_i Sigma W_i^T with the same Sigma, so W2^T phi = W1^T works
    phi = np.linalg.solve(w2.T, w1.T)
    return phi, None


def tangent_normal_form(j: TangentStructure, tol: Tolerance = DEFAULT_TOL):
    """Isomorphism A with A^-1 J_can A = J, J_can the canonical tangent matrix.

    Raises InvalidStructure when J fails its defining invariants.
    """
    rep = validate(j, tol)
    if not rep.passed:
        raise InvalidStructure("; ".join(e.name for e in rep.failures()))
    m = j.matrix
    n = j.dim
    k = n // 2
    kernel, _, _ = kernel_and_image(m, tol)
    # complement = orthogonal complement of ker J; J maps it isomorphically
    # onto ker J, so the columns (J w_1 .. J w_k | w_1 .. w_k) carry J into
    # the canonical form
    complement, _, _ = kernel_and_image(kernel.T, tol)
    p = np.hstack([m @ complement, complement])
    if np.linalg.matrix_rank(p) != n:
        raise InvalidStructure("complement construction degenerate")
    return np.linalg.inv(p)


def complex_normal_form(c: ComplexStructure, tol: Tolerance = DEFAULT_TOL):
    """Isomorphism A with A^-1 I_can A = I for a decomposable structure.

    Sends u + v (u in the first subspace, v in the second) to (u, iso v) in
    coordinates where the canonical complex matrix acts.

    Raises MissingDecomposition if no decomposition is attached.
    """
    if c.decomposition is None:
        raise MissingDecomposition("complex structure has no decomposition data")
    b1, b2, iso = c.decomposition
    k = b1.shape[1]
    basis = np.hstack([b1, b2])
    block = np.zeros((2 * k, 2 * k))
    block[:k, :k] = np.eye(k)
    block[k:, k:] = iso
    return block @ np.linalg.inv(basis)


def para_from_complex(c: ComplexStructure, tol: Tolerance = DEFAULT_TOL):
    """Para-complex structure S I from a decomposable complex structure I.

    S is the symmetry that is -Id on the first subspace of the decomposition
    and +Id on the second; the same S recovers I = S J.  Returns the
    structure together with S.
    """
    if c.decomposition is None:
        raise MissingDecomposition("complex structure has no decomposition data")
    b1, b2, _ = c.decomposition
    n = c.dim
    p = b1.shape[1]
    basis = np.hstack([b1, b2])
    symmetry = basis @ np.diag(np.concatenate([-np.ones(p), np.ones(n - p)])) \
        @ np.linalg.inv(basis)
    j = symmetry @ c.matrix
    # eigenspaces of J: graph vectors u -+ iso^-1(...); numerically the
    # eigendecomposition is simpler and deterministic
    plus, minus = _para_eigenbases(j, tol)
    return ParaComplexStructure(j, plus, minus), symmetry


def _para_eigenbases(j, tol):
    """Orthonormal +1/-1 eigenbases of an involution, via kernel bases."""
    n = j.shape[0]
    plus, _, _ = kernel_and_image(j - np.eye(n), tol)
    minus, _, _ = kernel_and_image(j + np.eye(n), tol)
    return plus, minus


def darboux_basis(omega: SymplecticForm, tol: Tolerance = DEFAULT_TOL):
    """Symplectic Gram-Schmidt: columns of A turn S into the canonical form.

    Returns ``(A, certificate)`` where ``A^T S A`` equals [[0, I], [-I, 0]]
    and ``certificate`` is the Frobenius residual of that identity.

    Raises
    ------
    Degenerate
        Odd dimension, or no partner with nonzero pairing can be found
        (rank deficiency).
    """
    s = omega.matrix
    n = omega.dim
    if n % 2:
        raise Degenerate(f"odd dimension {n}")
    scale = max(fro(s), 1.0)

    remaining = [np.eye(n)[:, i] for i in range(n)]
    a_cols = []
    b_cols = []
    while remaining:
        u = remaining.pop(0)
        nu = np.linalg.norm(u)
        if nu <= tol.rank_threshold(1.0):
            continue
        u = u / nu
        pairings = [abs(float(u @ s @ w)) for w in remaining]
        if not pairings or max(pairings) <= tol.rank_threshold(scale):
            raise Degenerate("no symplectic partner found: form is degenerate")
        pick = int(np.argmax(pairings))
        v = remaining.pop(pick)
        v = v / float(u @ s @ v)  # now Omega(u, v) = 1
        a_cols.append(u)
        b_cols.append(v)
        # project the rest onto the symplectic complement of span(u, v)
        remaining = [w - float(w @ s @ v) * u + float(w @ s @ u) * v
                     for w in remaining]

    if 2 * len(a_cols) != n:
        raise Degenerate("symplectic reduction lost directions: form is degenerate")
    a = np.column_stack(a_cols + b_cols)
    certificate = fro(a.T @ s @ a - symplectic_canonical(n).matrix)
    return a, float(certificate)
