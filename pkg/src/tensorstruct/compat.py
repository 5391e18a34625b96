"""Compatible symplectic / metric / (para-)complex triples at the linear level.

The three pairwise compatibility notions, with B(u,v) = u^T S v throughout:

  * form and complex structure I:   Omega(Iu, Iv) = Omega(u, v) and
    g'(u,v) = Omega(u, Iv) positive definite;
  * metric and complex structure:   g(Iu, Iv) = g(u, v);
  * metric and form:                (g-flat)^-1 (Omega-flat) squares to -Id
    (Kahler) or +Id (para flavor).

Para-complex versions flip the sign: Omega(Ju, Jv) = -Omega(u, v),
g(Ju, Jv) = -g(u, v), and the metric side is neutral instead of positive.

``structure_from`` is the polar construction: from a positive metric G and a
nondegenerate skew S it builds A = G^-1 S^T, the positive g-self-adjoint
square root R of A A^* and the complex structure R^-1 A, plus the corrected
metric with matrix G R, which is the one actually compatible with both
inputs.  A A^* is self-adjoint for the metric, not Euclidean-symmetric, so
the square root is taken after conjugating with G^(1/2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    Degenerate,
    DimensionMismatch,
    IncompatibleInputs,
    InvalidTriple,
    NotInvolutive,
    NotPositive,
)
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    as_matrix,
    fro,
    metric_adjoint,
    signature_of,
    spd_sqrt,
)
from .report import Report
from .structures import (
    BilinearForm,
    ComplexStructure,
    KreinMetric,
    ParaComplexStructure,
    SymplecticForm,
    krein_from_matrix,
    validate,
)

__all__ = [
    "CompatibleTriple",
    "OperatorA",
    "omega_from",
    "g_from",
    "structure_from",
    "is_compatible",
    "complete_triple",
    "check_triple",
    "lagrangian_orthogonal_decomposition",
]

Structure = Union[ComplexStructure, ParaComplexStructure]


@dataclass(frozen=True)
class CompatibleTriple:
    """A symplectic form, a metric and a (para-)complex structure.

    ``metric`` is a symmetric BilinearForm for the Kahler flavor (positive
    definite) and a KreinMetric for the para flavor (neutral).
    """

    omega: SymplecticForm
    metric: Union[BilinearForm, KreinMetric]
    structure: Structure
    flavor: str  # "kahler" | "para_kahler"

    def __post_init__(self):
        if self.flavor not in ("kahler", "para_kahler"):
            raise ValueError(f"unknown flavor {self.flavor!r}")

    @property
    def dim(self):
        return self.omega.dim

    @property
    def metric_matrix(self):
        return self.metric.matrix


@dataclass(frozen=True)
class OperatorA:
    """The operator linking a metric and a form: g(A u, v) = Omega(u, v)."""

    matrix: np.ndarray
    metric: np.ndarray
    omega: np.ndarray

    def residual(self):
        """Frobenius defect of the defining relation G A = S^T."""
        return fro(self.metric @ self.matrix - self.omega.T)


def _structure_sign(flavor):
    # structure squares to sign * Id
    return -1.0 if flavor == "kahler" else 1.0


def _metric_ok(g, flavor, tol):
    """(accepted, detail) for the flavor's signature requirement."""
    n_plus, n_minus, n_zero = signature_of(g, tol)
    if n_zero:
        return False, f"degenerate metric (zero count {n_zero})"
    if flavor == "kahler":
        return n_minus == 0, f"signature ({n_plus}, {n_minus})"
    return n_plus == n_minus, f"signature ({n_plus}, {n_minus})"


def omega_from(metric, structure: Structure, tol: Tolerance = DEFAULT_TOL) -> SymplecticForm:
    """Symplectic form Omega(u,v) = g(Iu, v) from a compatible (metric, structure).

    Works for both flavors; raises IncompatibleInputs when the inputs fail
    their own compatibility (the resulting form would not be skew or would
    be degenerate).
    """
    g = as_matrix(getattr(metric, "matrix", metric), square=True, name="metric")
    i = structure.matrix
    if g.shape != i.shape:
        raise DimensionMismatch(f"metric {g.shape} vs structure {i.shape}")
    s = i.T @ g
    scale = max(fro(s), 1.0)
    if not tol.accepts(fro(s + s.T), scale):
        raise IncompatibleInputs("g(Iu, v) is not skew: metric and structure incompatible")
    omega = SymplecticForm(0.5 * (s - s.T))
    rep = validate(omega, tol)
    if not rep.passed:
        raise IncompatibleInputs("constructed form is degenerate")
    return omega


def g_from(omega: SymplecticForm, structure: Structure, flavor=None,
           tol: Tolerance = DEFAULT_TOL):
    """Metric g(u,v) = Omega(u, Iv) from a compatible (form, structure).

    Returns a symmetric BilinearForm (Kahler: positive definite) or a
    KreinMetric (para flavor: neutral, with its Krein splitting attached).
    """
    if flavor is None:
        flavor = "kahler" if isinstance(structure, ComplexStructure) else "para_kahler"
    s = omega.matrix
    i = structure.matrix
    if s.shape != i.shape:
        raise DimensionMismatch(f"form {s.shape} vs structure {i.shape}")
    g = s @ i
    scale = max(fro(g), 1.0)
    if not tol.accepts(fro(g - g.T), scale):
        raise IncompatibleInputs("Omega(u, Iv) is not symmetric")
    g = 0.5 * (g + g.T)
    ok, detail = _metric_ok(g, flavor, tol)
    if not ok:
        raise IncompatibleInputs(f"metric fails {flavor} signature test: {detail}")
    if flavor == "kahler":
        return BilinearForm(g, "symmetric")
    return krein_from_matrix(g, tol)


def structure_from(metric, omega: SymplecticForm, flavor="kahler",
                   tol: Tolerance = DEFAULT_TOL):
    """(Para-)complex structure from a metric and a form, plus corrected metric.

    Kahler flavor (polar construction): with A = G^-1 S^T,

        R = g-self-adjoint positive square root of A A^*,
        I = R^-1 A,

    guaranteeing I^2 = -Id, I R = R I, and that the corrected metric
    g~(u,v) = g(Ru, v) is positive definite and compatible with both Omega
    and I.  Returns ``(structure, corrected_metric, operator)``.

    Para flavor: J = G^-1 S^T directly; accepted iff J^2 = Id within tol
    (near-misses are rejected, never repaired).  The corrected metric is
    g~(u,v) = Omega(u, Jv), neutral by construction.

    Raises
    ------
    NotPositive   (Kahler) the input metric is not positive definite.
    Degenerate    the form fails nondegeneracy.
    NotInvolutive (para) J^2 differs from Id beyond tolerance.
    """
    g = as_matrix(getattr(metric, "matrix", metric), square=True, name="metric")
    s = omega.matrix
    if g.shape != s.shape:
        raise DimensionMismatch(f"metric {g.shape} vs form {s.shape}")
    if not validate(omega, tol).passed:
        raise Degenerate("form is degenerate or not skew")
    n = g.shape[0]

    a = np.linalg.solve(g, s.T)
    operator = OperatorA(a, g, s)

    if flavor == "kahler":
        try:
            g_half = spd_sqrt(g, tol)
        except Exception as exc:
            raise NotPositive(f"metric is not positive definite: {exc}") from exc
        a_star = metric_adjoint(a, g)
        m = a @ a_star
        # m is self-adjoint for g; conjugating by G^(1/2) makes it symmetric
        g_half_inv = np.linalg.inv(g_half)
        try:
            root = spd_sqrt(g_half @ m @ g_half_inv, tol)
        except Exception as exc:
            raise NotPositive(f"A A* is not positive: {exc}") from exc
        r = g_half_inv @ root @ g_half
        i = np.linalg.solve(r, a)
        # Newton polish toward exact involutivity: X -> (X - X^-1)/2 squares
        # the defect of X^2 = -Id and contracts toward the exact polar
        # factor, so all compatibility identities tighten with it
        n_eye = np.eye(n)
        for _ in range(3):
            defect = fro(i @ i + n_eye)
            if defect <= 1e-14 * max(fro(i) ** 2, 1.0):
                break
            candidate = 0.5 * (i - np.linalg.inv(i))
            if fro(candidate @ candidate + n_eye) < defect:
                i = candidate
            else:
                break
        # refresh the root so that corrected = g(R ., .) keeps the exact
        # link corrected = Omega(., I.) after polishing
        r = a @ np.linalg.inv(i)
        corrected = g @ r
        corrected = 0.5 * (corrected + corrected.T)
        structure = ComplexStructure(i, _adapted_decomposition(corrected, i))
        return structure, BilinearForm(corrected, "symmetric"), operator

    if flavor == "para_kahler":
        ok, detail = _metric_ok(g, "para_kahler", tol)
        if not ok:
            raise IncompatibleInputs(f"metric is not neutral: {detail}")
        j = a
        resid = fro(j @ j - np.eye(n))
        if not tol.accepts(resid, max(fro(j) ** 2, 1.0)):
            raise NotInvolutive(f"J^2 - Id residual {resid:.3e}")
        corrected = s @ j
        corrected = 0.5 * (corrected + corrected.T)
        plus, minus = _involution_eigenbases(j, tol)
        structure = ParaComplexStructure(j, plus, minus)
        return structure, krein_from_matrix(corrected, tol), operator

    raise ValueError(f"unknown flavor {flavor!r}")


def _involution_eigenbases(j, tol):
    from .linalg import kernel_and_image
    n = j.shape[0]
    plus, _, _ = kernel_and_image(j - np.eye(n), tol)
    minus, _, _ = kernel_and_image(j + np.eye(n), tol)
    return plus, minus


def _unitary_half_basis(g, i):
    """Columns u_1..u_k, g-orthonormal with every u_j g-orthogonal to every
    I u_l; the span is Lagrangian for any form with g = Omega(., I.) and its
    image under I is the g-orthogonal complement."""
    n = g.shape[0]
    k = n // 2
    chosen = np.zeros((n, 0))
    for idx in range(n):
        if chosen.shape[1] == 2 * k:
            break
        v = np.eye(n)[:, idx]
        if chosen.shape[1]:
            gram = chosen.T @ g @ chosen
            v = v - chosen @ np.linalg.solve(gram, chosen.T @ g @ v)
        norm = float(np.sqrt(max(v @ g @ v, 0.0)))
        if norm <= 1e-8:
            continue
        v = v / norm
        chosen = np.hstack([chosen, v[:, None], (i @ v)[:, None]])
    if chosen.shape[1] != 2 * k:
        return None
    return chosen[:, 0::2]


def _adapted_decomposition(g, i_matrix):
    """Decomposition (E1, E2 = I(E1), iso), Lagrangian-orthogonal for the
    metric g compatible with I.  Returns None when the construction breaks
    (I not a complex structure for g)."""
    n = i_matrix.shape[0]
    if n % 2:
        return None
    k = n // 2
    b1 = _unitary_half_basis(g, i_matrix)
    if b1 is None:
        return None
    b2 = i_matrix @ b1
    # block convention [[0, -iso], [iso^-1, 0]]: with E2 = I(E1) the
    # coordinate representation pins iso down exactly
    basis = np.hstack([b1, b2])
    rep = np.linalg.solve(basis, i_matrix @ basis)
    iso = -rep[:k, k:]
    return b1, b2, iso


def is_compatible(first, second, flavor="kahler", tol: Tolerance = DEFAULT_TOL) -> Report:
    """Evaluate the defining compatibility identity of a pair on a full basis.

    The pair is recognized by type: (form, structure), (metric, structure)
    or (metric, form).  Returns a report; never raises on incompatibility.
    """
    report = Report()
    sign = _structure_sign(flavor)

    def _is_metric(x):
        return isinstance(x, (BilinearForm, KreinMetric)) or (
            isinstance(x, np.ndarray))

    if isinstance(first, SymplecticForm) and isinstance(second, (ComplexStructure, ParaComplexStructure)):
        s, i = first.matrix, second.matrix
        scale = max(fro(s), 1.0)
        # Omega(Iu, Iv) = -sign * Omega(u, v): +1 for kahler, -1 for para
        res = fro(i.T @ s @ i - (-sign) * s)
        report.add("form_invariance", tol.accepts(res, scale), res)
        induced = s @ i
        sym = fro(induced - induced.T)
        report.add("induced_metric_symmetric", tol.accepts(sym, scale), sym)
        ok, detail = _metric_ok(0.5 * (induced + induced.T), flavor, tol)
        report.add("induced_metric_signature", ok, 0.0 if ok else 1.0, detail)
        return report

    if _is_metric(first) and isinstance(second, (ComplexStructure, ParaComplexStructure)):
        g = np.asarray(getattr(first, "matrix", first), dtype=float)
        i = second.matrix
        scale = max(fro(g), 1.0)
        res = fro(i.T @ g @ i - (-sign) * g)
        report.add("metric_invariance", tol.accepts(res, scale), res)
        ok, detail = _metric_ok(g, flavor, tol)
        report.add("metric_signature", ok, 0.0 if ok else 1.0, detail)
        return report

    if _is_metric(first) and isinstance(second, SymplecticForm):
        g = np.asarray(getattr(first, "matrix", first), dtype=float)
        s = second.matrix
        j = np.linalg.solve(g, s.T)
        n = g.shape[0]
        res = fro(j @ j - sign * np.eye(n))
        report.add("flat_composition_squares_correctly",
                   tol.accepts(res, max(fro(j) ** 2, 1.0)), res)
        ok, detail = _metric_ok(g, flavor, tol)
        report.add("metric_signature", ok, 0.0 if ok else 1.0, detail)
        return report

    raise TypeError(
        f"unrecognized pair ({type(first).__name__}, {type(second).__name__})")


def complete_triple(first, second, flavor="kahler",
                    tol: Tolerance = DEFAULT_TOL) -> CompatibleTriple:
    """Complete a compatible pair to a full triple and validate it.

    Dispatches on the pair's types to ``omega_from`` / ``g_from`` /
    ``structure_from``.  The polar route replaces the input metric by the
    corrected one; the other routes keep both inputs.
    """
    if isinstance(first, (ComplexStructure, ParaComplexStructure)):
        first, second = second, first
    if isinstance(first, SymplecticForm) and not isinstance(
            second, (ComplexStructure, ParaComplexStructure)):
        first, second = second, first

    if isinstance(second, (ComplexStructure, ParaComplexStructure)):
        structure = second
        if isinstance(first, SymplecticForm):
            omega = first
            metric = g_from(omega, structure, flavor, tol)
        else:
            metric = first if isinstance(first, (BilinearForm, KreinMetric)) else \
                BilinearForm(as_matrix(first, square=True), "symmetric")
            omega = omega_from(metric, structure, tol)
    elif isinstance(second, SymplecticForm):
        omega = second
        structure, metric, _ = structure_from(first, omega, flavor, tol)
    else:
        raise TypeError("pair must contain a form, a metric, or a structure")

    triple = CompatibleTriple(omega, metric, structure, flavor)
    rep = check_triple(triple, tol)
    if not rep.passed:
        raise IncompatibleInputs(
            "completed triple fails: " + "; ".join(e.name for e in rep.failures()))
    return triple


def check_triple(triple: CompatibleTriple, tol: Tolerance = DEFAULT_TOL) -> Report:
    """All three pairwise predicates plus the linking identity g = Omega(., I.)."""
    report = Report()
    report.extend(is_compatible(triple.omega, triple.structure, triple.flavor, tol),
                  prefix="form_structure/")
    report.extend(is_compatible(triple.metric, triple.structure, triple.flavor, tol),
                  prefix="metric_structure/")
    report.extend(is_compatible(triple.metric, triple.omega, triple.flavor, tol),
                  prefix="metric_form/")
    g = triple.metric_matrix
    induced = triple.omega.matrix @ triple.structure.matrix
    link = fro(induced - g)
    if triple.flavor == "para_kahler":
        # the two linking formulas g = Omega(., J.) and Omega = g(J., .)
        # differ by a sign in the para case; accept either orientation
        link = min(link, fro(induced + g))
    report.add("metric_is_omega_of_structure", tol.accepts(link, max(fro(g), 1.0)), link)
    return report


def lagrangian_orthogonal_decomposition(triple: CompatibleTriple,
                                        tol: Tolerance = DEFAULT_TOL):
    """Split the space into two halves adapted to the triple.

    Kahler flavor: E1 and E2 = I(E1) are isomorphic, Lagrangian for Omega
    and orthogonal for the metric.  Para flavor: both halves are Lagrangian,
    the metric is positive definite on E1 and negative definite on E2, and
    J swaps them.

    Returns (E1, E2) with basis vectors as columns.
    Raises InvalidTriple if the triple fails ``check_triple``.
    """
    if not check_triple(triple, tol).passed:
        raise InvalidTriple("triple fails its compatibility predicates")
    n = triple.dim
    k = n // 2
    g = triple.metric_matrix
    i = triple.structure.matrix

    if triple.flavor == "kahler":
        e1 = _unitary_half_basis(g, i)
        if e1 is None:
            raise InvalidTriple("could not build an adapted unitary basis")
        return e1, i @ e1

    # para flavor: graphs over the +1 eigenspace.  With P the perfect pairing
    # g: E^+ x E^- -> R, the subspace {u + phi(u)} with g(u, phi u') = Id is
    # Lagrangian and positive; J flips the sign of the E^- component, so the
    # image {u - phi(u)} is Lagrangian and negative.
    plus, minus = _involution_eigenbases(i, tol)
    if plus.shape[1] != k or minus.shape[1] != k:
        raise InvalidTriple("eigenspaces are not balanced")
    pairing = plus.T @ g @ minus
    try:
        phi = minus @ np.linalg.inv(pairing)
    except np.linalg.LinAlgError as exc:
        raise InvalidTriple("pairing between eigenspaces is degenerate") from exc
    e1 = plus + phi
    e2 = i @ e1
    return e1, e2
