"""Induced structures on discretized spaces of loops into a constant target.

A loop is sampled at N circle points with positive quadrature weights
summing to one (uniform weights by default; on a circle the trapezoid rule
coincides with them).  Tangent vectors to the loop space are N x d arrays,
and the target's form, metric and structure induce

    Omega(X, Y) = sum_t w_t omega(X_t, Y_t)
    g(X, Y)     = sum_t w_t g(X_t, Y_t)
    (I X)_t     = I X_t

which keeps an almost Kahler (or para-Kahler) structure, and coherence
across an ascending family of targets survives by linearity of the sums.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .compat import CompatibleTriple, check_triple
from .errors import ShapeMismatch
from .linalg import DEFAULT_TOL, Tolerance, fro
from .limits import BondingSystem, CoherentSequence, check_coherent
from .report import Report

__all__ = [
    "DiscretizedLoopSpace",
    "block_kahler_target",
    "block_para_target",
    "induced_forms",
    "check_induced_compatibility",
    "ascending_coherence",
]


def _block_diag(block, copies):
    d = block.shape[0]
    out = np.zeros((d * copies, d * copies))
    for c in range(copies):
        out[c * d:(c + 1) * d, c * d:(c + 1) * d] = block
    return out


def block_kahler_target(pairs) -> CompatibleTriple:
    """Canonical Kahler triple on R^(2*pairs) in the interleaved convention.

    The structure is block diagonal over coordinate pairs, so the family over
    pairs = 1, 2, 3, ... is coherent under coordinate padding (the half-split
    canonical convention is not).
    """
    from .compat import complete_triple
    from .structures import BilinearForm, ComplexStructure

    i2 = np.array([[0.0, -1.0], [1.0, 0.0]])
    structure = ComplexStructure(_block_diag(i2, pairs))
    return complete_triple(BilinearForm(np.eye(2 * pairs), "symmetric"), structure)


def block_para_target(pairs) -> CompatibleTriple:
    """Canonical para-Kahler triple on R^(2*pairs), interleaved convention."""
    from .compat import complete_triple
    from .structures import SymplecticForm, krein_from_matrix

    s2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
    g2 = np.diag([1.0, -1.0])
    omega = SymplecticForm(_block_diag(s2, pairs))
    metric = krein_from_matrix(_block_diag(g2, pairs))
    return complete_triple(metric, omega, flavor="para_kahler")


@dataclass
class DiscretizedLoopSpace:
    """A loop into a constant-coefficient Kahler/para-Kahler target.

    ``loop`` is an (N, d) array of points; tangent vectors share that shape.
    Weights default to uniform 1/N and must be positive with unit sum.
    """

    target: CompatibleTriple
    loop: np.ndarray
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        self.loop = np.asarray(self.loop, dtype=float)
        if self.loop.ndim != 2:
            raise ShapeMismatch("loop must be an (N, d) array")
        n, d = self.loop.shape
        if d != self.target.dim:
            raise ShapeMismatch(f"loop points have dim {d}, target dim {self.target.dim}")
        if self.weights is None:
            self.weights = np.full(n, 1.0 / n)
        else:
            self.weights = np.asarray(self.weights, dtype=float)
            if self.weights.shape != (n,):
                raise ShapeMismatch("one weight per sample required")
            if np.any(self.weights <= 0):
                raise ValueError("weights must be positive")
            if abs(self.weights.sum() - 1.0) > 1e-12:
                raise ValueError("weights must sum to one")

    @property
    def samples(self):
        return self.loop.shape[0]

    @property
    def dim(self):
        return self.loop.shape[1]


def _conform(space, x):
    x = np.asarray(x, dtype=float)
    if x.shape != space.loop.shape:
        raise ShapeMismatch(f"tangent array {x.shape}, expected {space.loop.shape}")
    return x


def induced_forms(space: DiscretizedLoopSpace, x, y):
    """Quadrature values (Omega(X, Y), g(X, Y)) and the pointwise image I X."""
    x = _conform(space, x)
    y = _conform(space, y)
    s = space.target.omega.matrix
    g = space.target.metric_matrix
    i = space.target.structure.matrix
    omega_val = float(np.sum(space.weights * np.einsum("ti,ij,tj->t", x, s, y)))
    metric_val = float(np.sum(space.weights * np.einsum("ti,ij,tj->t", x, g, y)))
    image = x @ i.T
    return omega_val, metric_val, image


def check_induced_compatibility(space: DiscretizedLoopSpace, trials=20,
                                tol: Tolerance = DEFAULT_TOL,
                                rng=None) -> Report:
    """Random-tangent verification that the induced data stays compatible.

    Checks, for ``trials`` random tangent pairs: antisymmetry of the induced
    form, invariance under the structure, the linking identity
    g(X, Y) = Omega(X, I Y), and positivity (Kahler) of g(X, X).  The
    induced metric's signature is reported: block-diagonal with one target
    block per sample point, so it is N * signature(target).
    """
    rng = rng or np.random.default_rng(0)
    report = Report()
    flavor = space.target.flavor
    i = space.target.structure.matrix

    worst = {"antisymmetry": 0.0, "form_invariance": 0.0, "linking": 0.0}
    positive_ok = True
    for _ in range(trials):
        x = rng.normal(size=space.loop.shape)
        y = rng.normal(size=space.loop.shape)
        o_xy, g_xy, ix = induced_forms(space, x, y)
        o_yx, _, iy = induced_forms(space, y, x)
        scale = max(abs(o_xy), 1.0)
        worst["antisymmetry"] = max(worst["antisymmetry"], abs(o_xy + o_yx) / scale)
        o_ii, _, _ = induced_forms(space, ix, iy)
        sign = 1.0 if flavor == "kahler" else -1.0
        worst["form_invariance"] = max(worst["form_invariance"],
                                       abs(o_ii - sign * o_xy) / scale)
        o_x_iy, _, _ = induced_forms(space, x, iy)
        worst["linking"] = max(worst["linking"],
                               abs(g_xy - o_x_iy) / max(abs(g_xy), 1.0))
        if flavor == "kahler":
            _, g_xx, _ = induced_forms(space, x, x)
            positive_ok = positive_ok and g_xx > 0

    report.add("antisymmetry", tol.accepts(worst["antisymmetry"], 1.0),
               worst["antisymmetry"], f"{trials} trials")
    report.add("form_invariance", tol.accepts(worst["form_invariance"], 1.0),
               worst["form_invariance"])
    report.add("metric_is_form_of_structure", tol.accepts(worst["linking"], 1.0),
               worst["linking"])
    if flavor == "kahler":
        report.add("metric_positive_on_trials", positive_ok,
                   0.0 if positive_ok else 1.0)
    else:
        p, q = _induced_signature(space)
        report.add("metric_neutral", p == q, float(abs(p - q)),
                   f"signature ({p}, {q})")
    return report


def _induced_signature(space):
    from .linalg import signature_of
    p, q, _ = signature_of(space.target.metric_matrix)
    return space.samples * p, space.samples * q


def ascending_coherence(targets: Sequence[CompatibleTriple], samples,
                        tol: Tolerance = DEFAULT_TOL, rng=None) -> Report:
    """Coherence of induced loop-space data over an ascending target family.

    ``targets`` live on padded ambient spaces (dim_0 <= dim_1 <= ...); the
    per-point structures must form coherent direct sequences, and then the
    induced forms agree across levels on included tangent arrays exactly
    (linearity of the quadrature).  Both facts are checked: the pointwise
    sequences through the tower machinery, the induced agreement on random
    tangent data.
    """
    rng = rng or np.random.default_rng(0)
    report = Report()
    dims = [t.dim for t in targets]
    bonding = BondingSystem.padded(dims, "direct")

    for name, kind, extract in (
        ("structure", "1,1", lambda t: t.structure.matrix),
        ("form", "2,0", lambda t: t.omega.matrix),
        ("metric", "2,0", lambda t: t.metric_matrix),
    ):
        seq = CoherentSequence(bonding, [extract(t) for t in targets], kind)
        rep = check_coherent(seq, tol)
        report.extend(rep, prefix=f"{name}/")

    for lvl, triple in enumerate(targets):
        rep = check_triple(triple, tol)
        report.add(f"target_compatible[{lvl}]", rep.passed, rep.worst_residual)

    # induced agreement: evaluate at level i on random tangents, include
    # into level j, evaluate there
    for i in range(len(targets)):
        for j in range(i + 1, len(targets)):
            inc = bonding.map(i, j)
            worst = 0.0
            for _ in range(5):
                loop_i = rng.normal(size=(samples, dims[i]))
                x_i = rng.normal(size=(samples, dims[i]))
                y_i = rng.normal(size=(samples, dims[i]))
                space_i = DiscretizedLoopSpace(targets[i], loop_i)
                space_j = DiscretizedLoopSpace(targets[j], loop_i @ inc.T)
                o_i, g_i, ix_i = induced_forms(space_i, x_i, y_i)
                o_j, g_j, ix_j = induced_forms(space_j, x_i @ inc.T, y_i @ inc.T)
                worst = max(worst,
                            abs(o_i - o_j) / max(abs(o_i), 1.0),
                            abs(g_i - g_j) / max(abs(g_i), 1.0),
                            fro(ix_i @ inc.T - ix_j) / max(fro(ix_i), 1.0))
            report.add(f"induced_agreement[{i},{j}]", tol.accepts(worst, 1.0), worst)
    report.note(f"{samples} circle samples per loop")
    return report
