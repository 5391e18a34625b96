"""Chart atlases with sampled transition functions and isotropy checks.

Transition functions are evaluable matrix-valued maps sampled at declared
overlap points; triple overlaps carry their own shared sample sets.  The
tensor action convention is the single source of truth here:

    kind (1,1):  action(g, T) = g T g^-1       (isotropy = commutation)
    kind (2,0):  action(g, S) = g^-T S g^-1    (isotropy = congruence
                                                invariance of the form)

Sample-set density is the caller's responsibility; reports record how many
points each verdict rests on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DimensionMismatch, Singular, UnsupportedKind
from .linalg import DEFAULT_TOL, Tolerance, as_matrix, fro, kernel_and_image, signature_of
from .report import Report

__all__ = [
    "StructureMatrix",
    "IsotropyGroupSpec",
    "Chart",
    "ConstantTransition",
    "AffineTransition",
    "ChartAtlas",
    "LocalTensorField",
    "tensor_action",
    "in_isotropy",
    "check_cocycle",
    "check_reduction",
    "check_locally_modelled",
]


@dataclass(frozen=True)
class StructureMatrix:
    """Square matrix with a role tag: endomorphism, symmetric or skew form."""

    matrix: np.ndarray
    kind: str  # "1,1" | "2,0"
    symmetry: str = "symmetric"  # only meaningful for kind "2,0"

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix, square=True))
        if self.kind not in ("1,1", "2,0"):
            raise ValueError(f"unknown tensor kind {self.kind!r}")
        if self.symmetry not in ("symmetric", "skew"):
            raise ValueError(f"unknown symmetry tag {self.symmetry!r}")

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class IsotropyGroupSpec:
    """Model tensor whose isotropy group the transitions should live in."""

    model: StructureMatrix

    @property
    def dim(self):
        return self.model.dim


@dataclass(frozen=True)
class Chart:
    """Named open box with optional interior sample points."""

    name: str
    lo: np.ndarray
    hi: np.ndarray
    samples: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        pts = np.asarray(self.samples, dtype=float)
        if pts.size == 0:
            pts = np.zeros((0, lo.size))
        object.__setattr__(self, "samples", pts.reshape(-1, lo.size))


class ConstantTransition:
    """x -> T0."""

    def __init__(self, matrix):
        self.matrix = as_matrix(matrix, square=True)

    def __call__(self, x):
        return self.matrix


class AffineTransition:
    """x -> T0 + sum_i x_i T_i."""

    def __init__(self, base, coefficients):
        self.base = as_matrix(base, square=True)
        self.coefficients = [as_matrix(c, square=True) for c in coefficients]

    def __call__(self, x):
        out = self.base.copy()
        for xi, ci in zip(np.atleast_1d(x), self.coefficients):
            out += xi * ci
        return out


@dataclass
class ChartAtlas:
    """Finite chart cover with overlap samples and transition evaluators.

    ``transitions`` maps ordered pairs (a, b) to an evaluator for T_ab;
    ``overlaps`` holds the sample points of each declared pairwise overlap
    and ``triple_overlaps`` those of each declared triple (a, b, c), on
    which T_ac = T_ab T_bc is tested.
    """

    fiber_dim: int
    charts: list
    overlaps: dict = field(default_factory=dict)       # (a, b) -> points array
    transitions: dict = field(default_factory=dict)    # (a, b) -> callable
    triple_overlaps: list = field(default_factory=list)  # (a, b, c, points)

    def chart_names(self):
        return [c.name for c in self.charts]

    def transition_at(self, a, b, x):
        """Evaluate T_ab(x); T_aa is the identity, T_ba the inverse of T_ab."""
        if a == b:
            return np.eye(self.fiber_dim)
        if (a, b) in self.transitions:
            return np.asarray(self.transitions[(a, b)](x), dtype=float)
        if (b, a) in self.transitions:
            m = np.asarray(self.transitions[(b, a)](x), dtype=float)
            try:
                return np.linalg.inv(m)
            except np.linalg.LinAlgError as exc:
                raise Singular(f"transition {b}->{a} not invertible at {x}") from exc
        raise KeyError(f"no transition declared between {a!r} and {b!r}")

    def overlap_connectivity(self):
        """Connected components of the chart cover's overlap graph."""
        parent = {name: name for name in self.chart_names()}

        def find(u):
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            return u

        for (a, b) in self.overlaps:
            parent[find(a)] = find(b)
        return len({find(name) for name in parent})


def tensor_action(g, tensor: StructureMatrix) -> StructureMatrix:
    """Push a model tensor through an invertible map.

    (1,1) tensors transform by conjugation g T g^-1, (2,0) forms by the
    inverse congruence g^-T S g^-1, matching the pullback action evaluated
    in coordinates.  Raises Singular when g is not invertible.
    """
    g = as_matrix(g, square=True, name="g")
    if g.shape != tensor.matrix.shape:
        raise DimensionMismatch(f"map {g.shape} vs tensor {tensor.matrix.shape}")
    try:
        g_inv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise Singular("tensor action needs an invertible map") from exc
    if tensor.kind == "1,1":
        moved = g @ tensor.matrix @ g_inv
    else:
        moved = g_inv.T @ tensor.matrix @ g_inv
    return StructureMatrix(moved, tensor.kind, tensor.symmetry)


def in_isotropy(g, spec: IsotropyGroupSpec, tol: Tolerance = DEFAULT_TOL):
    """True iff the action of g fixes the model tensor within tol.

    Acceptance is ``|action(g, T) - T| <= rtol |T| + atol``.
    """
    moved = tensor_action(g, spec.model)
    resid = fro(moved.matrix - spec.model.matrix)
    return tol.accepts(resid, fro(spec.model.matrix)), resid


def check_cocycle(atlas: ChartAtlas, tol: Tolerance = DEFAULT_TOL) -> Report:
    """Verify T_aa = Id, sampled invertibility, and the triple condition.

    For every declared triple (a, b, c) and each of its sample points the
    residual |T_ac(x) - T_ab(x) T_bc(x)| is measured; the report keeps the
    worst violation per triple.  A single-chart atlas passes vacuously.
    """
    report = Report()
    n = atlas.fiber_dim

    for (a, b), points in atlas.overlaps.items():
        worst = 0.0
        ok = True
        for x in np.atleast_2d(points):
            t = atlas.transition_at(a, b, x)
            s = np.linalg.svd(t, compute_uv=False)
            if s[-1] <= tol.rank_threshold(s[0]):
                ok = False
                worst = max(worst, float(s[0] / max(s[-1], np.finfo(float).tiny)))
        report.add(f"invertible[{a},{b}]", ok, worst if not ok else 0.0,
                   f"{len(np.atleast_2d(points))} samples")

    # identity on the diagonal wherever a self-transition was declared
    for (a, b), fn in atlas.transitions.items():
        if a == b:
            pts = atlas.overlaps.get((a, b), np.zeros((1, len(atlas.charts[0].lo))))
            worst = max(fro(np.asarray(fn(x)) - np.eye(n)) for x in np.atleast_2d(pts))
            report.add(f"identity_on_diagonal[{a}]", tol.accepts(worst, 1.0), worst)

    if not atlas.triple_overlaps:
        report.note("no triple overlaps declared: cocycle condition vacuous")
    for (a, b, c, points) in atlas.triple_overlaps:
        worst = 0.0
        where = ""
        for x in np.atleast_2d(points):
            lhs = atlas.transition_at(a, c, x)
            rhs = atlas.transition_at(a, b, x) @ atlas.transition_at(b, c, x)
            resid = fro(lhs - rhs)
            if resid > worst:
                worst, where = resid, np.array2string(np.asarray(x), precision=3)
        report.add(f"cocycle[{a},{b},{c}]",
                   tol.accepts(worst, max(1.0, fro(lhs))), worst, where)

    components = atlas.overlap_connectivity()
    if components > 1:
        report.note(f"overlap graph has {components} components; "
                    "chart cover is disconnected")
    return report


def check_reduction(atlas: ChartAtlas, spec: IsotropyGroupSpec,
                    tol: Tolerance = DEFAULT_TOL) -> Report:
    """Every sampled transition must lie in the model tensor's isotropy group.

    The report starts with the cocycle gate and then carries one entry per
    declared overlap with the worst isotropy residual over its samples.
    """
    report = check_cocycle(atlas, tol)
    if not report.passed:
        report.note("cocycle precondition failed; isotropy entries reported anyway")
    for (a, b), points in atlas.overlaps.items():
        worst = 0.0
        ok = True
        where = ""
        for x in np.atleast_2d(points):
            t = atlas.transition_at(a, b, x)
            inside, resid = in_isotropy(t, spec, tol)
            if resid >= worst:
                worst, where = resid, np.array2string(np.asarray(x), precision=3)
            ok = ok and inside
        report.add(f"isotropy[{a},{b}]", ok, worst, where)
    return report


# ---------------------------------------------------------------------------
# locally modelled fields
# ---------------------------------------------------------------------------

@dataclass
class LocalTensorField:
    """Per-chart matrix-valued function of a declared tensor kind."""

    kind: str  # "1,1" | "2,0"
    evaluators: dict  # chart name -> callable x -> matrix
    symmetry: str = "symmetric"

    def at(self, chart_name, x):
        value = np.asarray(self.evaluators[chart_name](x), dtype=float)
        if not np.all(np.isfinite(value)):
            raise ValueError(f"field not finite on {chart_name} at {x}")
        return value


def _orbit_class(model: StructureMatrix, tol):
    """Classify the model tensor by the complete orbit invariant we support."""
    m = model.matrix
    n = m.shape[0]
    scale = max(fro(m) ** 2, 1.0)
    if model.kind == "2,0":
        if model.symmetry == "symmetric":
            return ("signature", signature_of(m, tol))
        return ("rank", kernel_and_image(m, tol)[2])
    if tol.accepts(fro(m @ m + np.eye(n)), scale):
        return ("complex", None)
    if tol.accepts(fro(m @ m - np.eye(n)), scale):
        return ("involution", signature_of_involution(m, tol))
    if tol.accepts(fro(m @ m), scale):
        return ("nilpotent", rank_pattern(m, tol))
    raise UnsupportedKind(
        "no complete orbit invariant for this (1,1) tensor; supported: "
        "complex, involutive, nilpotent-of-order-2")


def signature_of_involution(m, tol=DEFAULT_TOL):
    """(+1, -1) eigenspace dimensions of an involution via rank computations."""
    n = m.shape[0]
    plus = n - kernel_and_image(m - np.eye(n), tol)[2]
    minus = n - kernel_and_image(m + np.eye(n), tol)[2]
    return plus, minus


def rank_pattern(m, tol=DEFAULT_TOL, max_power=None):
    """Ranks of successive powers, a complete nilpotent conjugation invariant."""
    n = m.shape[0]
    max_power = max_power or n
    out = []
    p = np.eye(n)
    for _ in range(max_power):
        p = p @ m
        r = kernel_and_image(p, tol)[2]
        out.append(r)
        if r == 0:
            break
    return tuple(out)


def _same_orbit(value, model_class, kind, symmetry, tol):
    """(passed, residual) for 'value lies in the model tensor's orbit'."""
    label, invariant = model_class
    n = value.shape[0]
    scale = max(fro(value) ** 2, 1.0)
    if label == "signature":
        sym_resid = fro(value - value.T)
        if not tol.accepts(sym_resid, max(fro(value), 1.0)):
            return False, sym_resid
        got = signature_of(value, tol)
        return got == invariant, 0.0 if got == invariant else 1.0
    if label == "rank":
        skew_resid = fro(value + value.T)
        if not tol.accepts(skew_resid, max(fro(value), 1.0)):
            return False, skew_resid
        got = kernel_and_image(value, tol)[2]
        return got == invariant, float(abs(got - invariant))
    if label == "complex":
        resid = fro(value @ value + np.eye(n))
        return tol.accepts(resid, scale), resid
    if label == "involution":
        resid = fro(value @ value - np.eye(n))
        if not tol.accepts(resid, scale):
            return False, resid
        got = signature_of_involution(value, tol)
        return got == invariant, 0.0 if got == invariant else 1.0
    if label == "nilpotent":
        resid = fro(value @ value)
        if not tol.accepts(resid, scale):
            return False, resid
        got = rank_pattern(value, tol)
        return got == invariant, 0.0 if got == invariant else 1.0
    raise UnsupportedKind(label)


def check_locally_modelled(field: LocalTensorField, atlas: ChartAtlas,
                           spec: IsotropyGroupSpec,
                           tol: Tolerance = DEFAULT_TOL) -> Report:
    """Is the field, chart by chart, in the orbit of the model tensor?

    Instead of solving for a trivializing map at each point (ill-conditioned),
    the check compares complete orbit invariants: signature for symmetric
    forms, rank for skew forms, rank pattern for nilpotent endomorphisms,
    eigenvalue structure for complex/para-complex ones.

    Raises UnsupportedKind when the model tensor has no implemented
    invariant.
    """
    if field.kind != spec.model.kind:
        raise DimensionMismatch(
            f"field kind {field.kind} vs model kind {spec.model.kind}")
    model_class = _orbit_class(spec.model, tol)
    report = Report()
    report.note(f"orbit invariant: {model_class[0]}")
    for chart in atlas.charts:
        if chart.name not in field.evaluators:
            report.add(f"modelled[{chart.name}]", False, np.inf, "field missing")
            continue
        pts = chart.samples
        if pts.shape[0] == 0:
            report.add(f"modelled[{chart.name}]", True, 0.0, "no samples declared")
            continue
        ok = True
        worst = 0.0
        where = ""
        for x in pts:
            value = field.at(chart.name, x)
            good, resid = _same_orbit(value, model_class, field.kind,
                                      field.symmetry, tol)
            if not good and resid >= worst:
                worst, where = resid, np.array2string(x, precision=3)
            ok = ok and good
        report.add(f"modelled[{chart.name}]", ok, worst,
                   where or f"{pts.shape[0]} samples")
    return report
