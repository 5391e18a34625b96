"""Field-level differential computations on a single coordinate chart.

Lie brackets, the bracket-defect (Nijenhuis) tensor, the metric connection
from the Koszul identity, curvature, and covariant derivatives of structure
fields.  Fields come in two derivative modes:

  * finite differences: any callable, differentiated by central differences
    with an explicit step (default 1e-5);
  * polynomial: entries are ``Poly`` objects, differentiated exactly (the
    oracle mode).

On coordinate fields the brackets vanish, so the Koszul identity reduces to
``2 g(grad_i e_j, e_k) = d_i g_jk + d_j g_ki - d_k g_ij`` and the Christoffel
array follows by solving with g.  Curvature differentiates the Christoffel
evaluator by central differences with its own step.

Conventions: ``christoffel[k, i, j]`` is the e_k-component of the derivative
of e_j along e_i; ``curvature[i, j, k, l]`` is the e_i-component of
R(e_k, e_l) e_j.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateMetricAtPoint,
    DimensionMismatch,
    InvalidStructureAtPoint,
    ModeMismatch,
)
from .linalg import DEFAULT_TOL, Tolerance, fro
from .poly import Poly

__all__ = [
    "DEFAULT_FD_STEP",
    "VectorField",
    "TensorFieldOnChart",
    "ConnectionData",
    "Verdict",
    "grid_points",
    "lie_bracket",
    "nijenhuis",
    "is_integrable_structure",
    "levi_civita",
    "curvature",
    "is_metric_integrable",
    "covariant_derivative_of_structure",
    "parallel_transport",
    "PolyMap",
    "random_quadratic_diffeo",
    "pullback_metric",
    "pullback_endomorphism",
    "sphere_stereographic_metric",
    "constant_field",
]

DEFAULT_FD_STEP = 1e-5


def grid_points(lo, hi, counts):
    """Rectangular lattice over the box [lo, hi], counts per axis."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    counts = np.broadcast_to(np.asarray(counts, dtype=int), lo.shape)
    axes = [np.linspace(lo[i], hi[i], counts[i]) for i in range(lo.size)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

class VectorField:
    """Vector field on a chart, with FD or exact-polynomial derivatives.

    Build from a callable (``VectorField(dim, fn, step=...)``) or from
    polynomial components (``VectorField.from_polys([p1, .., pd])``).
    """

    def __init__(self, dim, fn: Callable, step=DEFAULT_FD_STEP, polys=None):
        self.dim = int(dim)
        self.fn = fn
        self.step = float(step)
        self.polys = polys  # list[Poly] in polynomial mode, else None

    @classmethod
    def from_polys(cls, polys: Sequence[Poly]):
        polys = list(polys)
        dim = polys[0].dim

        def fn(x):
            return np.array([p(x) for p in polys])

        # exact mode: an infinite step means "never the binding constraint"
        # when steps propagate through mixed-mode products and brackets
        return cls(dim, fn, step=np.inf, polys=polys)

    @classmethod
    def constant(cls, vec):
        vec = np.atleast_1d(np.asarray(vec, dtype=float))
        dim = vec.size
        return cls.from_polys([Poly.constant(dim, v) for v in vec])

    @classmethod
    def coordinate(cls, dim, index):
        vec = np.zeros(dim)
        vec[index] = 1.0
        return cls.constant(vec)

    @property
    def mode(self):
        return "polynomial" if self.polys is not None else "fd"

    def __call__(self, x):
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)

    def jacobian(self, x):
        """d(component i)/d(x_j) as an (dim, dim) array."""
        x = np.asarray(x, dtype=float)
        if self.polys is not None:
            return np.array([[p.diff(j)(x) for j in range(self.dim)]
                             for p in self.polys])
        out = np.zeros((self.dim, self.dim))
        for j in range(self.dim):
            e = np.zeros(self.dim)
            e[j] = self.step
            out[:, j] = (self(x + e) - self(x - e)) / (2.0 * self.step)
        return out


class TensorFieldOnChart:
    """Matrix-valued field of a declared kind ("1,1" or "2,0").

    ``partial(x, i)`` is exact in polynomial mode and a central difference
    otherwise; an explicit gradient callable may be supplied for fields with
    known closed-form derivatives.
    """

    def __init__(self, dim, kind, fn: Callable, step=DEFAULT_FD_STEP,
                 polys=None, gradient: Optional[Callable] = None,
                 symmetry="symmetric"):
        self.dim = int(dim)
        if kind not in ("1,1", "2,0"):
            raise ValueError(f"unknown tensor kind {kind!r}")
        self.kind = kind
        self.fn = fn
        self.step = float(step)
        self.polys = polys  # (dim, dim) nested list of Poly, or None
        self.gradient = gradient  # x, i -> matrix, or None
        self.symmetry = symmetry

    @classmethod
    def from_polys(cls, polys, kind, symmetry="symmetric"):
        dim = len(polys)

        def fn(x):
            return np.array([[p(x) for p in row] for row in polys])

        return cls(dim, kind, fn, step=np.inf, polys=polys, symmetry=symmetry)

    @classmethod
    def constant(cls, matrix, kind, symmetry="symmetric"):
        matrix = np.asarray(matrix, dtype=float)
        dim = matrix.shape[0]
        polys = [[Poly.constant(dim, matrix[i, j]) for j in range(dim)]
                 for i in range(dim)]
        return cls.from_polys(polys, kind, symmetry)

    @property
    def mode(self):
        if self.polys is not None:
            return "polynomial"
        return "analytic" if self.gradient is not None else "fd"

    def __call__(self, x):
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)

    def partial(self, x, i):
        x = np.asarray(x, dtype=float)
        if self.polys is not None:
            return np.array([[p.diff(i)(x) for p in row] for row in self.polys])
        if self.gradient is not None:
            return np.asarray(self.gradient(x, i), dtype=float)
        e = np.zeros(self.dim)
        e[i] = self.step
        return (self(x + e) - self(x - e)) / (2.0 * self.step)

    def column_field(self, j) -> "VectorField":
        """Column j as a vector field (the image of the j-th coordinate field)."""
        if self.polys is not None:
            return VectorField.from_polys([row[j] for row in self.polys])
        return VectorField(self.dim, lambda x: self(x)[:, j], step=self.step)

    def apply(self, x_field: "VectorField") -> "VectorField":
        """Pointwise image field x -> T(x) X(x), staying exact when possible."""
        if self.polys is not None and x_field.polys is not None:
            comps = []
            for i in range(self.dim):
                acc = Poly(self.dim)
                for j in range(self.dim):
                    acc = acc + self.polys[i][j] * x_field.polys[j]
                comps.append(acc)
            return VectorField.from_polys(comps)
        step = min(self.step, x_field.step)
        return VectorField(self.dim, lambda x: self(x) @ x_field(x), step=step)


@dataclass
class Verdict:
    """Outcome of a grid check: worst residual against a tolerance."""

    passed: bool
    max_residual: float
    label: str = ""
    location: str = ""


# ---------------------------------------------------------------------------
# brackets and the bracket-defect tensor
# ---------------------------------------------------------------------------

def lie_bracket(x_field: VectorField, y_field: VectorField) -> VectorField:
    """[X, Y] = DY . X - DX . Y on a shared chart.

    Polynomial inputs give a polynomial bracket (exact); otherwise the
    bracket differentiates by central differences with the smaller of the
    two steps.  Raises ModeMismatch when the fields live on different
    dimensions.
    """
    if x_field.dim != y_field.dim:
        raise ModeMismatch(f"dimension {x_field.dim} vs {y_field.dim}")
    dim = x_field.dim
    if x_field.polys is not None and y_field.polys is not None:
        comps = []
        for i in range(dim):
            acc = Poly(dim)
            for j in range(dim):
                acc = acc + y_field.polys[i].diff(j) * x_field.polys[j]
                acc = acc - x_field.polys[i].diff(j) * y_field.polys[j]
            comps.append(acc)
        return VectorField.from_polys(comps)

    step = min(x_field.step, y_field.step)

    def fn(x):
        return y_field.jacobian(x) @ x_field(x) - x_field.jacobian(x) @ y_field(x)

    return VectorField(dim, fn, step=step)


def nijenhuis(a_field: TensorFieldOnChart, x_field: VectorField,
              y_field: VectorField, x):
    """Bracket-defect tensor of an endomorphism field at the point x:

        [AX, AY] - A [AX, Y] - A [X, AY] + A^2 [X, Y].
    """
    if a_field.kind != "1,1":
        raise ModeMismatch("defect tensor needs an endomorphism field")
    ax = a_field.apply(x_field)
    ay = a_field.apply(y_field)
    x = np.asarray(x, dtype=float)
    a = a_field(x)
    term1 = lie_bracket(ax, ay)(x)
    term2 = a @ lie_bracket(ax, y_field)(x)
    term3 = a @ lie_bracket(x_field, ay)(x)
    term4 = a @ (a @ lie_bracket(x_field, y_field)(x))
    return term1 - term2 - term3 + term4


def _structure_residual_at(field, kind, x, tol):
    value = field(x)
    n = field.dim
    scale = max(fro(value) ** 2, 1.0)
    if kind == "tangent":
        return fro(value @ value) / scale
    if kind == "para_complex":
        return fro(value @ value - np.eye(n)) / scale
    if kind == "complex":
        return fro(value @ value + np.eye(n)) / scale
    raise ValueError(f"unknown structure kind {kind!r}")


def is_integrable_structure(field: TensorFieldOnChart, kind, grid,
                            tol=1e-6) -> Verdict:
    """Evaluate the bracket-defect tensor on coordinate pairs over a grid.

    ``kind`` is "tangent", "para_complex" or "complex"; the verdict for a
    vanishing defect is labelled "integrable" for the first two and only
    "formally integrable" for complex structures (the defect vanishing is
    necessary but not known to be sufficient there).

    Raises InvalidStructureAtPoint when the field fails its pointwise
    algebraic identity somewhere on the grid.
    """
    dim = field.dim
    coords = [VectorField.coordinate(dim, i) for i in range(dim)]
    worst = 0.0
    where = ""
    for x in np.atleast_2d(grid):
        if _structure_residual_at(field, kind, x, tol) > 1e-6:
            raise InvalidStructureAtPoint(x, f"field is not a {kind} structure at {x}")
        for i in range(dim):
            for j in range(i + 1, dim):
                value = nijenhuis(field, coords[i], coords[j], x)
                resid = float(np.linalg.norm(value))
                if resid > worst:
                    worst = resid
                    where = np.array2string(np.asarray(x), precision=3)
    passed = worst <= tol
    if kind == "complex":
        label = "formally integrable" if passed else "not formally integrable"
    else:
        label = "integrable" if passed else "not integrable"
    return Verdict(passed, worst, label, where)


# ---------------------------------------------------------------------------
# metric connection and curvature
# ---------------------------------------------------------------------------

@dataclass
class ConnectionData:
    """Christoffel evaluator x -> Gamma[k, i, j] plus its source metric."""

    dim: int
    christoffel: Callable
    metric: TensorFieldOnChart
    step: float = DEFAULT_FD_STEP

    def __call__(self, x):
        return self.christoffel(np.asarray(x, dtype=float))


def levi_civita(metric: TensorFieldOnChart,
                tol: Tolerance = DEFAULT_TOL) -> ConnectionData:
    """Metric connection from the Koszul identity on coordinate fields.

    Works for any nondegenerate symmetric field (either signature).  The
    returned Christoffel array is symmetric in its lower indices by
    construction; degeneracy at an evaluation point raises
    DegenerateMetricAtPoint with the location.
    """
    if metric.kind != "2,0":
        raise ModeMismatch("connection needs a (2,0) metric field")
    dim = metric.dim

    def christoffel(x):
        g = metric(x)
        partials = np.stack([metric.partial(x, i) for i in range(dim)])
        # rhs[k, i, j] = (d_i g_jk + d_j g_ik - d_k g_ij) / 2
        rhs = 0.5 * (np.einsum("ijk->kij", partials)
                     + np.einsum("jik->kij", partials)
                     - np.einsum("kij->kij", partials))
        sv = np.linalg.svd(g, compute_uv=False)
        if sv[-1] <= tol.rank_threshold(sv[0]):
            raise DegenerateMetricAtPoint(x)
        return np.linalg.solve(g, rhs.reshape(dim, dim * dim)).reshape(dim, dim, dim)

    # exact-mode metrics carry an infinite step; the connection still needs a
    # finite one for the outer derivatives taken by curvature()
    step = metric.step if np.isfinite(metric.step) else DEFAULT_FD_STEP
    return ConnectionData(dim, christoffel, metric, step=step)


def curvature(conn: ConnectionData, x, step=None):
    """Curvature array R[i, j, k, l] of the connection at x.

        R[i, j, k, l] = d_k Gamma[i, l, j] - d_l Gamma[i, k, j]
                        + Gamma[i, k, m] Gamma[m, l, j]
                        - Gamma[i, l, m] Gamma[m, k, j]

    The Christoffel evaluator is differentiated by central differences with
    ``step`` (defaults to the connection's step).
    """
    x = np.asarray(x, dtype=float)
    dim = conn.dim
    h = float(step or conn.step)
    gamma = conn(x)
    dgamma = np.zeros((dim, dim, dim, dim))  # dgamma[a, k, i, j] = d_a Gamma[k,i,j]
    for a in range(dim):
        e = np.zeros(dim)
        e[a] = h
        dgamma[a] = (conn(x + e) - conn(x - e)) / (2.0 * h)
    riem = (np.einsum("kilj->ijkl", dgamma)
            - np.einsum("likj->ijkl", dgamma)
            + np.einsum("ikm,mlj->ijkl", gamma, gamma)
            - np.einsum("ilm,mkj->ijkl", gamma, gamma))
    return riem


def is_metric_integrable(metric: TensorFieldOnChart, grid, tol=1e-6,
                         step=None) -> Verdict:
    """Flatness check: the metric is an integrable structure iff R vanishes."""
    conn = levi_civita(metric)
    worst = 0.0
    where = ""
    for x in np.atleast_2d(grid):
        resid = float(np.linalg.norm(curvature(conn, x, step=step)))
        if resid > worst:
            worst = resid
            where = np.array2string(np.asarray(x), precision=3)
    return Verdict(worst <= tol, worst, "integrable" if worst <= tol else
                   "not integrable", where)


def covariant_derivative_of_structure(conn: ConnectionData,
                                      field: TensorFieldOnChart, grid,
                                      tol=1e-6) -> Verdict:
    """Max norm over the grid of the covariant derivative of a (1,1) field:

        (grad_i T)[j, k] = d_i T[j, k] + Gamma[j, i, m] T[m, k]
                                       - T[j, m] Gamma[m, i, k].

    A flat connection with a parallel structure field certifies that the
    constant normal form is attainable in some chart.
    """
    dim = conn.dim
    worst = 0.0
    where = ""
    for x in np.atleast_2d(grid):
        gamma = conn(x)
        t = field(x)
        for i in range(dim):
            dt = field.partial(x, i)
            nabla = dt + gamma[:, i, :] @ t - t @ gamma[:, i, :]
            resid = float(np.linalg.norm(nabla))
            if resid > worst:
                worst = resid
                where = np.array2string(np.asarray(x), precision=3)
    return Verdict(worst <= tol, worst, "parallel" if worst <= tol else
                   "not parallel", where)


def parallel_transport(conn: ConnectionData, path, vector, steps_per_leg=32):
    """Transport a vector along a polygonal path by RK4 on v' = -Gamma(x' , v).

    ``path`` is a sequence of waypoints; the transport integrates each leg
    with ``steps_per_leg`` Runge-Kutta steps.
    """
    v = np.asarray(vector, dtype=float).copy()
    path = [np.asarray(p, dtype=float) for p in path]
    for start, end in zip(path[:-1], path[1:]):
        direction = end - start
        dt = 1.0 / steps_per_leg

        def rate(t, vec):
            x = start + t * direction
            gamma = conn(x)
            return -np.einsum("kim,i,m->k", gamma, direction, vec)

        t = 0.0
        for _ in range(steps_per_leg):
            k1 = rate(t, v)
            k2 = rate(t + dt / 2, v + dt / 2 * k1)
            k3 = rate(t + dt / 2, v + dt / 2 * k2)
            k4 = rate(t + dt, v + dt * k3)
            v = v + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += dt
    return v


# ---------------------------------------------------------------------------
# built-in fields
# ---------------------------------------------------------------------------

class PolyMap:
    """Polynomial map R^d -> R^d with exact Jacobian entries."""

    def __init__(self, components: Sequence[Poly]):
        self.components = list(components)
        self.dim = self.components[0].dim
        self._jac = [[p.diff(j) for j in range(self.dim)] for p in self.components]

    def __call__(self, x):
        return np.array([p(x) for p in self.components])

    def jacobian_polys(self):
        return self._jac

    def jacobian(self, x):
        return np.array([[p(x) for p in row] for row in self._jac])


def random_quadratic_diffeo(dim, rng, scale=0.15):
    """x + quadratic perturbation, a diffeomorphism on [-0.5, 0.5]^dim.

    The quadratic coefficients are bounded so the Jacobian stays within
    distance < 1 of the identity on the box.
    """
    comps = []
    for i in range(dim):
        p = Poly.coordinate(dim, i)
        for a in range(dim):
            for b in range(a, dim):
                expo = [0] * dim
                expo[a] += 1
                expo[b] += 1
                p = p + Poly(dim, {tuple(expo): scale * rng.uniform(-1.0, 1.0)})
        comps.append(p)
    return PolyMap(comps)


def pullback_metric(phi: PolyMap, constant_metric_matrix) -> TensorFieldOnChart:
    """Pullback of a constant metric: g(x) = DPhi(x)^T G0 DPhi(x), polynomial."""
    g0 = np.asarray(constant_metric_matrix, dtype=float)
    dim = phi.dim
    jac = phi.jacobian_polys()
    entries = [[Poly(dim) for _ in range(dim)] for _ in range(dim)]
    for i in range(dim):
        for j in range(dim):
            acc = Poly(dim)
            for a in range(dim):
                for b in range(dim):
                    if g0[a, b]:
                        acc = acc + jac[a][i] * jac[b][j] * g0[a, b]
            entries[i][j] = acc
    return TensorFieldOnChart.from_polys(entries, "2,0")


def pullback_endomorphism(phi: PolyMap, constant_matrix,
                          step=DEFAULT_FD_STEP) -> TensorFieldOnChart:
    """Pullback of a constant endomorphism: T(x) = DPhi(x)^-1 T0 DPhi(x).

    The inverse Jacobian is not polynomial, so this field lives in FD mode.
    """
    t0 = np.asarray(constant_matrix, dtype=float)

    def fn(x):
        j = phi.jacobian(x)
        return np.linalg.solve(j, t0 @ j)

    return TensorFieldOnChart(phi.dim, "1,1", fn, step=step, symmetry="none")


def sphere_stereographic_metric(step=DEFAULT_FD_STEP) -> TensorFieldOnChart:
    """Round-sphere metric 4/(1 + |x|^2)^2 delta on R^2, analytic derivatives."""

    def factor(x):
        return 4.0 / (1.0 + float(x @ x)) ** 2

    def fn(x):
        return factor(x) * np.eye(2)

    def gradient(x, i):
        r2 = float(x @ x)
        return (-16.0 * x[i] / (1.0 + r2) ** 3) * np.eye(2)

    return TensorFieldOnChart(2, "2,0", fn, step=step, gradient=gradient)


def constant_field(matrix, kind="2,0", symmetry="symmetric") -> TensorFieldOnChart:
    return TensorFieldOnChart.constant(matrix, kind, symmetry)
