import numpy as np
import pytest

from tensorstruct.calculus import constant_field, grid_points, is_integrable_structure
from tensorstruct.errors import ShapeMismatch
from tensorstruct.loopspace import (
    DiscretizedLoopSpace,
    ascending_coherence,
    block_kahler_target,
    block_para_target,
    check_induced_compatibility,
    induced_forms,
)

RNG = np.random.default_rng(20240813)


def unit_circle_loop(n, dim):
    angles = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    loop = np.zeros((n, dim))
    loop[:, 0] = np.cos(angles)
    loop[:, 1] = np.sin(angles)
    return loop


def test_weights_default_uniform_and_validated():
    space = DiscretizedLoopSpace(block_kahler_target(1), unit_circle_loop(8, 2))
    np.testing.assert_allclose(space.weights, np.full(8, 1 / 8))
    with pytest.raises(ValueError):
        DiscretizedLoopSpace(block_kahler_target(1), unit_circle_loop(8, 2),
                             weights=np.full(8, 1.0))


def test_constant_tangents_reproduce_target_values():
    target = block_kahler_target(1)
    space = DiscretizedLoopSpace(target, unit_circle_loop(8, 2))
    x = np.tile([1.0, 0.0], (8, 1))
    y = np.tile([0.0, 1.0], (8, 1))
    o, g, _ = induced_forms(space, x, y)
    assert o == pytest.approx(target.omega(np.array([1.0, 0.0]),
                                           np.array([0.0, 1.0])))
    assert g == pytest.approx(0.0, abs=1e-14)


def test_structure_image_links_form_and_metric():
    target = block_kahler_target(2)
    space = DiscretizedLoopSpace(target, unit_circle_loop(8, 4))
    x = RNG.normal(size=(8, 4))
    _, _, ix = induced_forms(space, x, x)
    o_x_ix, g_xx, _ = induced_forms(space, x, ix)
    # with Y = I X pointwise: g(X, X) = Omega(X, I X) = Omega(X, Y)
    _, g_plain, _ = induced_forms(space, x, x)
    assert g_plain == pytest.approx(o_x_ix)


def test_induced_form_antisymmetric_exactly():
    target = block_kahler_target(1)
    space = DiscretizedLoopSpace(target, unit_circle_loop(16, 2))
    x = RNG.normal(size=(16, 2))
    y = RNG.normal(size=(16, 2))
    o_xy, _, _ = induced_forms(space, x, y)
    o_yx, _, _ = induced_forms(space, y, x)
    assert o_xy == pytest.approx(-o_yx, abs=1e-14)


def test_induced_compatibility_kahler():
    space = DiscretizedLoopSpace(block_kahler_target(1), unit_circle_loop(8, 2))
    rep = check_induced_compatibility(space, trials=20, rng=np.random.default_rng(1))
    assert rep.passed


def test_induced_compatibility_para_reports_signature():
    space = DiscretizedLoopSpace(block_para_target(1), unit_circle_loop(8, 2))
    rep = check_induced_compatibility(space, trials=20, rng=np.random.default_rng(2))
    assert rep.passed
    sig_entries = [e for e in rep.entries if e.name == "metric_neutral"]
    assert sig_entries and "(8, 8)" in sig_entries[0].location


def test_mismatched_structure_fails_compatibility():
    from tensorstruct.compat import CompatibleTriple
    from tensorstruct.structures import ComplexStructure

    good = block_kahler_target(1)
    bad = CompatibleTriple(good.omega, good.metric,
                           ComplexStructure(-good.structure.matrix), "kahler")
    space = DiscretizedLoopSpace(bad, unit_circle_loop(8, 2))
    rep = check_induced_compatibility(space, trials=10, rng=np.random.default_rng(3))
    assert not rep.passed


def test_tangent_shape_mismatch_raises():
    space = DiscretizedLoopSpace(block_kahler_target(1), unit_circle_loop(8, 2))
    with pytest.raises(ShapeMismatch):
        induced_forms(space, np.zeros((4, 2)), np.zeros((8, 2)))


# ---------------------------------------------------------------------------
# quadrature behaviour
# ---------------------------------------------------------------------------

def test_refinement_exact_for_constant_integrands():
    target = block_kahler_target(1)
    x = np.array([1.0, 0.5])
    y = np.array([-0.3, 2.0])
    vals = []
    for n in (8, 16, 32):
        space = DiscretizedLoopSpace(target, unit_circle_loop(n, 2))
        o, g, _ = induced_forms(space, np.tile(x, (n, 1)), np.tile(y, (n, 1)))
        vals.append((o, g))
    for other in vals[1:]:
        assert vals[0][0] == pytest.approx(other[0], abs=1e-14)
        assert vals[0][1] == pytest.approx(other[1], abs=1e-14)


def test_refinement_converges_for_smooth_integrands():
    # X_t depends smoothly on the sample angle; compare against the N = 4096
    # reference and watch the error drop as N doubles
    target = block_kahler_target(1)

    def tangents(n):
        angles = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        x = np.stack([np.cos(angles) + 0.2, np.sin(2 * angles)], axis=1)
        y = np.stack([np.sin(angles) - 0.1, np.cos(angles) ** 2], axis=1)
        return x, y

    def value(n):
        space = DiscretizedLoopSpace(target, unit_circle_loop(n, 2))
        x, y = tangents(n)
        return induced_forms(space, x, y)[0]

    reference = value(4096)
    errs = [abs(value(n) - reference) for n in (8, 16, 32)]
    assert errs[0] > errs[1] > errs[2] or errs[0] <= 1e-12


def test_pointwise_defect_vanishes_for_constant_target_structure():
    # the induced structure acts pointwise by the constant target structure,
    # whose bracket defect vanishes identically
    target = block_kahler_target(2)
    field = constant_field(target.structure.matrix, "1,1", "none")
    grid = grid_points([-0.5] * 4, [0.5] * 4, 2)
    verdict = is_integrable_structure(field, "complex", grid, tol=1e-9)
    assert verdict.passed
    assert verdict.label == "formally integrable"


# ---------------------------------------------------------------------------
# ascending families
# ---------------------------------------------------------------------------

def test_ascending_coherence_kahler_three_levels():
    targets = [block_kahler_target(m) for m in (1, 2, 3)]
    rep = ascending_coherence(targets, samples=8, rng=np.random.default_rng(4))
    assert rep.passed
    agreement = [e for e in rep.entries if e.name.startswith("induced_agreement")]
    assert agreement and all(e.residual <= 1e-12 for e in agreement)


def test_ascending_coherence_para_variant():
    targets = [block_para_target(m) for m in (1, 2, 3)]
    rep = ascending_coherence(targets, samples=8, rng=np.random.default_rng(5))
    assert rep.passed


def test_ascending_coherence_detects_perturbed_level():
    from tensorstruct.compat import CompatibleTriple
    from tensorstruct.structures import ComplexStructure

    targets = [block_kahler_target(m) for m in (1, 2, 3)]
    bad_matrix = targets[1].structure.matrix.copy()
    bad_matrix[0, 1] += 1e-3
    targets[1] = CompatibleTriple(targets[1].omega, targets[1].metric,
                                  ComplexStructure(bad_matrix), "kahler")
    rep = ascending_coherence(targets, samples=8, rng=np.random.default_rng(6))
    failed = {e.name for e in rep.failures()}
    assert any(name.startswith("structure/coherent[0,1]")
               or name.startswith("structure/coherent[1,2]") for name in failed)
