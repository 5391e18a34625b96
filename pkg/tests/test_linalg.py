import numpy as np
import pytest

from tensorstruct.errors import DimensionMismatch, NotPositiveDefinite, NotSymmetric
from tensorstruct.linalg import (
    Tolerance,
    kernel_and_image,
    metric_adjoint,
    signature_of,
    spd_sqrt,
)

RNG = np.random.default_rng(20240811)


def random_orthogonal(n, rng=RNG):
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def random_spd(n, rng=RNG, shift=0.5):
    m = rng.normal(size=(n, n))
    return m @ m.T + shift * np.eye(n)


def test_tolerance_rejects_degenerate_settings():
    with pytest.raises(ValueError):
        Tolerance(atol=-1.0)
    with pytest.raises(ValueError):
        Tolerance(atol=0.0, rtol=0.0)


def test_spd_sqrt_identity():
    np.testing.assert_allclose(spd_sqrt(np.eye(4)), np.eye(4), atol=1e-14)


def test_spd_sqrt_diagonal():
    np.testing.assert_allclose(spd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]),
                               atol=1e-14)


def test_spd_sqrt_against_eigendecomposition_oracle():
    # oracle: build m = Q^T D Q with known D, so sqrt(m) = Q^T sqrt(D) Q
    d = np.diag([0.3, 1.0, 2.5, 7.0, 11.0])
    q = random_orthogonal(5)
    m = q.T @ d @ q
    expected = q.T @ np.sqrt(d) @ q
    np.testing.assert_allclose(spd_sqrt(m), expected, atol=1e-12)


def test_spd_sqrt_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        spd_sqrt(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_spd_sqrt_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        spd_sqrt(np.diag([1.0, -2.0]))


def test_spd_sqrt_squares_back_randomized():
    # squaring the root recovers the input: 500 random SPD matrices, dims 1..20
    rng = np.random.default_rng(7)
    for _ in range(500):
        n = int(rng.integers(1, 21))
        m = random_spd(n, rng)
        r = spd_sqrt(m)
        assert np.linalg.norm(r @ r - m) <= 1e-9 * np.linalg.norm(m) + 1e-9
        np.testing.assert_allclose(r, r.T, atol=1e-12)


def test_metric_adjoint_euclidean_is_transpose():
    a = RNG.normal(size=(4, 4))
    np.testing.assert_allclose(metric_adjoint(a, np.eye(4)), a.T, atol=1e-14)


def test_metric_adjoint_fixed_point_for_self_adjoint_input():
    g = random_spd(4)
    b = RNG.normal(size=(4, 4))
    a = np.linalg.solve(g, b + b.T)  # g-self-adjoint by construction
    np.testing.assert_allclose(metric_adjoint(a, g), a, atol=1e-10)


def test_metric_adjoint_inner_product_identity():
    # oracle: direct evaluation of g(A*u, v) = g(u, Av) on random pairs
    g = random_spd(5)
    a = RNG.normal(size=(5, 5))
    astar = metric_adjoint(a, g)
    for _ in range(20):
        u = RNG.normal(size=5)
        v = RNG.normal(size=5)
        lhs = (astar @ u) @ g @ v
        rhs = u @ g @ (a @ v)
        assert abs(lhs - rhs) <= 1e-9 * max(abs(lhs), 1.0)


def test_metric_adjoint_is_involution():
    rng = np.random.default_rng(13)
    for _ in range(50):
        n = int(rng.integers(2, 9))
        g = random_spd(n, rng)
        a = rng.normal(size=(n, n))
        back = metric_adjoint(metric_adjoint(a, g), g)
        assert np.linalg.norm(back - a) <= 1e-12 * max(np.linalg.norm(a), 1.0) * np.linalg.cond(g)


def test_metric_adjoint_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        metric_adjoint(np.eye(3), np.eye(4))


def test_kernel_and_image_zero_matrix():
    kernel, image, rank = kernel_and_image(np.zeros((3, 3)))
    assert rank == 0
    assert kernel.shape == (3, 3)
    assert image.shape == (3, 0)


def test_kernel_and_image_identity():
    kernel, image, rank = kernel_and_image(np.eye(3))
    assert rank == 3
    assert kernel.shape == (3, 0)


def test_kernel_and_image_hand_row_reduction():
    # [[0,1],[0,0]] kills e1 and sends e2 to e1
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    kernel, image, rank = kernel_and_image(a)
    assert rank == 1
    np.testing.assert_allclose(np.abs(kernel[:, 0]), [1.0, 0.0], atol=1e-14)
    np.testing.assert_allclose(np.abs(image[:, 0]), [1.0, 0.0], atol=1e-14)


def test_kernel_and_image_reconstruction_properties():
    rng = np.random.default_rng(5)
    for _ in range(50):
        rows = int(rng.integers(1, 8))
        cols = int(rng.integers(1, 8))
        target_rank = int(rng.integers(0, min(rows, cols) + 1))
        a = (rng.normal(size=(rows, target_rank)) @ rng.normal(size=(target_rank, cols))
             if target_rank else np.zeros((rows, cols)))
        kernel, image, rank = kernel_and_image(a)
        assert rank + kernel.shape[1] == cols
        if kernel.shape[1]:
            assert np.linalg.norm(a @ kernel) <= 1e-8 * max(np.linalg.norm(a), 1.0)
        # image basis spans the column space: project a random a @ x back
        x = rng.normal(size=cols)
        y = a @ x
        resid = y - image @ (image.T @ y)
        assert np.linalg.norm(resid) <= 1e-8 * max(np.linalg.norm(y), 1.0)


def test_rank_threshold_borderline():
    # documented policy: singular values below atol + rtol * smax are zero
    tol = Tolerance(atol=1e-6, rtol=0.0)
    a = np.diag([1.0, 1e-7])
    assert kernel_and_image(a, tol)[2] == 1
    a = np.diag([1.0, 1e-5])
    assert kernel_and_image(a, tol)[2] == 2


def test_signature_of_minkowski():
    assert signature_of(np.diag([1.0, -1.0])) == (1, 1, 0)
    assert signature_of(np.diag([2.0, 3.0, -5.0])) == (2, 1, 0)
    assert signature_of(np.zeros((2, 2))) == (0, 0, 2)
