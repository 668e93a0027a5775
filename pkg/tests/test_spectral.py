"""Spectral kernels: eigen/SVD wrappers, thresholded projectors, sin-theta,
and the tensor-product projections."""

import numpy as np
import pytest

from spectc import (
    SpectralProjector,
    Tensor,
    apply_mode_projection,
    frobenius,
    identity_projector,
    pattern_for_order,
    sin_theta,
    svd,
    sym_eig,
    threshold_projector,
    unfold,
)


class TestSymEig:
    def test_diagonal(self):
        w, v = sym_eig(np.diag([3.0, 1.0]))
        np.testing.assert_allclose(w, [3.0, 1.0])
        np.testing.assert_allclose(np.abs(v), np.eye(2), atol=1e-12)

    def test_swap_matrix(self):
        w, v = sym_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(w, [1.0, -1.0], atol=1e-12)
        np.testing.assert_allclose(np.abs(v), np.full((2, 2), 1 / np.sqrt(2)), atol=1e-12)

    def test_reconstruction(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((8, 8))
        m = (a + a.T) / 2
        w, v = sym_eig(m)
        np.testing.assert_allclose(v @ np.diag(w) @ v.T, m, atol=1e-10)
        assert np.all(np.diff(w) <= 1e-12)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            sym_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestSvd:
    def test_zero_matrix(self):
        _, s, _ = svd(np.zeros((3, 4)))
        assert np.all(s == 0)

    def test_signs_absorbed(self):
        _, s, _ = svd(np.diag([2.0, -3.0]))
        np.testing.assert_allclose(s, [3.0, 2.0])

    def test_top_singular_value_is_op_norm(self):
        rng = np.random.default_rng(1)
        m = rng.standard_normal((6, 9))
        _, s, _ = svd(m)
        assert s[0] == pytest.approx(np.linalg.norm(m, 2))


class TestThresholdProjector:
    def test_identity_keeps_everything(self):
        q = threshold_projector(np.eye(3), 0.5)
        assert q.rank == 3
        np.testing.assert_allclose(q.matrix(), np.eye(3), atol=1e-12)

    def test_partial_selection(self):
        q = threshold_projector(np.diag([3.0, 1.0]), 2.0)
        assert q.rank == 1
        np.testing.assert_allclose(q.matrix(), np.diag([1.0, 0.0]), atol=1e-12)

    def test_threshold_above_top_gives_rank_zero(self):
        q = threshold_projector(np.diag([3.0, 1.0]), 5.0)
        assert q.rank == 0
        assert not np.any(q.matrix())

    def test_cutoff_is_inclusive(self):
        q = threshold_projector(np.diag([2.0, 1.0]), 1.0)
        assert q.rank == 2

    def test_left_singular_mode(self):
        m = np.array([[0.0, 2.0], [1.0, 0.0]])
        q = threshold_projector(m, 1.5, mode="left-singular")
        assert q.rank == 1
        np.testing.assert_allclose(q.matrix(), np.diag([1.0, 0.0]), atol=1e-12)

    def test_orthonormal_and_fixes_selected_eigenvectors(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal((7, 7))
        m = (a + a.T) / 2
        w, v = sym_eig(m)
        cut = w[3]
        q = threshold_projector(m, cut)
        np.testing.assert_allclose(q.basis.T @ q.basis, np.eye(q.rank), atol=1e-10)
        p = q.matrix()
        np.testing.assert_allclose(p @ p, p, atol=1e-10)
        for i in range(4):
            np.testing.assert_allclose(q.apply(v[:, i]), v[:, i], atol=1e-8)


class TestSinTheta:
    def test_identical_subspaces(self):
        p = SpectralProjector(np.eye(3)[:, :2])
        assert sin_theta(p, p) == 0.0

    def test_orthogonal_lines(self):
        p = SpectralProjector(np.eye(2)[:, :1])
        u = SpectralProjector(np.eye(2)[:, 1:])
        assert sin_theta(p, u) == pytest.approx(1.0)

    def test_rotated_line_analytic(self):
        # Hand expansion: (I - u u^T) e1 e1^T has top singular value |sin t|.
        theta = np.pi / 6
        p = SpectralProjector(np.array([[1.0], [0.0]]))
        u = SpectralProjector(np.array([[np.cos(theta)], [np.sin(theta)]]))
        assert sin_theta(p, u) == pytest.approx(0.5, abs=1e-10)

    def test_symmetric_for_equal_dims_and_bounded(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            a = np.linalg.qr(rng.standard_normal((6, 2)))[0]
            b = np.linalg.qr(rng.standard_normal((6, 2)))[0]
            pa, pb = SpectralProjector(a), SpectralProjector(b)
            d1, d2 = sin_theta(pa, pb), sin_theta(pb, pa)
            assert 0.0 <= d1 <= 1.0
            assert d1 == pytest.approx(d2, abs=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            sin_theta(identity_projector(2), identity_projector(3))


class TestModeProjection:
    def test_pattern_for_order(self):
        assert pattern_for_order(3) == "qqq"
        assert pattern_for_order(4) == "qq"
        assert pattern_for_order(6) == "qq"
        assert pattern_for_order(5) == "qqi"
        with pytest.raises(ValueError):
            pattern_for_order(2)

    def test_identity_projector_is_noop(self):
        rng = np.random.default_rng(4)
        cases = [
            (3, 2, "qqq", 2),
            (4, 2, "qq", 4),
            (5, 2, "qqi", 4),
            (3, 2, "qi", 4),
        ]
        for k, d, pattern, ambient in cases:
            t = Tensor(rng.standard_normal((d,) * k))
            out = apply_mode_projection(t, identity_projector(ambient), pattern)
            np.testing.assert_allclose(out.values, t.values, atol=1e-12)

    def test_rank_one_projector_on_all_ones(self):
        # Hand application of e1 e1^T along each of the three modes.
        q = SpectralProjector(np.array([[1.0], [0.0]]))
        t = Tensor(np.ones((2, 2, 2)))
        out = apply_mode_projection(t, q, "qqq")
        expected = np.zeros((2, 2, 2))
        expected[0, 0, 0] = 1.0
        np.testing.assert_allclose(out.values, expected, atol=1e-12)

    def test_idempotence(self):
        rng = np.random.default_rng(5)
        basis = np.linalg.qr(rng.standard_normal((4, 2)))[0]
        q = SpectralProjector(basis)
        t = Tensor(rng.standard_normal((2,) * 4))
        once = apply_mode_projection(t, q, "qq")
        twice = apply_mode_projection(once, q, "qq")
        np.testing.assert_allclose(twice.values, once.values, atol=1e-10)

    def test_qq_matches_dense_kronecker(self):
        rng = np.random.default_rng(6)
        basis = np.linalg.qr(rng.standard_normal((4, 2)))[0]
        q = SpectralProjector(basis)
        t = Tensor(rng.standard_normal((2,) * 4))
        out = apply_mode_projection(t, q, "qq")
        dense = np.kron(q.matrix(), q.matrix())
        np.testing.assert_allclose(
            out.values.ravel(), dense @ t.values.ravel(), atol=1e-10
        )

    def test_qqq_matches_dense_kronecker(self):
        rng = np.random.default_rng(7)
        basis = np.linalg.qr(rng.standard_normal((2, 1)))[0]
        q = SpectralProjector(basis)
        t = Tensor(rng.standard_normal((2, 2, 2)))
        out = apply_mode_projection(t, q, "qqq")
        p = q.matrix()
        dense = np.kron(np.kron(p, p), p)
        np.testing.assert_allclose(
            out.values.ravel(), dense @ t.values.ravel(), atol=1e-10
        )

    def test_qi_matches_unfolding_action(self):
        rng = np.random.default_rng(8)
        basis = np.linalg.qr(rng.standard_normal((9, 3)))[0]
        q = SpectralProjector(basis)
        t = Tensor(rng.standard_normal((3, 3, 3)))
        out = apply_mode_projection(t, q, "qi")
        m = unfold(t, 2, 1).values
        np.testing.assert_allclose(
            unfold(out, 2, 1).values, q.matrix() @ m, atol=1e-10
        )

    def test_contracts_frobenius_norm(self):
        rng = np.random.default_rng(9)
        for k, pattern, ambient in [(3, "qqq", 3), (4, "qq", 9), (3, "qi", 9)]:
            t = Tensor(rng.standard_normal((3,) * k))
            basis = np.linalg.qr(rng.standard_normal((ambient, 2)))[0]
            out = apply_mode_projection(t, SpectralProjector(basis), pattern)
            assert frobenius(out) <= frobenius(t) + 1e-12

    def test_shape_mismatch_rejected(self):
        t = Tensor(np.zeros((2, 2, 2)))
        with pytest.raises(ValueError):
            apply_mode_projection(t, identity_projector(3), "qqq")
        with pytest.raises(ValueError):
            apply_mode_projection(t, identity_projector(2), "qq")
