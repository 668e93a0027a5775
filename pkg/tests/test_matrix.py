"""Column-space machinery: the debiased Gram estimator (with brute-force
mask-enumeration oracles), incoherence and coherence diagnostics, unfolding
parameters, and partial column completion."""

import itertools

import numpy as np
import pytest

from spectc import (
    RandomTensorSpec,
    SpectralProjector,
    Tensor,
    coherence,
    complete_column,
    debiased_gram,
    from_components,
    generate,
    incoherence_params,
    unfolding_params,
)


def enumerate_masks(shape):
    """All 2^(prod shape) reveal indicators with their Bernoulli weights."""
    cells = int(np.prod(shape))
    for bits in itertools.product((0, 1), repeat=cells):
        yield np.array(bits, dtype=float).reshape(shape)


def bernoulli_weight(indicator, delta):
    ones = indicator.sum()
    return delta**ones * (1 - delta) ** (indicator.size - ones)


class TestDebiasedGram:
    def test_full_observation_is_plain_gram(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((3, 5))
        np.testing.assert_allclose(debiased_gram(x, 1.0), x @ x.T, atol=1e-12)

    def test_hand_computed_two_by_two(self):
        y = np.array([[1.0, 2.0], [3.0, 4.0]])
        # Y Y^T = [[5, 11], [11, 25]]; diagonal x2, off-diagonal x4.
        np.testing.assert_allclose(
            debiased_gram(y, 0.5), [[10.0, 44.0], [44.0, 50.0]], atol=1e-12
        )

    @pytest.mark.parametrize("delta", [0.25, 0.5, 0.75])
    def test_unbiased_under_mask_enumeration(self, delta):
        x = np.array([[1.0, 2.0], [3.0, 4.0]])
        expected = x @ x.T
        average = np.zeros((2, 2))
        for indicator in enumerate_masks((2, 2)):
            average += bernoulli_weight(indicator, delta) * debiased_gram(
                x * indicator, delta
            )
        np.testing.assert_allclose(average, expected, atol=1e-12)

    def test_rejects_bad_delta(self):
        with pytest.raises(ValueError):
            debiased_gram(np.eye(2), 0.0)
        with pytest.raises(ValueError):
            debiased_gram(np.eye(2), 1.5)

    def test_error_concentrates_as_samples_double(self):
        # Wide rank-3 matrix, 20 trials per sample size: the median operator
        # norm error of the debiased Gram never increases as n doubles.
        from spectc import stream_rng

        d1, d2, r = 50, 2500, 3
        rng = stream_rng(31, 0)
        u = np.linalg.qr(rng.standard_normal((d1, r)))[0]
        v = np.linalg.qr(rng.standard_normal((d2, r)))[0]
        x = u @ v.T
        target = x @ x.T
        unit = r * np.sqrt(d1 * d2)
        medians = []
        for c in (2, 4, 8, 16):
            n = int(round(c * unit))
            delta = n / (d1 * d2)
            errors = []
            for trial in range(20):
                trng = stream_rng(31, c, trial)
                keep = np.zeros(d1 * d2, dtype=bool)
                keep[trng.choice(d1 * d2, size=n, replace=False)] = True
                gram = debiased_gram(x * keep.reshape(d1, d2), delta)
                errors.append(np.linalg.norm(gram - target, 2))
            medians.append(np.median(errors))
        assert all(b <= a for a, b in zip(medians, medians[1:]))


class TestIncoherenceParams:
    def test_identity(self):
        p = incoherence_params(np.eye(4))
        assert p.lam == pytest.approx(4.0)
        assert p.rho == pytest.approx(4.0)
        assert p.gamma == pytest.approx(1.0)

    def test_single_entry(self):
        x = np.zeros((2, 2))
        x[0, 0] = 1.0
        p = incoherence_params(x)
        assert (p.lam, p.rho, p.gamma) == pytest.approx((2.0, 2.0, 1.0))

    def test_conditions_hold_with_equality(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((4, 7))
        p = incoherence_params(x)
        op2 = np.linalg.norm(x, 2) ** 2
        assert 4 * np.max(np.sum(x**2, axis=1)) == pytest.approx(p.lam * op2)
        assert 7 * np.max(np.sum(x**2, axis=0)) == pytest.approx(p.rho * op2)
        assert 28 * np.max(x**2) == pytest.approx(p.lam * p.gamma * p.rho * op2)

    def test_consistent_with_svd_coherences(self):
        # For X = U D V^T of rank r the triple (r coher_U, r coher_V, 1)
        # also satisfies the conditions, so the minimal lam/rho cannot
        # exceed those values and the entry bound closes with gamma <= 1.
        rng = np.random.default_rng(2)
        for _ in range(10):
            u = np.linalg.qr(rng.standard_normal((6, 3)))[0]
            v = np.linalg.qr(rng.standard_normal((11, 3)))[0]
            x = u @ np.diag([3.0, 2.0, 1.0]) @ v.T
            p = incoherence_params(x)
            cu, cv = coherence(u), coherence(v)
            assert p.lam <= 3 * cu + 1e-9
            assert p.rho <= 3 * cv + 1e-9
            op2 = np.linalg.norm(x, 2) ** 2
            assert 66 * np.max(x**2) <= 9 * cu * cv * op2 + 1e-9

    def test_minimal_bounds_hold(self):
        # 1/d1 <= lam <= d1, 1/d2 <= rho <= d2, 1 <= lam*gamma*rho <= d1*d2.
        rng = np.random.default_rng(3)
        for trial in range(200):
            d1, d2 = rng.integers(2, 7, size=2)
            kind = trial % 3
            if kind == 0:
                x = rng.standard_normal((d1, d2))
            elif kind == 1:
                x = np.outer(rng.standard_normal(d1), rng.standard_normal(d2))
            else:
                x = np.zeros((d1, d2))
                x[rng.integers(d1), rng.integers(d2)] = rng.standard_normal() or 1.0
            p = incoherence_params(x)
            assert 1 / d1 - 1e-9 <= p.lam <= d1 + 1e-9
            assert 1 / d2 - 1e-9 <= p.rho <= d2 + 1e-9
            assert 1 - 1e-9 <= p.lam * p.gamma * p.rho <= d1 * d2 + 1e-9

    def test_zero_matrix_rejected(self):
        with pytest.raises(ValueError):
            incoherence_params(np.zeros((2, 2)))


class TestCoherence:
    def test_full_space(self):
        assert coherence(np.eye(5)) == pytest.approx(1.0)

    def test_standard_basis_vector(self):
        e1 = np.zeros((6, 1))
        e1[0, 0] = 1.0
        assert coherence(e1) == pytest.approx(6.0)

    def test_flat_vector(self):
        m = 8
        flat = np.full((m, 1), 1 / np.sqrt(m))
        assert coherence(flat) == pytest.approx(1.0)

    def test_bounds(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            m, r = 9, int(rng.integers(1, 5))
            basis = np.linalg.qr(rng.standard_normal((m, r)))[0]
            c = coherence(basis)
            assert 1 - 1e-9 <= c <= m / r + 1e-9

    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValueError):
            coherence(np.ones((4, 2)))


class TestUnfoldingParams:
    def test_indicator_tensor(self):
        for d in (2, 4):
            v = np.zeros((d,) * 3)
            v[0, 0, 0] = 1.0
            p = unfolding_params(Tensor(v, symmetric=True))
            assert p.rank == 1
            assert p.alpha == pytest.approx(d**3)
            assert p.mu == pytest.approx(1.0)

    def test_bounds_on_random_tensors(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            d = int(rng.integers(2, 5))
            k = int(rng.choice([3, 4]))
            r = int(rng.integers(1, 4))
            comps = rng.standard_normal((r, d))
            t = from_components(comps, k)
            p = unfolding_params(t)
            assert 1 - 1e-9 <= p.alpha <= d**k + 1e-9
            assert 1 - 1e-9 <= p.mu <= p.rank + 1e-9

    def test_gaussian_model_asymptotics(self):
        # d=50, r=4 components with covariance I/d: the balanced unfolding
        # has rank 4, a flat spectrum (mu near 1), and entry spread alpha
        # tracking (2 ln d)^3 / r. Single seeds scatter widely (the max
        # entry enters to the sixth power), so assert on medians.
        params = [
            unfolding_params(generate(RandomTensorSpec(dim=50, rank=4, seed=s))[0])
            for s in range(30)
        ]
        assert all(p.rank == 4 for p in params)
        assert 0.5 <= np.median([p.mu for p in params]) <= 2.0
        predicted = (2 * np.log(50)) ** 3 / 4
        assert predicted / 2 <= np.median([p.alpha for p in params]) <= predicted * 2

    def test_zero_tensor_rejected(self):
        with pytest.raises(ValueError):
            unfolding_params(Tensor(np.zeros((2, 2, 2))))


class TestCompleteColumn:
    def test_identity_on_span(self):
        basis = np.linalg.qr(np.random.default_rng(6).standard_normal((5, 2)))[0]
        q = SpectralProjector(basis)
        y = basis @ np.array([1.0, -2.0])
        np.testing.assert_allclose(complete_column(q, y, 1.0), y, atol=1e-12)

    def test_rank_zero_projector(self):
        q = SpectralProjector(np.zeros((4, 0)))
        np.testing.assert_array_equal(complete_column(q, np.ones(4), 0.5), np.zeros(4))

    def test_unbiased_under_column_mask_enumeration(self):
        # Rank-1 X = u v^T, column j observed entrywise with chance 1/2:
        # averaging Q y / delta over all 16 masks recovers the column.
        rng = np.random.default_rng(7)
        u = rng.standard_normal(4)
        u /= np.linalg.norm(u)
        v = rng.standard_normal(3)
        q = SpectralProjector(u[:, None])
        column = u * v[1]
        delta = 0.5
        average = np.zeros(4)
        for indicator in enumerate_masks((4,)):
            average += bernoulli_weight(indicator, delta) * complete_column(
                q, column * indicator, delta
            )
        np.testing.assert_allclose(average, column, atol=1e-12)

    def test_rejects_bad_fraction(self):
        q = SpectralProjector(np.eye(3)[:, :1])
        with pytest.raises(ValueError):
            complete_column(q, np.zeros(3), 0.0)
