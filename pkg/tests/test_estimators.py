"""Scikit-learn facing surface: parameter plumbing, NaN-array inputs,
and agreement with the functional API."""

import numpy as np
import pytest
from sklearn.base import clone

from spectc import (
    ContractionCompleter,
    RandomTensorSpec,
    UnfoldConfig,
    UnfoldingCompleter,
    complete_unfold,
    generate,
    project_mask,
    sample_mask_exact,
    stream_rng,
)
from spectc.errors import ConfigError
from spectc.validation import as_partial_tensor, check_cubic, check_orthonormal


def observed_with_nans(seed=0, d=6, rank=2, n=120):
    t, _ = generate(RandomTensorSpec(dim=d, rank=rank, seed=seed))
    mask = sample_mask_exact(3, d, n, stream_rng(seed, 1))
    dense = np.where(mask.indicator(), t.values, np.nan)
    return t, mask, dense


class TestValidationHelpers:
    def test_check_cubic(self):
        assert check_cubic(np.zeros((4, 4, 4))) == (3, 4)
        with pytest.raises(ValueError):
            check_cubic(np.zeros((2, 3, 2)))
        with pytest.raises(ValueError):
            check_cubic(np.zeros(5))

    def test_as_partial_tensor_from_nan_array(self):
        t, mask, dense = observed_with_nans()
        pt = as_partial_tensor(dense)
        assert pt.mask.flat.tolist() == mask.flat.tolist()
        np.testing.assert_array_equal(pt.values, project_mask(t, mask).values)

    def test_as_partial_tensor_passthrough(self):
        t, mask, _ = observed_with_nans()
        pt = project_mask(t, mask)
        assert as_partial_tensor(pt) is pt

    def test_check_orthonormal(self):
        q = np.linalg.qr(np.random.default_rng(0).standard_normal((5, 2)))[0]
        check_orthonormal(q)
        with pytest.raises(ValueError):
            check_orthonormal(np.ones((4, 2)))


class TestUnfoldingCompleter:
    def test_get_set_params_and_clone(self):
        est = UnfoldingCompleter(lambda_star=0.3, seed=7)
        params = est.get_params()
        assert params["lambda_star"] == 0.3 and params["seed"] == 7
        est2 = clone(est).set_params(seed=8)
        assert est2.get_params()["seed"] == 8
        assert est.get_params()["seed"] == 7

    def test_fit_transform_matches_functional_path(self):
        t, mask, dense = observed_with_nans(seed=3)
        est = UnfoldingCompleter(seed=11)
        filled = est.fit_transform(dense)
        functional = complete_unfold(
            project_mask(t, mask), UnfoldConfig(seed=11)
        ).estimate.values
        np.testing.assert_array_equal(filled, functional)
        assert est.diagnostics_["rank_q"] == est.diagnostics_["rank_q"]

    def test_transform_is_stateless_and_deterministic(self):
        _, _, dense = observed_with_nans(seed=4)
        est = UnfoldingCompleter(seed=12)
        direct = est.transform(dense)
        refit = est.fit(dense).transform(dense)
        np.testing.assert_array_equal(direct, refit)

    def test_partial_unfolding_params_rejected(self):
        _, _, dense = observed_with_nans(seed=5)
        with pytest.raises(ConfigError):
            UnfoldingCompleter(rank=2, seed=0).fit(dense)

    def test_output_has_no_nans(self):
        _, _, dense = observed_with_nans(seed=6)
        filled = UnfoldingCompleter(seed=13).fit_transform(dense)
        assert not np.any(np.isnan(filled))


class TestContractionCompleter:
    def test_round_trip_parameters(self):
        est = ContractionCompleter(lambda_star=0.4, rank=5, seed=2)
        assert clone(est).get_params() == est.get_params()

    def test_fit_transform_runs(self):
        _, _, dense = observed_with_nans(seed=7, d=6, rank=7, n=160)
        est = ContractionCompleter(rank=7, seed=3)
        filled = est.fit_transform(dense)
        assert filled.shape == dense.shape
        assert est.diagnostics_["algorithm"] == "contract"

    def test_auto_threshold_requires_rank(self):
        _, _, dense = observed_with_nans(seed=8)
        with pytest.raises(ConfigError):
            ContractionCompleter().fit(dense)
