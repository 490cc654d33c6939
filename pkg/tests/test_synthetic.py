import numpy as np
import numpy.testing as npt
import pytest

from otood.baselines import knn_scores, mahalanobis_fit, mahalanobis_scores
from otood.exceptions import ConfigurationError
from otood.metrics import LabeledScores, auroc
from otood.synthetic import gen_synthetic


class TestGenSynthetic:
    def test_same_seed_is_bit_identical(self):
        a = gen_synthetic(50, 20, 30, 8, 1.2, 99)
        b = gen_synthetic(50, 20, 30, 8, 1.2, 99)
        for x, y in zip(a, b):
            npt.assert_array_equal(x, y)

    def test_shapes_and_label_counts(self):
        train, test, labels = gen_synthetic(40, 15, 25, 6, 1.0, 3)
        assert train.shape == (40, 6)
        assert test.shape == (40, 6)
        assert labels.shape == (40,)
        assert labels.sum() == 25

    def test_rows_are_unit_norm(self):
        train, test, _ = gen_synthetic(30, 10, 10, 12, 0.7, 5)
        npt.assert_allclose(np.linalg.norm(train, axis=1), 1.0, atol=1e-12)
        npt.assert_allclose(np.linalg.norm(test, axis=1), 1.0, atol=1e-12)

    def test_id_and_ood_interleaved(self):
        # consecutive batches should carry a mixture of both classes
        _, _, labels = gen_synthetic(10, 100, 100, 4, 1.5, 11)
        first_half = labels[:100].sum()
        assert 20 <= first_half <= 80

    def test_zero_counts_allowed(self):
        train, test, labels = gen_synthetic(10, 0, 5, 4, 1.0, 1)
        assert train.shape == (10, 4)
        assert test.shape == (5, 4)
        assert labels.sum() == 5

    def test_mixture_ratio_is_caller_controlled(self):
        _, _, labels = gen_synthetic(10, 10, 90, 4, 1.0, 1)
        assert labels.sum() == 90 and labels.size == 100

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n_train": -1},
            {"d": 1},
            {"separation": 2.5},
            {"separation": -0.1},
        ],
    )
    def test_invalid_arguments_rejected(self, kwargs):
        base = dict(n_train=10, n_id=5, n_ood=5, d=4, separation=1.0, seed=0)
        base.update(kwargs)
        with pytest.raises(ConfigurationError):
            gen_synthetic(**base)


class TestSeparationSemantics:
    def test_zero_separation_is_indistinguishable(self):
        train, test, labels = gen_synthetic(500, 250, 250, 32, 0.0, 42)
        knn = auroc(LabeledScores(knn_scores(train, test, 10), labels))
        fit = mahalanobis_fit(train)
        mah = auroc(LabeledScores(mahalanobis_scores(fit, test), labels))
        assert abs(knn - 0.5) < 0.05
        assert abs(mah - 0.5) < 0.05

    def test_large_separation_is_trivially_detectable(self):
        train, test, labels = gen_synthetic(200, 100, 100, 16, 1.8, 21)
        knn = auroc(LabeledScores(knn_scores(train, test, 10), labels))
        assert knn > 0.99
