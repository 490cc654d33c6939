"""Estimator-style wrappers: fit on training features, score test batches.

These follow the scikit-learn parameter conventions (``get_params``/
``set_params``/``clone`` all work), so they compose with pipelines and
model selection. Unlike scikit-learn's outlier detectors, ``score_samples``
here returns OOD-positive scores: higher means more likely
out-of-distribution, matching the rest of the package.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .baselines import knn_scores, mahalanobis_fit, mahalanobis_scores
from .exceptions import ConfigurationError
from .pipeline import RunConfig, score_features
from .validation import check_features


def _prepare(X, normalize: bool) -> np.ndarray:
    X = check_array(X, dtype=np.float64)
    return check_features(X, normalize=normalize)


class _ThresholdMixin:
    def predict(self, X):
        """1 where ``score_samples(X) >= threshold``, else 0.

        Requires the ``threshold`` parameter; scores carry no universal
        scale, so the cut must be chosen by the caller (e.g. from a
        validation sweep).
        """
        if self.threshold is None:
            raise ConfigurationError(
                "predict needs the threshold parameter; use score_samples for raw scores"
            )
        return (self.score_samples(X) >= self.threshold).astype(np.int64)


class TransportEntropyDetector(_ThresholdMixin, BaseEstimator):
    """OOD scoring by conditional-column entropy of an entropic transport plan.

    The test batch is coupled to the training set through the regularized
    transport problem with cosine costs; each test input is scored by the
    entropy of its normalized plan column. Scores of one batch depend on
    the whole batch (that is the point: test inputs inform each other),
    so ``score_samples`` is batch-oriented rather than per-row.

    Parameters mirror :class:`otood.pipeline.RunConfig`; ``batch_size``
    of None scores all rows as one transport problem.
    """

    def __init__(
        self,
        lam: float = 0.1,
        tol: float = 1e-6,
        max_iter: int = 10_000,
        batch_size: int | None = None,
        log_domain: bool | None = None,
        normalize: bool = True,
        threshold: float | None = None,
    ):
        self.lam = lam
        self.tol = tol
        self.max_iter = max_iter
        self.batch_size = batch_size
        self.log_domain = log_domain
        self.normalize = normalize
        self.threshold = threshold

    def fit(self, X, y=None):
        self.train_features_ = _prepare(X, self.normalize)
        self.n_features_in_ = self.train_features_.shape[1]
        return self

    def score_samples(self, X) -> np.ndarray:
        check_is_fitted(self, "train_features_")
        X = _prepare(X, self.normalize)
        batch = score_features(self.train_features_, X, self._run_config())
        self.last_diagnostics_ = batch.diags
        return batch.scores

    def _run_config(self) -> RunConfig:
        return RunConfig(
            lam=self.lam,
            tol=self.tol,
            max_iter=self.max_iter,
            batch_size=self.batch_size,
            log_domain=self.log_domain,
            normalize=self.normalize,
        )


class KNNDistanceDetector(_ThresholdMixin, BaseEstimator):
    """OOD scoring by cosine distance to the k-th nearest training row."""

    def __init__(self, k: int = 50, normalize: bool = True, threshold: float | None = None):
        self.k = k
        self.normalize = normalize
        self.threshold = threshold

    def fit(self, X, y=None):
        self.train_features_ = _prepare(X, self.normalize)
        self.n_features_in_ = self.train_features_.shape[1]
        return self

    def score_samples(self, X) -> np.ndarray:
        check_is_fitted(self, "train_features_")
        X = _prepare(X, self.normalize)
        return knn_scores(self.train_features_, X, self.k)


class MahalanobisDetector(_ThresholdMixin, BaseEstimator):
    """OOD scoring by squared Mahalanobis distance to a single Gaussian fit."""

    def __init__(
        self,
        shrinkage: float = 1e-3,
        normalize: bool = True,
        threshold: float | None = None,
    ):
        self.shrinkage = shrinkage
        self.normalize = normalize
        self.threshold = threshold

    def fit(self, X, y=None):
        X = _prepare(X, self.normalize)
        self.fit_ = mahalanobis_fit(X, self.shrinkage)
        self.n_features_in_ = X.shape[1]
        return self

    def score_samples(self, X) -> np.ndarray:
        check_is_fitted(self, "fit_")
        X = _prepare(X, self.normalize)
        return mahalanobis_scores(self.fit_, X)
