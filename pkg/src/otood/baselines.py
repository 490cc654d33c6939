"""Distance-based reference scorers: k-th neighbor distance and Mahalanobis.

Both follow the same orientation as the transport score: higher means
more likely out-of-distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, DataError, SingularityError
from .validation import as_matrix, check_features, check_unit_vector

# Relative eigenvalue cutoff below which covariance directions are
# treated as null space and excluded from the precision matrix.
EIGENVALUE_RTOL = 1e-10


def knn_score(train, query, k: int) -> float:
    """Cosine distance from ``query`` to its k-th nearest training row.

    Neighbors are ordered by ascending distance, so ``k=1`` is the closest.
    Requires unit-norm inputs.
    """
    X = check_features(train, name="train features")
    q = check_unit_vector(query)
    if q.shape[0] != X.shape[1]:
        raise ConfigurationError(
            f"query dimension {q.shape[0]} does not match training dimension {X.shape[1]}"
        )
    if not 1 <= k <= X.shape[0]:
        raise ConfigurationError(f"k must be in [1, {X.shape[0]}], got {k}")
    distances = 1.0 - X @ q
    return float(np.partition(distances, k - 1)[k - 1])


def knn_scores(train, queries, k: int) -> np.ndarray:
    """Vectorized ``knn_score`` over the rows of ``queries``."""
    X = check_features(train, name="train features")
    Q = check_features(queries, name="queries")
    if Q.shape[1] != X.shape[1]:
        raise ConfigurationError(
            f"query dimension {Q.shape[1]} does not match training dimension {X.shape[1]}"
        )
    if not 1 <= k <= X.shape[0]:
        raise ConfigurationError(f"k must be in [1, {X.shape[0]}], got {k}")
    distances = 1.0 - Q @ X.T
    return np.partition(distances, k - 1, axis=1)[:, k - 1]


@dataclass(frozen=True)
class GaussianFit:
    """Moments of a single Gaussian fit: mean, shrunk covariance, precision.

    ``precision`` is the pseudo-inverse of ``covariance`` restricted to the
    retained eigenspace (eigenvalues above ``EIGENVALUE_RTOL`` of the
    largest are kept).
    """

    mean: np.ndarray
    covariance: np.ndarray
    precision: np.ndarray
    shrinkage: float


def mahalanobis_fit(train, shrinkage: float = 1e-3) -> GaussianFit:
    """Fit mean and shrunk covariance to the training rows.

    The covariance is blended toward the scaled identity:
    ``(1 - s) * cov + s * trace(cov)/d * I``. Some shrinkage is advisable
    for unit-norm features, whose sample covariance has rank at most
    ``d - 1``. Inputs need not be normalized.
    """
    X = as_matrix(train, name="train features")
    if X.shape[0] < 2:
        raise DataError(f"covariance estimation needs at least 2 rows, got {X.shape[0]}")
    if not 0.0 <= shrinkage <= 1.0:
        raise ConfigurationError(f"shrinkage must lie in [0, 1], got {shrinkage!r}")
    d = X.shape[1]
    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / X.shape[0]
    cov = (1.0 - shrinkage) * cov + shrinkage * (np.trace(cov) / d) * np.eye(d)
    cov = (cov + cov.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(cov)
    largest = float(eigvals.max())
    if largest <= 0.0:
        raise SingularityError(
            "covariance has no positive spectrum (identical rows with zero shrinkage?)"
        )
    keep = eigvals > EIGENVALUE_RTOL * largest
    precision = (eigvecs[:, keep] / eigvals[keep]) @ eigvecs[:, keep].T
    return GaussianFit(mean=mean, covariance=cov, precision=precision, shrinkage=float(shrinkage))


def mahalanobis_score(fit: GaussianFit, query) -> float:
    """Squared Mahalanobis distance ``(x - mean)^T precision (x - mean)``."""
    q = np.asarray(query, dtype=np.float64)
    if q.ndim != 1 or q.shape[0] != fit.mean.shape[0]:
        raise ConfigurationError(
            f"query shape {q.shape} does not match fitted dimension {fit.mean.shape[0]}"
        )
    if not np.isfinite(q).all():
        raise DataError("query contains non-finite values")
    delta = q - fit.mean
    return float(delta @ fit.precision @ delta)


def mahalanobis_scores(fit: GaussianFit, queries) -> np.ndarray:
    """Vectorized ``mahalanobis_score`` over the rows of ``queries``."""
    Q = as_matrix(queries, name="queries")
    if Q.shape[1] != fit.mean.shape[0]:
        raise ConfigurationError(
            f"query dimension {Q.shape[1]} does not match fitted dimension {fit.mean.shape[0]}"
        )
    delta = Q - fit.mean
    return ((delta @ fit.precision) * delta).sum(axis=1)
