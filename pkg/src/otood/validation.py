"""Input validation helpers.

All numeric entry points funnel through these so that error messages and
dtype handling stay consistent: features become 64-bit row matrices,
weights become simplex vectors, and contract violations raise typed
exceptions instead of propagating numpy surprises.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ConfigurationError, DataError

UNIT_NORM_ATOL = 1e-4
SIMPLEX_ATOL = 1e-9


def as_matrix(x, name: str = "features") -> np.ndarray:
    """Coerce to a finite 2-D float64 array with at least one row and column."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise DataError(f"{name} must be a 2-D array, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DataError(f"{name} must be non-empty, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise DataError(f"{name} contains non-finite values")
    return arr


def check_features(x, *, normalize: bool = False, name: str = "features") -> np.ndarray:
    """Validate a feature matrix whose rows must lie on the unit sphere.

    With ``normalize`` the rows are rescaled to unit norm (zero rows are
    rejected by index); otherwise rows must already have unit norm within
    ``UNIT_NORM_ATOL``.
    """
    arr = as_matrix(x, name)
    norms = np.linalg.norm(arr, axis=1)
    if normalize:
        zero = np.nonzero(norms == 0.0)[0]
        if zero.size:
            raise DataError(f"{name} row {zero[0]} has zero norm and cannot be normalized")
        return arr / norms[:, None]
    bad = np.nonzero(np.abs(norms - 1.0) > UNIT_NORM_ATOL)[0]
    if bad.size:
        raise DataError(
            f"{name} row {bad[0]} has norm {norms[bad[0]]:.6g}; "
            f"rows must be unit-norm within {UNIT_NORM_ATOL:g} (or pass normalize)"
        )
    return arr


def check_unit_vector(x, name: str = "query") -> np.ndarray:
    """Validate a single unit-norm vector."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise DataError(f"{name} must be a non-empty 1-D vector")
    if not np.isfinite(arr).all():
        raise DataError(f"{name} contains non-finite values")
    norm = float(np.linalg.norm(arr))
    if abs(norm - 1.0) > UNIT_NORM_ATOL:
        raise DataError(f"{name} has norm {norm:.6g}; expected unit norm within {UNIT_NORM_ATOL:g}")
    return arr


def check_weights(w, n: int, name: str = "weights") -> np.ndarray:
    """Validate a probability vector of length ``n`` (nonnegative, sums to 1)."""
    arr = np.asarray(w, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != n:
        raise ConfigurationError(f"{name} must be a vector of length {n}, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise DataError(f"{name} contains non-finite values")
    if (arr < 0).any():
        raise DataError(f"{name} contains negative entries")
    total = float(arr.sum())
    if abs(total - 1.0) > SIMPLEX_ATOL:
        raise DataError(f"{name} sums to {total!r}, expected 1 within {SIMPLEX_ATOL:g}")
    return arr
