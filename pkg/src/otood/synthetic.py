"""Synthetic fixtures: clustered in-distribution data plus a drifting OOD cap.

The in-distribution process is a mixture of tight von-Mises-Fisher-like
sub-caps whose centers live in a parent cap around a pole; training and
ID test rows are fresh draws from the same mixture. OOD rows come from
the same mixture rigidly rotated toward a center at cosine distance
``separation`` and progressively blurred: at ``separation=0`` the OOD
process coincides with the ID process exactly (any detector is at
chance), while at large separation it approaches a plain cap at the far
center. ID structure must be clustered for the transport-entropy score
to have sparse columns to latch onto; a single homogeneous cap admits no
low-entropy conditionals.

Everything is drawn from one ``numpy`` generator in a fixed order, so a
given argument tuple reproduces bit-identical output.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ConfigurationError

N_CLUSTERS = 20
CLUSTER_CAP_SIGMA = 0.6  # spread of cluster centers around the pole
WITHIN_CLUSTER_SIGMA = 0.06  # spread of points around their cluster center
DRIFT_BLUR_SIGMA = 0.3  # extra OOD blur at full separation


def _sample_cap(rng, center, sigma, n, d):
    noise = rng.standard_normal((n, d)) / np.sqrt(d)
    points = center[None, :] + sigma * noise
    return points / np.linalg.norm(points, axis=1, keepdims=True)


def _mixture(rng, centers, sigma, n, d):
    if n == 0:
        return np.zeros((0, d))
    counts = np.bincount(np.arange(n) % len(centers), minlength=len(centers))
    parts = [
        _sample_cap(rng, centers[k], sigma, int(c), d)
        for k, c in enumerate(counts)
        if c > 0
    ]
    return np.vstack(parts)


def gen_synthetic(
    n_train: int,
    n_id: int,
    n_ood: int,
    d: int,
    separation: float,
    seed: int,
    *,
    n_clusters: int = N_CLUSTERS,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Generate (train, test, labels) on the unit sphere in ``d`` dimensions.

    ``test`` stacks ``n_id`` in-distribution and ``n_ood`` shifted rows in
    a seeded shuffled order; ``labels`` marks OOD rows with 1. The ID/OOD
    mixture inside any consecutive batch therefore tracks the global
    ratio, which callers control through ``n_id`` and ``n_ood``.
    ``separation`` is the cosine distance between the ID pole and the OOD
    center (0 = indistinguishable, 2 = antipodal).
    """
    for name, value in (("n_train", n_train), ("n_id", n_id), ("n_ood", n_ood)):
        if value < 0:
            raise ConfigurationError(f"{name} must be >= 0, got {value}")
    if d < 2:
        raise ConfigurationError(f"d must be >= 2, got {d}")
    if not 0.0 <= separation <= 2.0:
        raise ConfigurationError(f"separation must lie in [0, 2], got {separation!r}")
    if n_clusters < 1:
        raise ConfigurationError(f"n_clusters must be >= 1, got {n_clusters}")

    rng = np.random.default_rng(seed)
    pole = np.zeros(d)
    pole[0] = 1.0
    far = np.zeros(d)
    far[0] = 1.0 - separation
    far[1] = np.sqrt(max(0.0, 1.0 - far[0] ** 2))

    centers = _sample_cap(rng, pole, CLUSTER_CAP_SIGMA, n_clusters, d)
    train = _mixture(rng, centers, WITHIN_CLUSTER_SIGMA, n_train, d)
    id_test = _mixture(rng, centers, WITHIN_CLUSTER_SIGMA, n_id, d)

    # rotate the mixture centers toward the far pole in the (e1, e2)
    # plane, pull them onto it, and widen the caps as separation grows
    cos_phi = 1.0 - separation
    sin_phi = np.sqrt(max(0.0, 1.0 - cos_phi * cos_phi))
    rotation = np.eye(d)
    rotation[0, 0] = cos_phi
    rotation[0, 1] = -sin_phi
    rotation[1, 0] = sin_phi
    rotation[1, 1] = cos_phi
    pull = min(separation / 2.0, 1.0)
    ood_centers = (1.0 - pull) * (centers @ rotation.T) + pull * far[None, :]
    norms = np.linalg.norm(ood_centers, axis=1, keepdims=True)
    ood_centers = np.where(norms > 0, ood_centers / norms, ood_centers)
    ood_sigma = float(np.hypot(WITHIN_CLUSTER_SIGMA, pull * DRIFT_BLUR_SIGMA))
    ood_test = _mixture(rng, ood_centers, ood_sigma, n_ood, d)

    test = np.vstack([id_test, ood_test])
    labels = np.concatenate([np.zeros(n_id, dtype=np.int64), np.ones(n_ood, dtype=np.int64)])
    perm = rng.permutation(n_id + n_ood)
    return train, test[perm], labels[perm]
