"""End-to-end scoring pipeline: files in, scores (and optionally metrics) out.

Test rows are split into consecutive batches; each batch is transported
against the full training measure independently (the test-side measure is
rebuilt uniformly over the batch), and per-input entropy scores are
concatenated in input order. Scores depend on batch composition by
design: more test inputs sharpen the picture, which is the point of
batching them at all.

Batches may be solved in parallel; the ``OTOOD_THREADS`` environment
variable caps the worker count (default 1). Results are placed by batch
index, so the output is identical regardless of parallelism.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError
from .io import read_features, read_labels
from .metrics import LabeledScores, MetricsReport, compute_metrics
from .scoring import ScoredBatch, SolverDiagnostics, score_batch
from .transport import EmpiricalMeasure, SinkhornConfig, uniform_measure

THREADS_ENV_VAR = "OTOOD_THREADS"


@dataclass(frozen=True)
class RunConfig:
    """Pipeline settings.

    ``batch_size=None`` scores the whole test set as one transport
    problem. ``seed`` optionally shuffles the test order before batching
    (scores are still emitted in input order); None keeps the file order.
    ``tpr_target``/``tpr_on`` only matter when labels are supplied.
    """

    lam: float = 0.1
    tol: float = 1e-6
    max_iter: int = 10_000
    batch_size: int | None = None
    normalize: bool = True
    seed: int | None = None
    log_domain: bool | None = None
    check_every: int = 10
    tpr_target: float = 0.95
    tpr_on: str = "ood"

    def __post_init__(self):
        if self.batch_size is not None and self.batch_size < 1:
            raise ConfigurationError(f"batch_size must be >= 1, got {self.batch_size!r}")
        if self.tpr_on not in ("ood", "id"):
            raise ConfigurationError(f"tpr_on must be 'ood' or 'id', got {self.tpr_on!r}")

    def solver(self) -> SinkhornConfig:
        return SinkhornConfig(
            lam=self.lam,
            tol=self.tol,
            max_iter=self.max_iter,
            log_domain=self.log_domain,
            check_every=self.check_every,
        )


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "")
    try:
        workers = int(raw)
    except ValueError:
        return 1
    return max(workers, 1)


def score_features(train: np.ndarray, test: np.ndarray, cfg: RunConfig) -> ScoredBatch:
    """Score already-loaded unit-norm feature matrices."""
    mu = uniform_measure(train)
    n_test = test.shape[0]
    order = np.arange(n_test)
    if cfg.seed is not None:
        order = np.random.default_rng(cfg.seed).permutation(n_test)
    batch_size = cfg.batch_size or n_test
    starts = range(0, n_test, batch_size)
    groups = [order[s : s + batch_size] for s in starts]
    solver_cfg = cfg.solver()

    def solve(rows: np.ndarray) -> ScoredBatch:
        return score_batch(mu, uniform_measure(test[rows]), solver_cfg)

    workers = _worker_count()
    if workers > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve, groups))
    else:
        results = [solve(rows) for rows in groups]

    scores = np.empty(n_test, dtype=np.float64)
    flags = np.empty(n_test, dtype=bool)
    diags: list[SolverDiagnostics] = []
    for rows, result in zip(groups, results):
        scores[rows] = result.scores
        flags[rows] = result.row_converged
        diags.extend(result.diags)
    return ScoredBatch(
        scores=scores,
        lam=cfg.lam,
        n_train=mu.n_points,
        diags=tuple(diags),
        row_converged=flags,
    )


def run_pipeline(
    cfg: RunConfig, train_path, test_path, labels_path=None
) -> ScoredBatch | MetricsReport:
    """Score test features against training features, file to result.

    Returns the scored batch, or a metrics report when a label file is
    supplied (batches that failed to converge are listed in the report).
    """
    train = read_features(train_path, normalize=cfg.normalize)
    test = read_features(test_path, normalize=cfg.normalize)
    if train.shape[1] != test.shape[1]:
        raise ConfigurationError(
            f"feature dimensions differ: {train_path} has {train.shape[1]}, "
            f"{test_path} has {test.shape[1]}"
        )
    batch = score_features(train, test, cfg)
    if labels_path is None:
        return batch
    labels = read_labels(labels_path)
    if labels.shape[0] != batch.scores.shape[0]:
        raise ConfigurationError(
            f"{labels_path} has {labels.shape[0]} labels for {batch.scores.shape[0]} test rows"
        )
    nonconverged = tuple(i for i, d in enumerate(batch.diags) if not d.converged)
    return compute_metrics(
        LabeledScores(batch.scores, labels),
        tpr_target=cfg.tpr_target,
        tpr_on=cfg.tpr_on,
        nonconverged_batches=nonconverged,
    )
