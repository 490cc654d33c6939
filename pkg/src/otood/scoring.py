"""Conditional-distribution entropy scores from a transport plan.

A converged plan is a joint distribution over (train point, test point).
Each test input owns one column; normalizing that column gives the
conditional distribution over train points, and its Shannon entropy is
the OOD score: an input whose mass arrives uniformly from everywhere is
suspicious, one whose mass arrives from a few close neighbors is not.
Scores are in nats and bounded by ``log(n_train)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .exceptions import ConfigurationError, DataError, DegenerateInputError
from .transport import (
    EmpiricalMeasure,
    SinkhornConfig,
    TransportPlan,
    cosine_cost_matrix,
    sinkhorn,
)

SCORE_BOUND_ATOL = 1e-9


@dataclass(frozen=True)
class ConditionalDistribution:
    """One normalized plan column: P(train point | test point j)."""

    probs: np.ndarray
    source_column: int

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if (probs < 0).any():
            raise DataError("conditional probabilities must be nonnegative")
        if abs(float(probs.sum()) - 1.0) > 1e-9:
            raise DataError(f"conditional probabilities sum to {probs.sum()!r}, expected 1")
        object.__setattr__(self, "probs", probs)


@dataclass(frozen=True)
class SolverDiagnostics:
    iterations: int
    marginal_violation: float
    converged: bool


@dataclass(frozen=True)
class ScoredBatch:
    """Per-test-input entropy scores plus the diagnostics of each solve.

    ``row_converged[j]`` is the convergence flag of the solve that scored
    test row ``j`` (all rows of a single batch share one flag; pipelines
    concatenate batches).
    """

    scores: np.ndarray
    lam: float
    n_train: int
    diags: tuple[SolverDiagnostics, ...]
    row_converged: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        flags = np.asarray(self.row_converged, dtype=bool)
        if scores.shape != flags.shape:
            raise ConfigurationError("scores and row_converged must have equal length")
        bound = np.log(self.n_train) + SCORE_BOUND_ATOL
        if scores.size and (scores.min() < -SCORE_BOUND_ATOL or scores.max() > bound):
            raise DataError(
                f"scores outside [0, log n_train]: range "
                f"[{scores.min():.6g}, {scores.max():.6g}] with n_train={self.n_train}"
            )
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "row_converged", flags)

    @property
    def converged(self) -> bool:
        return all(d.converged for d in self.diags)


def _entropy(p: np.ndarray) -> float:
    return float(-xlogy(p, p).sum())


def conditional_distribution(plan: TransportPlan, j: int) -> ConditionalDistribution:
    """Extract and normalize column ``j`` of the plan.

    The realized column sum is used as the normalizer, so the result is a
    proper distribution even under residual marginal error. A zero column
    (zero test weight, or a solve that never moved mass) is degenerate.
    """
    n_cols = plan.data.shape[1]
    if not 0 <= j < n_cols:
        raise ConfigurationError(f"column index {j} out of range [0, {n_cols})")
    column = plan.data[:, j]
    mass = float(column.sum())
    if mass <= 0.0:
        raise DegenerateInputError(
            f"plan column {j} carries no mass (test weight zero or solver failure)"
        )
    return ConditionalDistribution(probs=column / mass, source_column=j)


def conditional_entropy_score(cd: ConditionalDistribution) -> float:
    """Shannon entropy of a conditional distribution, in nats (0 log 0 = 0)."""
    return _entropy(cd.probs)


def column_entropy_scores(plan: TransportPlan) -> np.ndarray:
    """Entropy of every normalized plan column at once."""
    mass = plan.data.sum(axis=0)
    if (mass <= 0.0).any():
        j = int(np.nonzero(mass <= 0.0)[0][0])
        raise DegenerateInputError(
            f"plan column {j} carries no mass (test weight zero or solver failure)"
        )
    conditionals = plan.data / mass
    return -xlogy(conditionals, conditionals).sum(axis=0)


def score_batch(
    train: EmpiricalMeasure, test: EmpiricalMeasure, cfg: SinkhornConfig
) -> ScoredBatch:
    """Cost matrix -> transport plan -> per-column entropy, in test-row order.

    Non-convergence is reported through the diagnostics rather than
    raised; scores computed from a non-converged plan are still returned,
    flagged via ``row_converged``.
    """
    if train.dim != test.dim:
        raise ConfigurationError(
            f"feature dimensions differ: train has {train.dim}, test has {test.dim}"
        )
    cost = cosine_cost_matrix(train.supports, test.supports)
    plan = sinkhorn(train, test, cost, cfg)
    scores = column_entropy_scores(plan)
    diag = SolverDiagnostics(plan.iterations, plan.marginal_violation, plan.converged)
    return ScoredBatch(
        scores=scores,
        lam=cfg.lam,
        n_train=train.n_points,
        diags=(diag,),
        row_converged=np.full(test.n_points, plan.converged),
    )


def joint_entropy(plan: TransportPlan) -> float:
    """Shannon entropy of the plan viewed as a joint distribution, in nats."""
    return _entropy(plan.data)


def mutual_information(
    plan: TransportPlan, mu: EmpiricalMeasure, nu: EmpiricalMeasure, *, marginal_atol: float = 1e-3
) -> float:
    """Mutual information of the coupling, clamped to 0 against rounding.

    Computed against the plan's realized marginals (which match ``mu`` and
    ``nu`` up to the solver tolerance; a larger discrepancy than
    ``marginal_atol`` is rejected). Nonnegative for every joint
    distribution; values in ``[-1e-9, 0)`` from float rounding are
    reported as 0.
    """
    P = plan.data
    rows = P.sum(axis=1)
    cols = P.sum(axis=0)
    if np.abs(rows - mu.weights).sum() > marginal_atol or np.abs(cols - nu.weights).sum() > marginal_atol:
        raise ConfigurationError(
            "plan marginals are inconsistent with the supplied measures "
            f"(L1 discrepancy beyond {marginal_atol:g})"
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.log(P) - np.log(rows[:, None]) - np.log(cols[None, :])
    value = float((P * np.where(P > 0, ratio, 0.0)).sum())
    if -1e-9 <= value < 0.0:
        return 0.0
    return value
