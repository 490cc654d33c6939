"""Discrete entropic optimal transport between empirical measures.

Given measures ``mu`` (train) and ``nu`` (test) supported on unit-norm
feature rows, and the matrix ``C`` of pairwise cosine distances, the
solver finds the coupling minimizing ``<C, P> - lam * E(P)`` over the
transport polytope (nonnegative matrices with row sums ``mu`` and column
sums ``nu``), where ``E(P) = -sum_ij p_ij (log p_ij - 1)`` with zero
entries contributing zero. For ``lam > 0`` this problem is strongly
convex and has a unique optimum of the form ``diag(u) K diag(v)`` with
``K = exp(-C/lam)``, which alternating row/column scaling recovers.

Two evaluation modes are provided: plain scaling on ``K`` (fast) and a
log-domain form using log-sum-exp reductions (stable when ``exp(-C/lam)``
underflows). The log-domain mode is selected automatically for small
``lam`` or when the scaling vectors leave the representable range.

All arithmetic is performed in float64 regardless of the input dtype;
reductions use numpy's deterministic ordering, so identical inputs give
bit-identical plans.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, xlogy

from .exceptions import ConfigurationError, DataError, StabilityError
from .validation import check_features, check_weights

# Standard-domain scaling vectors outside this range trigger the
# log-domain fallback (or a StabilityError when log_domain=False).
_SCALING_LO = 1e-300
_SCALING_HI = 1e300

# Below this regularization the kernel exp(-C/lam) is assumed
# underflow-prone for cosine costs and the log domain is used directly.
AUTO_LOG_DOMAIN_BELOW = 0.05


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Weighted point cloud on the unit sphere: simplex weights over support rows."""

    weights: np.ndarray
    supports: np.ndarray

    def __post_init__(self):
        supports = check_features(self.supports, name="supports")
        weights = check_weights(self.weights, supports.shape[0])
        object.__setattr__(self, "supports", supports)
        object.__setattr__(self, "weights", weights)

    @property
    def n_points(self) -> int:
        return self.supports.shape[0]

    @property
    def dim(self) -> int:
        return self.supports.shape[1]


def uniform_measure(supports) -> EmpiricalMeasure:
    """Empirical measure with equal weight 1/n on every support row."""
    supports = check_features(supports, name="supports")
    n = supports.shape[0]
    return EmpiricalMeasure(np.full(n, 1.0 / n), supports)


def cosine_cost_matrix(train, test) -> np.ndarray:
    """Pairwise cosine distances ``c_ij = 1 - <train_i, test_j>``, clamped to [0, 2].

    Rows of both inputs must be unit-norm; the result has shape
    ``(n_train, n_test)``.
    """
    a = check_features(train, name="train features")
    b = check_features(test, name="test features")
    if a.shape[1] != b.shape[1]:
        raise ConfigurationError(
            f"feature dimensions differ: train has {a.shape[1]}, test has {b.shape[1]}"
        )
    cost = 1.0 - a @ b.T
    np.clip(cost, 0.0, 2.0, out=cost)
    return cost


@dataclass(frozen=True)
class SinkhornConfig:
    """Solver settings.

    lam         entropic regularization coefficient, must be > 0
    tol         L1 marginal tolerance declaring convergence
    max_iter    iteration budget
    log_domain  True forces log-sum-exp evaluation, False forbids it,
                None selects automatically
    check_every iterations between convergence checks
    """

    lam: float = 0.1
    tol: float = 1e-6
    max_iter: int = 10_000
    log_domain: bool | None = None
    check_every: int = 10

    def __post_init__(self):
        if not (self.lam > 0):
            raise ConfigurationError(
                f"lam must be > 0, got {self.lam!r} (the scaling kernel divides by it; "
                "use the brute-force oracle for the unregularized problem)"
            )
        if not (self.tol > 0):
            raise ConfigurationError(f"tol must be > 0, got {self.tol!r}")
        if self.max_iter < 1:
            raise ConfigurationError(f"max_iter must be >= 1, got {self.max_iter!r}")
        if self.check_every < 1:
            raise ConfigurationError(f"check_every must be >= 1, got {self.check_every!r}")


@dataclass(frozen=True)
class TransportPlan:
    """A coupling plus solver diagnostics.

    ``data[i, j] >= 0`` holds everywhere, columns sum to the prescribed
    ``col_marginal`` up to float rounding (the final update rescales
    columns), and ``marginal_violation`` is the final
    ``max(||P 1 - mu||_1, ||P^T 1 - nu||_1)``; it is <= the configured
    tolerance exactly when ``converged``.
    """

    data: np.ndarray
    row_marginal: np.ndarray
    col_marginal: np.ndarray
    converged: bool
    iterations: int
    marginal_violation: float

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


def _violation(plan: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    row_err = np.abs(plan.sum(axis=1) - a).sum()
    col_err = np.abs(plan.sum(axis=0) - b).sum()
    return float(max(row_err, col_err))


def _scaling_ok(x: np.ndarray) -> bool:
    if not np.isfinite(x).all():
        return False
    pos = x[x > 0]
    if pos.size and (pos.min() < _SCALING_LO or pos.max() > _SCALING_HI):
        return False
    return True


class _Unstable(Exception):
    """Internal: standard-domain scaling left the representable range."""

    def __init__(self, iterations: int):
        self.iterations = iterations


def _solve_standard(a, b, cost, cfg, u0, v0):
    K = np.exp(-cost / cfg.lam)
    u = np.ones_like(a) if u0 is None else np.asarray(u0, dtype=np.float64).copy()
    v = np.ones_like(b) if v0 is None else np.asarray(v0, dtype=np.float64).copy()
    plan = None
    for it in range(1, cfg.max_iter + 1):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            u = a / (K @ v)
            v = b / (K.T @ u)
        if not (_scaling_ok(u) and _scaling_ok(v)):
            raise _Unstable(it)
        if it % cfg.check_every == 0 or it == cfg.max_iter:
            plan = (u[:, None] * K) * v[None, :]
            viol = _violation(plan, a, b)
            if viol <= cfg.tol:
                return plan, it, viol, True
    return plan, cfg.max_iter, viol, False


def _solve_log(a, b, cost, cfg, u0, v0, spent: int = 0):
    log_kernel = -cost / cfg.lam
    with np.errstate(divide="ignore"):
        log_a = np.log(a)
        log_b = np.log(b)
        f = np.zeros_like(a) if u0 is None else np.log(np.asarray(u0, dtype=np.float64))
        g = np.zeros_like(b) if v0 is None else np.log(np.asarray(v0, dtype=np.float64))
    if not (np.isfinite(f[a > 0]).all() and np.isfinite(g[b > 0]).all()):
        raise ConfigurationError("initial scalings must be positive wherever weights are")
    plan = None
    budget = cfg.max_iter - spent
    for it in range(1, budget + 1):
        f = log_a - logsumexp(log_kernel + g[None, :], axis=1)
        g = log_b - logsumexp(log_kernel + f[:, None], axis=0)
        if it % cfg.check_every == 0 or it == budget:
            plan = np.exp(log_kernel + f[:, None] + g[None, :])
            viol = _violation(plan, a, b)
            if viol <= cfg.tol:
                return plan, spent + it, viol, True
    return plan, cfg.max_iter, viol, False


def sinkhorn(
    mu: EmpiricalMeasure,
    nu: EmpiricalMeasure,
    cost,
    cfg: SinkhornConfig,
    *,
    u0=None,
    v0=None,
) -> TransportPlan:
    """Solve the entropic transport problem by alternating matrix scaling.

    ``cost`` must have shape ``(mu.n_points, nu.n_points)``. The optional
    ``u0``/``v0`` warm-start the scaling vectors (the fixed point does not
    depend on them). Non-convergence within ``cfg.max_iter`` is not an
    error: the current plan is returned with ``converged=False`` and its
    final marginal violation.

    Raises StabilityError if ``cfg.log_domain`` is False and the plain
    scaling overflows/underflows; with ``log_domain=None`` the solver
    switches to the log domain instead.
    """
    a = mu.weights
    b = nu.weights
    C = np.asarray(cost, dtype=np.float64)
    if C.ndim != 2 or C.shape != (a.shape[0], b.shape[0]):
        raise ConfigurationError(
            f"cost shape {C.shape} does not match measure sizes ({a.shape[0]}, {b.shape[0]})"
        )
    if not np.isfinite(C).all():
        raise DataError("cost matrix contains non-finite values")

    use_log = cfg.log_domain
    if use_log is None:
        use_log = cfg.lam < AUTO_LOG_DOMAIN_BELOW

    if use_log:
        plan, iters, viol, ok = _solve_log(a, b, C, cfg, u0, v0)
    else:
        try:
            plan, iters, viol, ok = _solve_standard(a, b, C, cfg, u0, v0)
        except _Unstable as exc:
            if cfg.log_domain is False:
                raise StabilityError(
                    "scaling vectors left the representable range in the standard domain; "
                    "rerun with log_domain=True (or leave it unset for automatic selection)"
                ) from None
            plan, iters, viol, ok = _solve_log(a, b, C, cfg, None, None, spent=exc.iterations)

    return TransportPlan(
        data=plan,
        row_marginal=a.copy(),
        col_marginal=b.copy(),
        converged=ok,
        iterations=iters,
        marginal_violation=viol,
    )


def objective_value(plan, cost, lam: float) -> float:
    """Transport objective ``<C, P> - lam * E(P)``.

    ``E(P) = -sum p_ij (log p_ij - 1)``; entries with ``p_ij = 0``
    contribute nothing (limit convention). Accepts a TransportPlan or a
    raw matrix.
    """
    P = plan.data if isinstance(plan, TransportPlan) else np.asarray(plan, dtype=np.float64)
    C = np.asarray(cost, dtype=np.float64)
    if P.shape != C.shape:
        raise ConfigurationError(f"plan shape {P.shape} does not match cost shape {C.shape}")
    entropy_term = -(xlogy(P, P) - P).sum()
    return float((C * P).sum() - lam * entropy_term)
