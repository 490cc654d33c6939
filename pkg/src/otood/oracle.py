"""Brute-force reference solver for tiny transport instances.

Minimizes the regularized objective directly over the transport polytope
with a general-purpose constrained optimizer (SLSQP, falling back to
trust-constr). Shares no code path with the scaling solver, so the two
can cross-check each other. Intended for instances of a few dozen cells
at most.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import LinearConstraint, minimize
from scipy.special import xlogy

from .exceptions import ConfigurationError, StabilityError
from .transport import EmpiricalMeasure

# Safety valve for the CLI cross-check command; direct callers may go
# higher at their own risk.
MAX_ORACLE_CELLS = 100


def _marginal_system(n: int, m: int, a: np.ndarray, b: np.ndarray):
    """Equality system for row sums = a and column sums = b.

    The final column constraint is dropped: it is implied by the others
    because both weight vectors sum to one, and keeping it would make the
    system rank-deficient.
    """
    rows = []
    rhs = []
    for i in range(n):
        coeff = np.zeros((n, m))
        coeff[i, :] = 1.0
        rows.append(coeff.ravel())
        rhs.append(a[i])
    for j in range(m - 1):
        coeff = np.zeros((n, m))
        coeff[:, j] = 1.0
        rows.append(coeff.ravel())
        rhs.append(b[j])
    return np.array(rows), np.array(rhs)


def brute_force_plan(
    mu: EmpiricalMeasure, nu: EmpiricalMeasure, cost, lam: float
) -> np.ndarray:
    """Numerically minimize ``<C, P> - lam * E(P)`` over the polytope.

    For ``lam > 0`` the problem is strongly convex with a unique interior
    optimum; the optimizer starts from the product coupling. ``lam = 0``
    solves the unregularized problem (the optimum may then sit on the
    boundary and need not be unique).
    """
    a = mu.weights
    b = nu.weights
    C = np.asarray(cost, dtype=np.float64)
    n, m = a.shape[0], b.shape[0]
    if C.shape != (n, m):
        raise ConfigurationError(
            f"cost shape {C.shape} does not match measure sizes ({n}, {m})"
        )
    if lam < 0:
        raise ConfigurationError(f"lam must be >= 0, got {lam!r}")

    A, rhs = _marginal_system(n, m, a, b)
    x0 = np.outer(a, b).ravel()

    def fun(x):
        return float((C.ravel() * x).sum() + lam * (xlogy(x, x) - x).sum())

    def jac(x):
        return C.ravel() + lam * np.log(np.maximum(x, 1e-300))

    result = minimize(
        fun,
        x0,
        jac=jac,
        method="SLSQP",
        bounds=[(0.0, None)] * (n * m),
        constraints=[{"type": "eq", "fun": lambda x: A @ x - rhs, "jac": lambda x: A}],
        options={"ftol": 1e-14, "maxiter": 1000},
    )
    if not result.success:
        result = minimize(
            fun,
            x0,
            jac=jac,
            method="trust-constr",
            bounds=[(0.0, None)] * (n * m),
            constraints=[LinearConstraint(A, rhs, rhs)],
            options={"gtol": 1e-12, "xtol": 1e-14, "maxiter": 5000},
        )
        if not result.success:
            raise StabilityError(f"reference optimizer failed to converge: {result.message}")
    plan = np.maximum(result.x, 0.0).reshape(n, m)
    return plan
