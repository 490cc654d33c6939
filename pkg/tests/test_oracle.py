import numpy as np
import numpy.testing as npt
import pytest

from otood.exceptions import ConfigurationError
from otood.oracle import brute_force_plan
from otood.transport import SinkhornConfig, objective_value, sinkhorn, uniform_measure

from conftest import random_problem


def test_matches_scaling_solver_on_tiny_instances():
    worst = 0.0
    for i in range(20):
        rng = np.random.default_rng(40 + i)
        n, m = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        mu, nu, cost = random_problem(70 + i, n, m, d=8)
        lam = (0.1, 0.5, 1.0)[i % 3]
        reference = brute_force_plan(mu, nu, cost, lam)
        plan = sinkhorn(mu, nu, cost, SinkhornConfig(lam=lam))
        worst = max(worst, float(np.abs(reference - plan.data).max()))
    assert worst < 1e-4


def test_reference_plan_is_feasible():
    mu, nu, cost = random_problem(1, 3, 3, d=4)
    plan = brute_force_plan(mu, nu, cost, 0.5)
    assert plan.min() >= 0.0
    npt.assert_allclose(plan.sum(axis=1), mu.weights, atol=1e-9)
    npt.assert_allclose(plan.sum(axis=0), nu.weights, atol=1e-9)


def test_reference_objective_matches_solver():
    # the scaling solver satisfies marginals only to its tolerance, so the
    # two objectives can differ in either direction at that resolution
    mu, nu, cost = random_problem(2, 3, 2, d=4)
    lam = 0.3
    reference = brute_force_plan(mu, nu, cost, lam)
    plan = sinkhorn(mu, nu, cost, SinkhornConfig(lam=lam))
    gap = abs(objective_value(reference, cost, lam) - objective_value(plan, cost, lam))
    assert gap < 1e-5


def test_unregularized_problem_reaches_a_vertex():
    supports = np.array([[1.0, 0.0], [0.0, 1.0]])
    mu = nu = uniform_measure(supports)
    cost = np.array([[0.0, 1.0], [1.0, 0.0]])
    plan = brute_force_plan(mu, nu, cost, 0.0)
    npt.assert_allclose(plan, [[0.5, 0.0], [0.0, 0.5]], atol=1e-6)


def test_negative_lam_rejected():
    mu, nu, cost = random_problem(3, 2, 2, d=4)
    with pytest.raises(ConfigurationError):
        brute_force_plan(mu, nu, cost, -0.1)


def test_cost_shape_mismatch_rejected():
    mu, nu, _ = random_problem(4, 2, 3, d=4)
    with pytest.raises(ConfigurationError):
        brute_force_plan(mu, nu, np.zeros((2, 2)), 0.5)
