import numpy as np
import pytest

from otood.transport import cosine_cost_matrix, uniform_measure


def unit_rows(rng, n, d):
    """Random unit-norm rows."""
    x = rng.standard_normal((n, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def random_problem(seed, n, m, d=16):
    """A random transport instance: (mu, nu, cost) with uniform weights."""
    rng = np.random.default_rng(seed)
    train = unit_rows(rng, n, d)
    test = unit_rows(rng, m, d)
    mu = uniform_measure(train)
    nu = uniform_measure(test)
    return mu, nu, cosine_cost_matrix(train, test)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
