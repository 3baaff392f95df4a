"""
Shared fixtures
"""
import numpy as np
import pytest

from objectives.table import LinearOracle, TableOracle, random_submodular_table
from strategies.base_strategy import ProblemSpec


@pytest.fixture
def linear_oracle():
    """String-linear objective with weights (1, 5, 2)"""
    return LinearOracle([1.0, 5.0, 2.0])


@pytest.fixture
def linear_spec(linear_oracle):
    return ProblemSpec(num_actions=3, horizon=2, objective=linear_oracle)


@pytest.fixture
def trap_oracle():
    """Greedy takes (0) first and is stuck at 1; (1, 1) reaches 2"""
    values = {
        (): 0.0,
        (0,): 1.0,
        (1,): 0.9,
        (0, 0): 1.0,
        (0, 1): 1.0,
        (1, 0): 0.9,
        (1, 1): 2.0,
    }
    return TableOracle(2, values, default=0.0, name="trap")


@pytest.fixture
def trap_spec(trap_oracle):
    return ProblemSpec(num_actions=2, horizon=2, objective=trap_oracle)


@pytest.fixture
def make_table():
    """Factory for seeded random string-submodular tables"""
    def _make(seed: int, num_actions: int = 3, K: int = 3):
        return random_submodular_table(num_actions, K, np.random.default_rng(seed))
    return _make
