"""
Tests for forward/backward greedy and the exhaustive optimum
"""
from itertools import product

import numpy as np
import pytest

from objectives.base_objective import OrderSymmetricOracle
from objectives.table import LinearOracle, TableOracle
from objectives.tasks import TaskModel, task_objective
from strategies.base_strategy import ProblemSpec
from strategies.exhaustive import constrained_optimal, optimal_exhaustive
from strategies.greedy import GreedyStrategy, backward_greedy, greedy
from utils.errors import BudgetExceededError


def test_greedy_on_linear(linear_spec):
    trace = greedy(linear_spec)
    assert trace.strategy == (1, 1)
    assert trace.stage_gains == [5.0, 5.0]
    assert trace.values == [0.0, 5.0, 10.0]
    assert trace.tie_sets == [(1,), (1,)]
    assert trace.partial(1) == (1,)


def test_greedy_trap(trap_spec):
    trace = greedy(trap_spec)
    assert trace.strategy == (0, 0)
    assert trace.value == 1.0
    # both extensions of (0) gain nothing
    assert trace.tie_sets[1] == (0, 1)

    optimum, value = optimal_exhaustive(trap_spec)
    assert optimum == (1, 1)
    assert value == 2.0


def test_optimal_linear(linear_oracle):
    spec = ProblemSpec(3, 3, linear_oracle)
    assert optimal_exhaustive(spec) == ((1, 1, 1), 15.0)


def test_optimal_forward_monotone_is_full_length(make_table):
    f = make_table(3)
    spec = ProblemSpec(3, 3, f, forward_monotone=True)
    optimum, _ = optimal_exhaustive(spec)
    assert len(optimum) == 3


def test_optimal_scans_short_strings_when_not_monotone():
    f = TableOracle(2, {(0,): 3.0, (0, 0): 1.0, (1, 1): 2.0})
    assert optimal_exhaustive(ProblemSpec(2, 2, f)) == ((0,), 3.0)


def test_optimal_budget(linear_oracle):
    with pytest.raises(BudgetExceededError):
        optimal_exhaustive(ProblemSpec(3, 4, linear_oracle), budget=50)


def test_backward_greedy_matches_forward_on_linear(linear_spec):
    assert backward_greedy(linear_spec).value == greedy(linear_spec).value


def test_backward_greedy_on_symmetric_oracle(make_table):
    f = OrderSymmetricOracle(make_table(11))
    spec = ProblemSpec(3, 3, f)
    assert backward_greedy(spec).value == pytest.approx(greedy(spec).value)


def test_backward_greedy_against_prepend_enumeration():
    values = {(0,): 1.0, (1,): 2.0, (0, 0): 1.5, (0, 1): 4.0, (1, 0): 2.5, (1, 1): 2.2}
    f = TableOracle(2, values)
    trace = backward_greedy(ProblemSpec(2, 2, f))

    # replay: the best singleton, then the best prepend onto it
    first = max(range(2), key=lambda a: f((a,)))
    second = max(range(2), key=lambda a: f((a, first)) - f((first,)))
    assert trace.strategy == (second, first) == (0, 1)
    assert trace.direction == "backward"
    assert trace.partial(1) == (1,)
    assert trace.value == 4.0

    every_trace = {(b, a): f((b, a)) for a, b in product(range(2), repeat=2)}
    assert trace.value == every_trace[trace.strategy]


def test_greedy_matches_best_first_order_on_time_independent_tasks():
    p = np.array([0.3, 0.7, 0.5])
    m = TaskModel(3, np.tile(p, (1, 1, 1)), L=[0.2, 0.2, 0.2], U=[0.8, 0.8, 0.8])
    spec = ProblemSpec(3, 3, task_objective(m), forward_monotone=True)
    trace = greedy(spec)
    assert trace.strategy == (1, 1, 1)
    _, best = optimal_exhaustive(spec)
    assert trace.value == pytest.approx(best)


def test_tie_tolerance_parameter():
    f = LinearOracle([1.0, 1.0 + 1e-6])
    spec = ProblemSpec(2, 1, f)
    assert GreedyStrategy().run(spec).tie_sets == [(1,)]
    assert GreedyStrategy({"tol": 1e-3}).run(spec).tie_sets == [(0, 1)]


def test_constrained_optimal_rejects_empty_family(linear_spec):
    class Nothing:
        rank = 2

        def is_independent(self, string):
            return False

    with pytest.raises(ValueError):
        constrained_optimal(linear_spec, Nothing())


def test_problem_spec_validation(linear_oracle):
    with pytest.raises(ValueError):
        ProblemSpec(3, 0, linear_oracle)
    with pytest.raises(ValueError):
        ProblemSpec(2, 2, linear_oracle)


def test_trace_to_dict(linear_spec):
    doc = greedy(linear_spec).to_dict()
    assert doc["strategy"] == "1,1"
    assert doc["tie_sets"] == ["1", "1"]
    assert doc["complete"] is True
