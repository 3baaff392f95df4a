"""
Tests for the monotonicity and diminishing-return checkers
"""
import math

import pytest

from checkers import (
    check_backward_monotone, check_diminishing_return, check_forward_monotone,
    check_lemma1, is_string_submodular
)
from objectives.base_objective import FunctionOracle, OrderSymmetricOracle
from objectives.infogain import InfoGainModel, infogain_objective
from objectives.table import TableOracle
from objectives.tasks import TaskModel, task_objective


def test_linear_is_submodular(linear_oracle):
    assert check_forward_monotone(linear_oracle, 3, 4).is_empty
    assert check_backward_monotone(linear_oracle, 3, 4).is_empty
    assert check_diminishing_return(linear_oracle, 3, 4).is_empty
    assert is_string_submodular(linear_oracle, 3, 4)


def test_decreasing_oracle_violates_everywhere():
    f = FunctionOracle(2, lambda s: -float(len(s)))
    report = check_forward_monotone(f, 2, 3)
    # every (M, a) with |M| < 3
    assert report.count == 2 * (1 + 2 + 4)
    assert report.worst_margin == pytest.approx(1.0)
    assert bool(report)


def test_violation_decoding():
    f = TableOracle(2, {(0,): 1.0, (0, 1): 0.5, (1,): 1.0, (0, 0): 1.0, (1, 0): 1.0, (1, 1): 1.0})
    report = check_forward_monotone(f, 2, 2)
    assert ((0,), (1,)) in report.violations
    assert report.to_dict()["violations"][0] == ["0", "1"]
    assert list(report.to_frame().columns) == ["check", "violation"]


def test_limit_keeps_counting():
    f = FunctionOracle(2, lambda s: -float(len(s)))
    report = check_forward_monotone(f, 2, 3, limit=2)
    assert len(report.violations) == 2
    assert report.count == 14


def test_planted_backward_violation():
    values = {(0,): 1.0, (1,): 1.0, (0, 0): 2.0, (0, 1): 2.0, (1, 0): 0.5, (1, 1): 2.0}
    f = TableOracle(2, values)
    report = check_backward_monotone(f, 2, 1)
    assert report.is_empty
    report = check_backward_monotone(f, 2, 2)
    assert report.violations == [((1,), (0,))]


def test_order_symmetric_monotone_is_backward_monotone():
    weights = [0.4, 1.0, 0.7]
    f = OrderSymmetricOracle(FunctionOracle(3, lambda s: math.log1p(sum(weights[a] for a in s))))
    assert check_forward_monotone(f, 3, 4).is_empty
    assert check_backward_monotone(f, 3, 4).is_empty


def test_diminishing_return_violation_decoded():
    # gain of 1 after (0) is 2, after () only 1
    values = {(0,): 1.0, (1,): 1.0, (0, 0): 1.5, (0, 1): 3.0, (1, 0): 1.5, (1, 1): 1.5}
    f = TableOracle(2, values)
    report = check_diminishing_return(f, 2, 2)
    assert report.violations == [((), (0,), (1,))]
    assert report.worst_margin == pytest.approx(1.0)


def test_task_model_time_independent_is_submodular():
    m = TaskModel(2, [[[0.3, 0.6]], [[0.5, 0.4]]], L=[0.2, 0.2], U=[0.7, 0.7])
    f = task_objective(m)
    assert check_diminishing_return(f, 2, 4).is_empty
    assert check_forward_monotone(f, 2, 4).is_empty


def test_infogain_forward_monotone_any_noise():
    m = InfoGainModel(s0=2.0, t0=1.0, noise_vars=[2.0, 0.5, 1.5, 0.7], K=2, grid=[0.0, 0.5, 1.0])
    f = infogain_objective(m)
    assert check_forward_monotone(f, 3, 4).is_empty


def test_infogain_decreasing_noise_violates_diminishing_return():
    m = InfoGainModel(s0=2.0, t0=1.0, noise_vars=[2.0, 1.5, 1.0, 0.5], K=2, grid=[0.0, 1.0])
    f = infogain_objective(m)
    assert not check_diminishing_return(f, 2, 4).is_empty


def test_singleton_sum(make_table):
    assert check_lemma1(make_table(2), 3, 5).is_empty
    f = TableOracle(2, {(0,): 1.0, (1,): 1.0, (0, 1): 3.0})
    assert check_lemma1(f, 2, 2).violations == [((0, 1),)]


def test_action_count_mismatch(linear_oracle):
    with pytest.raises(ValueError):
        check_forward_monotone(linear_oracle, 2, 2)
