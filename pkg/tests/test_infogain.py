"""
Tests for the two-channel information-gain model
"""
import math
from itertools import permutations

import numpy as np
import pytest

from checkers import check_forward_monotone
from curvature import restricted_eta_hat
from objectives.infogain import (
    InfoGainModel, InfoGainOracle, MatrixInfoGainOracle, PosteriorState, eta_hat_lower_closed_form,
    eta_hat_lower_interval, eta_hat_upper_closed_form, first_split_report, greedy_first_split,
    infogain_objective, infogain_submodularity_witness, random_infogain_model,
    t2_condition_sufficient, verify_first_action_prefix
)
from strategies.base_strategy import ProblemSpec
from strategies.greedy import greedy
from utils.errors import DepthExceededError
from utils.strings import iter_strings


def test_single_measurement():
    m = InfoGainModel(s0=1.0, t0=0.5, noise_vars=[1.0], K=1)
    f = infogain_objective(m)
    assert f((m.action(1.0),)) == pytest.approx(0.5 * math.log(2.0))
    assert f(()) == 0.0


def test_posterior_state():
    state = PosteriorState(2.0, 1.0).update(0.5, 2.0)
    assert state.s == pytest.approx(1.0 / (0.5 + 0.25))
    assert state.t == pytest.approx(1.0 / (1.0 + 0.25))
    assert state.gain() == pytest.approx(0.5 * (math.log(2.0 / state.s) + math.log(1.0 / state.t)))


def test_matches_matrix_oracle():
    rng = np.random.default_rng(0)
    m = random_infogain_model(3, rng, a=0.8, b=1.6, s0=2.0, t0=0.7)
    f = InfoGainOracle(m, check_trace=True)
    reference = MatrixInfoGainOracle(m)
    for _ in range(1000):
        length = int(rng.integers(0, m.probe_depth + 1))
        s = tuple(int(a) for a in rng.integers(0, m.num_actions, size=length))
        assert f(s) == pytest.approx(reference(s), rel=1e-12, abs=1e-14)


def test_levels_match_recursion():
    m = InfoGainModel(s0=2.0, t0=1.0, noise_vars=[1.0, 1.5, 0.8], K=2, grid=[0.0, 0.3, 1.0])
    f = InfoGainOracle(m, check_trace=True)
    levels = f.levels(3)
    for length in range(4):
        for idx, s in enumerate(iter_strings(3, length)):
            assert levels[length][idx] == pytest.approx(f.posterior(s).gain(), rel=1e-13)


def test_trace_identity_guard():
    m = InfoGainModel(s0=2.0, t0=1.0, noise_vars=[1.0], K=1)
    f = InfoGainOracle(m, check_trace=True)
    broken = PosteriorState(2.0, 1.0, 1.0, 0.5)
    with pytest.raises(RuntimeError):
        f._check_trace(broken, 1)


def test_permutation_invariance_with_iid_noise():
    m = InfoGainModel(s0=1.5, t0=1.0, noise_vars=[1.2], K=2, grid=[0.0, 0.5, 1.0])
    f = infogain_objective(m)
    for s in iter_strings(3, 3):
        for p in permutations(s):
            assert f(p) == pytest.approx(f(s), rel=1e-12)


def test_forward_monotone_whatever_the_noise():
    m = random_infogain_model(2, np.random.default_rng(3), nondecreasing=False)
    assert check_forward_monotone(infogain_objective(m), m.num_actions, 4).is_empty


def test_validation():
    with pytest.raises(ValueError):
        InfoGainModel(s0=0.5, t0=1.0, noise_vars=[1.0], K=1)
    with pytest.raises(ValueError):
        InfoGainModel(s0=1.0, t0=0.5, noise_vars=[1.0, 3.0], K=1, a=1.0, b=1.5)
    with pytest.raises(ValueError):
        InfoGainModel(s0=1.0, t0=0.5, noise_vars=[1.0], K=1, grid=[0.0, 1.5])
    with pytest.raises(ValueError):
        InfoGainModel(s0=1.0, t0=0.5, noise_vars=[], K=1)
    with pytest.raises(ValueError):
        InfoGainModel.from_dict({"s0": 1.0, "t0": 0.5, "K": 1})
    m = InfoGainModel(s0=1.0, t0=0.5, noise_vars=[1.0], K=1)
    with pytest.raises(ValueError):
        m.action(0.6)


def test_document_round_trip():
    m = InfoGainModel(s0=2.0, t0=1.0, noise_vars=[1.0, 1.2], K=2, a=1.0, b=1.1, grid=[0, 0.5, 1])
    again = InfoGainModel.from_dict(m.to_dict())
    assert again.to_dict() == m.to_dict()
    assert InfoGainModel.from_dict(m.to_dict(), grid=[0.0, 1.0]).num_actions == 2


def test_variances_repeat_last():
    m = InfoGainModel(s0=1.0, t0=1.0, noise_vars=[1.0, 2.0], K=2)
    np.testing.assert_allclose(m.variances(5), [1.0, 2.0, 2.0, 2.0, 2.0])
    f = infogain_objective(m)
    with pytest.raises(DepthExceededError):
        f((0,) * (m.probe_depth + 1))


def test_constant_noise_is_submodular():
    m = InfoGainModel(s0=2.0, t0=1.0, noise_vars=[1.3], K=2)
    witness = infogain_submodularity_witness(m)
    assert witness.nondecreasing and witness.dr_empty
    assert witness.eta_hat <= 1.0 + 1e-9
    assert witness.stage is None and not witness.confirmed
    assert eta_hat_lower_closed_form(m) == pytest.approx(1.0)


def test_increasing_noise_is_submodular():
    m = InfoGainModel(s0=2.0, t0=1.0, noise_vars=[1.0, 1.1, 1.4, 1.9], K=2)
    witness = infogain_submodularity_witness(m)
    assert witness.dr_empty
    assert witness.eta_hat <= 1.0 + 1e-9


def test_decreasing_step_witness():
    m = InfoGainModel(s0=2.0, t0=1.0, noise_vars=[1.0, 1.8, 1.2, 1.2], K=2)
    witness = infogain_submodularity_witness(m)
    assert not witness.nondecreasing and not witness.dr_empty
    assert witness.stage == 2
    assert witness.prefix == (m.action(1.0),)
    assert witness.confirmed
    assert witness.gain_after == pytest.approx(0.5 * math.log1p(1.0 / 1.2))
    assert witness.gain_before == pytest.approx(0.5 * math.log1p(1.0 / 1.8))
    assert witness.eta_hat > 1.0
    assert witness.to_dict()["confirmed"] is True


def test_witness_needs_pure_actions():
    m = InfoGainModel(s0=2.0, t0=1.0, noise_vars=[1.0], K=1, grid=[0.25, 0.75])
    with pytest.raises(ValueError):
        infogain_submodularity_witness(m)
    with pytest.raises(ValueError):
        eta_hat_lower_closed_form(m)


@pytest.mark.slow
def test_submodularity_equivalence_and_eta_sandwich():
    mismatches = []
    for seed in range(200):
        rng = np.random.default_rng(seed)
        order = [None, True, False][seed % 3]
        m = random_infogain_model(3, rng, nondecreasing=order)
        assert m.num_actions == 5

        witness = infogain_submodularity_witness(m)
        eta = witness.eta_hat
        nondecreasing = bool(np.all(np.diff(m.variances(2 * m.K)) >= 0))
        if (eta <= 1.0 + 1e-9) != nondecreasing:
            mismatches.append(seed)
        if not nondecreasing:
            assert witness.confirmed, seed

        upper = eta_hat_upper_closed_form(m)
        assert eta_hat_lower_interval(m) <= eta_hat_lower_closed_form(m) + 1e-9
        assert eta_hat_lower_closed_form(m) <= eta + 1e-9, seed
        assert eta <= upper.instance + 1e-9, seed
        assert upper.instance <= upper.interval + 1e-9, seed
    assert mismatches == []


def test_lower_bound_on_decreasing_noise():
    m = InfoGainModel(s0=1.0, t0=0.5, noise_vars=[2.0, 1.0, 1.5, 1.0, 2.0, 1.0], K=3)
    f = infogain_objective(m)
    eta = restricted_eta_hat(f, m.num_actions, m.K)
    lower = eta_hat_lower_closed_form(m)
    assert 1.0 < lower <= eta.value + 1e-9


def test_upper_bound_grows_with_K():
    small = InfoGainModel(s0=1.0, t0=0.5, noise_vars=[1.5], K=2, a=1.0, b=1.5)
    large = InfoGainModel(s0=1.0, t0=0.5, noise_vars=[1.5], K=6, a=1.0, b=1.5)
    assert eta_hat_upper_closed_form(large).instance > eta_hat_upper_closed_form(small).instance
    assert eta_hat_upper_closed_form(large).interval > eta_hat_upper_closed_form(small).interval


def test_first_split_known_values():
    assert greedy_first_split(InfoGainModel(s0=1.0, t0=1.0, noise_vars=[2.0], K=1)) == 0.5
    assert greedy_first_split(InfoGainModel(s0=10.0, t0=0.1, noise_vars=[1.0], K=1)) == 1.0


def test_first_split_interior_optimum():
    m = InfoGainModel(s0=4.0, t0=1.0, noise_vars=[0.64], K=1)
    report = first_split_report(m)
    assert report.variance_form == pytest.approx(0.74)
    assert report.deviation_form == pytest.approx(0.8)
    assert report.numeric == pytest.approx(0.74, abs=1e-6)
    assert report.matches == "variance"
    assert report.grid_choice == 0.75


def test_first_split_unit_noise_matches_both():
    report = first_split_report(InfoGainModel(s0=2.0, t0=1.0, noise_vars=[1.0], K=1))
    assert report.variance_form == pytest.approx(0.75)
    assert report.matches == "both"


def test_fine_grid_greedy_approaches_first_split():
    grid = np.linspace(0.0, 1.0, 101).tolist()
    m = InfoGainModel(s0=4.0, t0=1.0, noise_vars=[0.64], K=1, grid=grid)
    trace = greedy(ProblemSpec(m.num_actions, 1, infogain_objective(m)))
    assert abs(grid[trace.strategy[0]] - greedy_first_split(m)) <= 0.01


def test_t2_condition_known_values():
    equal = InfoGainModel(s0=1.0, t0=1.0, noise_vars=[1.0], K=2, a=1.0, b=1.0)
    assert t2_condition_sufficient(equal)
    near = InfoGainModel(s0=1.0, t0=1.0, noise_vars=[1.0], K=2, a=1.0, b=1.05)
    assert t2_condition_sufficient(near)
    wide = InfoGainModel(s0=1.0, t0=1.0, noise_vars=[1.0], K=3, a=1.0, b=2.0)
    assert not t2_condition_sufficient(wide)


def test_t2_condition_implies_first_action_prefix():
    m = InfoGainModel(s0=1.0, t0=0.1, noise_vars=[1.0, 1.0404], K=2, a=1.0, b=1.02)
    assert t2_condition_sufficient(m)
    assert greedy_first_split(m) == 1.0
    report = verify_first_action_prefix(m)
    assert report.is_empty
    assert report.check == "first_action_prefix"


def test_random_model_orders():
    rng = np.random.default_rng(11)
    up = random_infogain_model(3, rng, nondecreasing=True)
    assert np.all(np.diff(up.noise_vars) >= 0)
    down = random_infogain_model(3, rng, nondecreasing=False)
    assert np.any(np.diff(down.noise_vars) < 0)
    assert len(down.noise_vars) == 6
