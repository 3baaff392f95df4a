"""
Tests for the bound formulas and the bound suite
"""
import json
import math

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, strategies as st

from bounds import (
    FAILED, NOT_APPLICABLE, PASS, THEOREMS, BoundCheck, BoundSuite, curvature_free_bound,
    k_eta, p1_bound_i, p1_bound_ii, p1_bound_ii_alternate, p2_bound_i, p2_bound_ii,
    run_bound_suite, t1_bound_i, t1_bound_i_asymptotic, t1_bound_ii, t2_bound,
    t4_bound_i, t4_bound_ii, t5_bound
)
from matroid import (
    MaxRepeatsMatroid, PrefixForbiddenMatroid, build_theorem3_permutation,
    constrained_greedy, validate_axioms
)
from objectives.base_objective import FunctionOracle
from objectives.table import LinearOracle, random_submodular_table
from strategies.base_strategy import ProblemSpec
from utils.strings import iter_strings

ONE_MINUS_INV_E = 1.0 - math.exp(-1.0)

unit = st.floats(min_value=0.0, max_value=1.0, allow_subnormal=False)


# --- formulas ---

def test_t1_known_values():
    assert t1_bound_i(1.0, 2) == pytest.approx(0.75)
    assert t1_bound_i(0.0, 7) == 1.0
    assert t1_bound_i_asymptotic(1.0) == pytest.approx(0.6321205588)
    assert t1_bound_i_asymptotic(0.0) == 1.0
    assert t1_bound_ii(0.0) == 1.0
    assert t1_bound_ii(1.0) == 0.0
    with pytest.raises(ValueError):
        t1_bound_i(-0.5, 3)
    with pytest.raises(ValueError):
        t1_bound_ii(1.5)


def test_k_eta_known_values():
    assert k_eta(1.0, 5) == 5.0
    assert k_eta(0.5, 3) == pytest.approx(1.75)
    assert k_eta(2.0, 3) == pytest.approx(7.0)
    with pytest.raises(ValueError):
        k_eta(0.5, 0)


def test_t2_known_values():
    assert t2_bound(1.0, 5) == pytest.approx(1.0 - 0.8 ** 5)
    assert t2_bound(1.0, 5) == pytest.approx(0.67232)
    assert t2_bound(0.0, 4) == 1.0
    assert t2_bound(0.5, 3) == pytest.approx(0.921283, abs=1e-6)


@pytest.mark.parametrize("K", range(1, 11))
def test_curvature_free_values(K):
    expected = 1.0 - (1.0 - 1.0 / K) ** K
    assert t1_bound_i(1.0, K) == pytest.approx(expected)
    assert curvature_free_bound(K) == pytest.approx(expected)
    assert t2_bound(1.0, K) == pytest.approx(expected)
    assert expected > ONE_MINUS_INV_E


@pytest.mark.parametrize("K", range(1, 11))
def test_half_approximations(K):
    assert t4_bound_i(1.0) == 0.5
    assert t5_bound(1.0, K) == 0.5
    assert p2_bound_i(1.0, 1.0, K) == 0.5


def test_matroid_formula_known_values():
    assert t4_bound_i(0.0) == 1.0
    assert t4_bound_ii(0.25) == 0.75
    assert t5_bound(0.0, 3) == 1.0
    assert t5_bound(2.0, 2) == pytest.approx(1.0 / 9.0)
    assert p2_bound_ii(0.0, 1.0, 4) == 1.0
    assert p2_bound_ii(0.5, 2.0, 2) == pytest.approx(0.5 / 8.0)
    with pytest.raises(ZeroDivisionError):
        p2_bound_i(0.0, 0.0, 3)
    with pytest.raises(ZeroDivisionError):
        p2_bound_ii(0.0, 0.0, 3)


def test_p1_known_values():
    # σ -> 0 limit is K / K_η
    assert p1_bound_i(0.0, 0.5, 3) == pytest.approx(3 / 1.75)
    assert p1_bound_i(1.0, 0.5, 3) == pytest.approx(1.0 - (1.0 - 1.0 / 1.75) ** 3)
    assert p1_bound_ii(0.2, 0.5, 3) == pytest.approx(0.8)
    assert p1_bound_ii_alternate(0.2, 0.5, 3) == pytest.approx(0.8 * 1.75 / 3)
    assert p1_bound_ii(0.2, 1.0, 3) == p1_bound_ii_alternate(0.2, 1.0, 3)


@given(st.floats(min_value=0.0, max_value=3.0), st.integers(min_value=1, max_value=12))
def test_p1_reduces_to_t1_at_eta_one(sigma, K):
    assert p1_bound_i(sigma, 1.0, K) == pytest.approx(t1_bound_i(sigma, K))


@given(st.floats(min_value=0.0, max_value=5.0))
def test_p2_matches_t4_at_eta_one(sigma):
    assert p2_bound_i(sigma, 1.0, 3) == pytest.approx(t4_bound_i(sigma))


@given(
    unit,
    unit,
    st.integers(min_value=1, max_value=20)
)
def test_t1_nonincreasing_in_sigma(s1, s2, K):
    lo, hi = sorted((s1, s2))
    assert t1_bound_i(hi, K) <= t1_bound_i(lo, K) + 1e-12


@given(unit, st.integers(min_value=1, max_value=20))
def test_t1_nonincreasing_in_K_and_above_limit(sigma, K):
    assert t1_bound_i(sigma, K + 1) <= t1_bound_i(sigma, K) + 1e-12
    assert t1_bound_i(sigma, K) >= t1_bound_i_asymptotic(sigma) - 1e-12


@given(
    unit,
    unit,
    st.integers(min_value=1, max_value=20)
)
def test_t2_nonincreasing_in_eta(e1, e2, K):
    lo, hi = sorted((e1, e2))
    assert t2_bound(hi, K) <= t2_bound(lo, K) + 1e-12


def test_boundcheck_validation():
    with pytest.raises(ValueError):
        BoundCheck("T9", 0.5, 1.0, True, PASS)
    with pytest.raises(ValueError):
        BoundCheck("T1i", 0.5, 1.0, True, "MAYBE")
    check = BoundCheck("T1i", 0.5, 1.0, True, PASS, 0.5, ["note"])
    assert check.passed and not check.failed
    assert check.to_dict()["pass"] is True
    assert check.to_dict()["diagnostics"] == "note"


# --- suite ---

def test_linear_instance_passes_everything(linear_spec):
    checks = run_bound_suite(linear_spec)
    assert [c.theorem for c in checks] == list(THEOREMS)
    assert all(c.status == PASS for c in checks)
    assert all(c.measured_ratio == 1.0 for c in checks)


def test_trap_is_not_applicable(trap_spec):
    suite = BoundSuite(trap_spec)
    results = suite.run()
    assert results["measured_ratio"] == pytest.approx(0.5)
    assert not results["hypotheses"]["forward_monotone"]
    by_name = {c.theorem: c for c in suite.checks}
    for name in ("T1i", "T1ii", "T2"):
        assert by_name[name].status == NOT_APPLICABLE
        assert "forward monotone" in by_name[name].diagnostics[-1]
    assert results["counts"][FAILED] == 0


def test_suite_requires_normalized_objective():
    spec = ProblemSpec(2, 2, FunctionOracle(2, lambda s: 1.0 + len(s)))
    with pytest.raises(ValueError):
        BoundSuite(spec).run()


def test_sigma_upper_fallback(linear_oracle):
    spec = ProblemSpec(3, 2, linear_oracle)
    suite = BoundSuite(
        spec, budget=50, sigma_upper=0.5,
        assume=("forward_monotone", "diminishing_return", "backward_monotone")
    )
    suite.run()
    t1 = next(c for c in suite.checks if c.theorem == "T1i")
    assert t1.status == PASS
    assert t1.guaranteed_ratio == pytest.approx(0.875)
    assert "upper-bounded hypothesis" in t1.diagnostics
    t2 = next(c for c in suite.checks if c.theorem == "T2")
    assert t2.status == NOT_APPLICABLE
    assert any("eta_hat unavailable" in note for note in suite.notes)


def test_budget_makes_hypotheses_unknown(linear_oracle):
    spec = ProblemSpec(3, 2, linear_oracle)
    suite = BoundSuite(spec, budget=50)
    results = suite.run()
    assert not results["hypotheses"]["submodular"]
    assert results["counts"][PASS] == 0


def test_results_frames_and_export(linear_spec, tmp_path):
    suite = BoundSuite(linear_spec)
    results = suite.run()
    assert isinstance(results["checks"], pd.DataFrame)
    assert list(results["curvatures"]["quantity"]) == [
        "sigma(O)", "epsilon(G_1)", "epsilon(G_K)", "eta_hat", "eta_bar"
    ]
    assert results["counts"] == {PASS: 14, FAILED: 0, NOT_APPLICABLE: 0}

    csv_path = tmp_path / "checks.csv"
    suite.export_results(results, str(csv_path), "csv")
    frame = pd.read_csv(csv_path)
    assert list(frame["theorem"]) == list(THEOREMS)

    json_path = tmp_path / "checks.json"
    suite.export_results(results, str(json_path), "json")
    doc = json.loads(json_path.read_text())
    assert doc["optimum"] == "1,1"
    assert len(doc["rows"]) == len(THEOREMS)


def test_print_summary(linear_spec, capsys):
    suite = BoundSuite(linear_spec)
    suite.print_summary(suite.run())
    out = capsys.readouterr().out
    assert "BOUND SUITE" in out
    assert "PASS: 14" in out


def test_run_prints_progress(linear_spec, capsys):
    BoundSuite(linear_spec).run()
    out = capsys.readouterr().out
    assert out.startswith("Running bound suite on linear (|A|=3, K=2, uniform)")
    assert "FAILED" not in out


@pytest.mark.slow
def test_soundness_on_random_submodular_tables():
    failures = []
    applicable = 0
    for seed in range(500):
        f = random_submodular_table(3, 4, np.random.default_rng(seed))
        suite = BoundSuite(ProblemSpec(3, 4, f, forward_monotone=True))
        results = suite.run()
        assert results["hypotheses"]["submodular"], seed
        failures += [(seed, c.theorem) for c in suite.checks if c.failed]
        applicable += results["counts"][PASS]
    assert failures == []
    assert applicable > 500 * 5


def _random_matroid(rng, num_actions, rank):
    if rng.random() < 0.5:
        return MaxRepeatsMatroid(rank, caps=rng.integers(2, 4, size=num_actions))
    size = int(rng.integers(1, num_actions))
    actions = rng.choice(num_actions, size=size, replace=False)
    return PrefixForbiddenMatroid.opening_only(num_actions, rank, actions.tolist())


@pytest.mark.slow
def test_soundness_under_matroids():
    n, K = 3, 4
    failures = []
    for seed in range(200):
        rng = np.random.default_rng(10_000 + seed)
        m = _random_matroid(rng, n, K)
        assert validate_axioms(m, n).is_empty, m.to_dict()

        f = random_submodular_table(n, K, rng)
        spec = ProblemSpec(n, K, f, forward_monotone=True)
        suite = BoundSuite(spec, m)
        suite.run()
        failures += [(seed, c.theorem) for c in suite.checks if c.failed]
        assert next(c for c in suite.checks if c.theorem == "T4i").status == PASS

        trace = constrained_greedy(spec, m)
        bases = [s for s in iter_strings(n, K) if m.is_independent(s)]
        picks = rng.choice(len(bases), size=min(20, len(bases)), replace=False)
        for idx in picks:
            cert = build_theorem3_permutation(f, m, trace, bases[idx])
            assert cert.verified, (seed, bases[idx])
    assert failures == []
