"""
Approximation bounds for greedy string maximization, and the suite that checks them

The formula functions return guaranteed ratios f(G_K) / f(O). BoundSuite
measures the actual ratio on one instance, works out which hypotheses hold,
and emits one BoundCheck per bound.
"""
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import pandas as pd

from checkers import check_backward_monotone, check_diminishing_return, check_forward_monotone
from curvature import (
    CurvatureReport, eta_bar, restricted_eta_hat, total_backward_sigma_wrt, total_forward_epsilon_wrt
)
from matroid import StringMatroid, UniformMatroid, constrained_greedy, validate_axioms
from strategies.base_strategy import GreedyTrace, ProblemSpec
from strategies.exhaustive import constrained_optimal, optimal_exhaustive
from strategies.greedy import greedy
from utils.config import CONFIG
from utils.errors import BudgetExceededError, DegenerateOracleError
from utils.export import export_frame
from utils.strings import format_string

THEOREMS = (
    "T1i", "T1ii", "T2", "C1", "C2", "P1i", "P1ii",
    "T4i", "T4ii", "C3", "T5", "C4", "P2i", "P2ii",
)

PASS = "PASS"
FAILED = "FAILED"
NOT_APPLICABLE = "NOT-APPLICABLE"


# --- Formulas ---

def _check_horizon(K: int):
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")


def _one_minus_power_over(sigma: float, scale: float, K: int) -> float:
    """(1/σ)(1 - (1 - σ/scale)^K), with the σ -> 0 limit K/scale"""
    if sigma == 0:
        return K / scale
    x = sigma / scale
    if x < 1:
        return -math.expm1(K * math.log1p(-x)) / sigma
    return (1.0 - (1.0 - x) ** K) / sigma


def t1_bound_i(sigma_O: float, K: int) -> float:
    """
    Uniform-structure bound from the total backward curvature of the optimum

    Args:
        sigma_O: σ(O) >= 0
        K: Horizon

    Returns:
        (1/σ)(1 - (1 - σ/K)^K), or 1 at σ = 0
    """
    if sigma_O < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma_O}")
    _check_horizon(K)
    return _one_minus_power_over(sigma_O, K, K)


def t1_bound_i_asymptotic(sigma_O: float) -> float:
    """(1/σ)(1 - e^-σ), the K -> ∞ limit of t1_bound_i"""
    if sigma_O < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma_O}")
    if sigma_O == 0:
        return 1.0
    return -math.expm1(-sigma_O) / sigma_O


def t1_bound_ii(max_eps_Gi: float) -> float:
    if not 0 <= max_eps_Gi <= 1:
        raise ValueError(f"epsilon must lie in [0, 1], got {max_eps_Gi}")
    return 1.0 - max_eps_Gi


def k_eta(eta: float, K: int) -> float:
    """Geometric horizon 1 + η + ... + η^(K-1), equal to K at η = 1"""
    if eta < 0:
        raise ValueError(f"eta must be >= 0, got {eta}")
    _check_horizon(K)
    if eta == 1:
        return float(K)
    return math.fsum(eta ** i for i in range(K))


def t2_bound(eta: float, K: int) -> float:
    """1 - (1 - 1/K_η)^K"""
    return 1.0 - (1.0 - 1.0 / k_eta(eta, K)) ** K


def curvature_free_bound(K: int) -> float:
    """1 - (1 - 1/K)^K, above 1 - 1/e for every finite K"""
    _check_horizon(K)
    return 1.0 - (1.0 - 1.0 / K) ** K


def p1_bound_i(sigma_O: float, eta: float, K: int) -> float:
    """(1/σ)(1 - (1 - σ/K_η)^K), or K/K_η at σ = 0"""
    if sigma_O < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma_O}")
    return _one_minus_power_over(sigma_O, k_eta(eta, K), K)


def p1_bound_ii(max_eps_Gi: float, eta: float, K: int) -> float:
    """(1 - ε) min(K/K_η, 1)"""
    if not 0 <= max_eps_Gi <= 1:
        raise ValueError(f"epsilon must lie in [0, 1], got {max_eps_Gi}")
    return (1.0 - max_eps_Gi) * min(K / k_eta(eta, K), 1.0)


def p1_bound_ii_alternate(max_eps_Gi: float, eta: float, K: int) -> float:
    """(1 - ε) K_η/K, the coefficient printed at the end of the recursion"""
    if not 0 <= max_eps_Gi <= 1:
        raise ValueError(f"epsilon must lie in [0, 1], got {max_eps_Gi}")
    return (1.0 - max_eps_Gi) * k_eta(eta, K) / K


def t4_bound_i(sigma_O: float) -> float:
    if sigma_O < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma_O}")
    return 1.0 / (1.0 + sigma_O)


def t4_bound_ii(eps_GK: float) -> float:
    if not 0 <= eps_GK <= 1:
        raise ValueError(f"epsilon must lie in [0, 1], got {eps_GK}")
    return 1.0 - eps_GK


def t5_bound(eta: float, K: int) -> float:
    """1 / (1 + η̄)"""
    return 1.0 / (1.0 + eta_bar(eta, K).value)


def p2_bound_i(sigma_O: float, eta: float, K: int) -> float:
    """1 / (σ(O) + η̄)"""
    denom = sigma_O + eta_bar(eta, K).value
    if denom <= 0:
        raise ZeroDivisionError(f"sigma(O) + eta_bar = {denom} is not positive")
    return 1.0 / denom


def p2_bound_ii(eps_GK: float, eta: float, K: int) -> float:
    """(1 - ε(G_K)) / η̄"""
    bar = eta_bar(eta, K).value
    if bar <= 0:
        raise ZeroDivisionError("eta_bar is zero")
    return (1.0 - eps_GK) / bar


# --- Checks ---

@dataclass
class BoundCheck:
    """One bound's guarantee against the measured greedy/optimal ratio"""
    theorem: str
    guaranteed_ratio: Optional[float]
    measured_ratio: float
    hypotheses_met: bool
    status: str
    raw_ratio: Optional[float] = None  # before clamping to [0, 1]
    diagnostics: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise ValueError(f"Unknown theorem: {self.theorem}")
        if self.status not in (PASS, FAILED, NOT_APPLICABLE):
            raise ValueError(f"Unknown status: {self.status}")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def failed(self) -> bool:
        return self.status == FAILED

    def to_dict(self) -> dict:
        """Convert check to dictionary"""
        return {
            "theorem": self.theorem,
            "guaranteed_ratio": self.guaranteed_ratio,
            "raw_ratio": self.raw_ratio,
            "measured_ratio": self.measured_ratio,
            "hypotheses_met": self.hypotheses_met,
            "pass": self.passed,
            "status": self.status,
            "diagnostics": "; ".join(self.diagnostics)
        }


Hypotheses = Iterable[Tuple[str, bool]]


class BoundSuite:
    """
    Runs every bound check on one instance

    The prelude computes the optimum, the greedy trace, the hypothesis flags
    and the curvatures once; each check then only reads them.

    Features:
    - Uniform structure (matroid None or uniform of rank K) or any string matroid
    - Hypotheses checked by enumeration up to length 2K, or taken as given
    - CSV/JSON export and a console summary
    """

    def __init__(
        self,
        spec: ProblemSpec,
        matroid: Optional[StringMatroid] = None,
        tol: Optional[float] = None,
        budget: Optional[int] = None,
        sigma_upper: Optional[float] = None,
        assume: Iterable[str] = ()
    ):
        """
        Initialize suite

        Args:
            spec: Problem spec (objective must satisfy f(∅) = 0)
            matroid: Optional string matroid; None means all strings of length <= K
            tol: Comparison tolerance (defaults to CONFIG['TOL'])
            budget: Evaluation cap (defaults to CONFIG['BUDGET'])
            sigma_upper: Upper bound on σ(O) to use if enumerating it exceeds the budget
            assume: Hypotheses known to hold and not enumerated
                ("forward_monotone", "diminishing_return", "backward_monotone")
        """
        self.spec = spec
        self.matroid = matroid
        self.tol = CONFIG['TOL'] if tol is None else tol
        self.budget = CONFIG['BUDGET'] if budget is None else budget
        self.sigma_upper = sigma_upper
        self.assume = set(assume)
        self.uniform = matroid is None or (isinstance(matroid, UniformMatroid) and matroid.rank == spec.horizon)

        self.trace: Optional[GreedyTrace] = None
        self.optimum = ()
        self.f_optimal = 0.0
        self.measured = 1.0
        self.hypotheses: Dict[str, bool] = {}
        self.curvatures: Dict[str, Optional[CurvatureReport]] = {}
        self.notes: List[str] = []
        self.checks: List[BoundCheck] = []

    def run(self) -> Dict:
        """
        Compute the prelude and evaluate every bound

        Returns:
            Dictionary with instance info, curvature and check tables, and counts
        """
        f = self.spec.objective
        if abs(f(())) > self.tol:
            raise ValueError(f"{f.name} has f(∅) = {f(())}; wrap it with normalize()")

        structure = "uniform" if self.uniform else self.matroid.name
        print(f"Running bound suite on {f.name} (|A|={self.spec.num_actions}, K={self.spec.horizon}, {structure})...")
        self._solve()
        self._check_hypotheses()
        self._compute_curvatures()

        self.checks = self._uniform_checks() + self._matroid_checks()
        failures = [c.theorem for c in self.checks if c.failed]
        if failures:
            print(f"WARNING: bound checks FAILED: {', '.join(failures)}")
        return self._compile_results()

    # --- prelude ---

    def _solve(self):
        if self.uniform:
            self.trace = greedy(self.spec)
            self.optimum, self.f_optimal = optimal_exhaustive(self.spec, self.budget)
        else:
            self.trace = constrained_greedy(self.spec, self.matroid)
            self.optimum, self.f_optimal = constrained_optimal(self.spec, self.matroid, self.budget)
        self.measured = 1.0 if self.f_optimal == 0 else self.trace.value / self.f_optimal

    def _enumerated(self, name: str, checker) -> bool:
        if name in self.assume:
            self.notes.append(f"{name} assumed")
            return True
        n, K = self.spec.num_actions, self.spec.horizon
        try:
            return checker(self.spec.objective, n, 2 * K, self.tol, self.budget, limit=0).is_empty
        except BudgetExceededError as e:
            self.notes.append(f"{name} unknown: {e}")
            return False

    def _check_hypotheses(self):
        f = self.spec.objective
        K = self.spec.horizon
        h = self.hypotheses
        h["forward_monotone"] = self._enumerated("forward_monotone", check_forward_monotone)
        h["diminishing_return"] = self._enumerated("diminishing_return", check_diminishing_return)
        h["backward_monotone"] = self._enumerated("backward_monotone", check_backward_monotone)
        h["submodular"] = h["forward_monotone"] and h["diminishing_return"]

        if self.matroid is None:
            h["matroid_axioms"] = True
        else:
            h["matroid_axioms"] = validate_axioms(self.matroid, self.spec.num_actions, self.budget, limit=0).is_empty
        h["greedy_complete"] = self.trace.complete and len(self.trace) == K

        margins = [f(self.trace.partial(i) + self.optimum) - self.f_optimal for i in range(1, K)]
        h["greedy_prefix_then_optimum"] = all(m >= -self.tol for m in margins)
        if any(-self.tol <= m < 0 for m in margins):
            self.notes.append("f(G_i + O) >= f(O) met within tol")

        full = f(self.trace.strategy + self.optimum) - self.f_optimal
        h["greedy_then_optimum"] = full >= -self.tol
        if -self.tol <= full < 0:
            self.notes.append("f(G_K + O) >= f(O) met within tol")

    def _curvature(self, name: str, compute: Callable[[], CurvatureReport]):
        try:
            self.curvatures[name] = compute()
        except (BudgetExceededError, DegenerateOracleError) as e:
            self.notes.append(f"{name} unavailable: {e}")
            self.curvatures[name] = None

    def _compute_curvatures(self):
        f = self.spec.objective
        n, K = self.spec.num_actions, self.spec.horizon
        tol, budget = self.tol, self.budget

        try:
            self.curvatures["sigma(O)"] = total_backward_sigma_wrt(f, self.optimum, n, K, tol, budget)
        except BudgetExceededError as e:
            if self.sigma_upper is None:
                self.notes.append(f"sigma(O) unavailable: {e}")
                self.curvatures["sigma(O)"] = None
            else:
                self.notes.append("sigma(O) replaced by the supplied upper bound (upper-bounded hypothesis)")
                self.curvatures["sigma(O)"] = CurvatureReport(
                    "sigma_wrt", float(self.sigma_upper), {"M": self.optimum}, K, note="upper-bounded hypothesis"
                )
        except DegenerateOracleError as e:
            self.notes.append(f"sigma(O) unavailable: {e}")
            self.curvatures["sigma(O)"] = None

        if self.uniform:
            for i in range(1, K):
                G_i = self.trace.partial(i)
                self._curvature(f"epsilon(G_{i})", lambda G=G_i: total_forward_epsilon_wrt(f, G, n, K, tol, budget))
        self._curvature("epsilon(G_K)", lambda: total_forward_epsilon_wrt(f, self.trace.strategy, n, K, tol, budget))
        self._curvature("eta_hat", lambda: restricted_eta_hat(f, n, K, tol, budget))

    # --- values the checks read ---

    def _available(self, name: str) -> bool:
        report = self.curvatures.get(name)
        return report is not None and report.bounded

    def _value(self, name: str) -> float:
        return max(0.0, self.curvatures[name].value)

    def _max_eps(self) -> float:
        K = self.spec.horizon
        values = [self._value(f"epsilon(G_{i})") for i in range(1, K)]
        return min(1.0, max([0.0] + values))

    def _eps_available(self) -> bool:
        return all(self._available(f"epsilon(G_{i})") for i in range(1, self.spec.horizon))

    def _make(self, theorem: str, hypotheses: Hypotheses, ratio: Callable[[], float], notes: Iterable[str] = ()) -> BoundCheck:
        failed = [name for name, ok in hypotheses if not ok]
        diagnostics = list(notes)
        if failed:
            diagnostics.append("hypotheses not met: " + ", ".join(failed))
            return BoundCheck(theorem, None, self.measured, False, NOT_APPLICABLE, None, diagnostics)

        raw = float(ratio())
        guaranteed = min(1.0, max(0.0, raw))
        status = PASS if self.measured >= guaranteed - self.tol else FAILED
        return BoundCheck(theorem, guaranteed, self.measured, True, status, raw, diagnostics)

    def _uniform_checks(self) -> List[BoundCheck]:
        K = self.spec.horizon
        h = self.hypotheses
        sigma_ok = self._available("sigma(O)")
        eta_ok = self._available("eta_hat")
        eps_ok = self._eps_available()
        sigma = self._value("sigma(O)") if sigma_ok else math.nan
        eta = self._value("eta_hat") if eta_ok else math.nan
        ke = k_eta(eta, K) if eta_ok else math.nan

        base = [("uniform structure", self.uniform)]
        submodular = [("forward monotone", h["forward_monotone"]), ("diminishing return", h["diminishing_return"])]
        monotone = [("forward monotone", h["forward_monotone"])]
        prefix_hyp = [("f(G_i + O) >= f(O)", h["greedy_prefix_then_optimum"])]

        p1_forms = []
        if eps_ok and eta_ok:
            eps = self._max_eps()
            p1_forms = [
                f"(1-eps)min(K/K_eta,1) = {p1_bound_ii(eps, eta, K):.12g}",
                f"(1-eps)K_eta/K = {p1_bound_ii_alternate(eps, eta, K):.12g}",
            ]

        return [
            self._make(
                "T1i",
                base + submodular + [("sigma(O) bounded", sigma_ok), ("sigma(O) <= K", sigma_ok and sigma <= K)],
                lambda: t1_bound_i(sigma, K),
                self._sigma_notes()
            ),
            self._make(
                "T1ii",
                base + submodular + [("epsilon(G_i) bounded", eps_ok)],
                lambda: t1_bound_ii(self._max_eps())
            ),
            self._make(
                "T2",
                base + monotone + [("eta_hat bounded", eta_ok)] + prefix_hyp,
                lambda: t2_bound(eta, K)
            ),
            self._make(
                "C1",
                base + submodular + [("backward monotone", h["backward_monotone"])],
                lambda: curvature_free_bound(K)
            ),
            self._make(
                "C2",
                base + submodular + prefix_hyp,
                lambda: curvature_free_bound(K)
            ),
            self._make(
                "P1i",
                base + monotone + [
                    ("sigma(O) bounded", sigma_ok), ("eta_hat bounded", eta_ok),
                    ("sigma(O) <= K_eta", sigma_ok and eta_ok and sigma <= ke)
                ],
                lambda: p1_bound_i(sigma, eta, K),
                self._sigma_notes()
            ),
            self._make(
                "P1ii",
                base + monotone + [("epsilon(G_i) bounded", eps_ok), ("eta_hat bounded", eta_ok)],
                lambda: min(p1_bound_ii(self._max_eps(), eta, K), p1_bound_ii_alternate(self._max_eps(), eta, K)),
                p1_forms
            ),
        ]

    def _matroid_checks(self) -> List[BoundCheck]:
        K = self.spec.horizon
        h = self.hypotheses
        sigma_ok = self._available("sigma(O)")
        eta_ok = self._available("eta_hat")
        eps_ok = self._available("epsilon(G_K)")
        sigma = self._value("sigma(O)") if sigma_ok else math.nan
        eta = self._value("eta_hat") if eta_ok else math.nan
        eps = min(1.0, self._value("epsilon(G_K)")) if eps_ok else math.nan
        bar = eta_bar(eta, K).value if eta_ok else math.nan

        base = [("matroid axioms", h["matroid_axioms"]), ("greedy complete", h["greedy_complete"])]
        submodular = [("forward monotone", h["forward_monotone"]), ("diminishing return", h["diminishing_return"])]
        monotone = [("forward monotone", h["forward_monotone"])]
        full_hyp = [("f(G_K + O) >= f(O)", h["greedy_then_optimum"])]

        notes = []
        if sigma_ok and eta_ok:
            notes.append(f"sigma(O) + eta_bar = {sigma + bar:.12g}")

        return [
            self._make(
                "T4i", base + submodular + [("sigma(O) bounded", sigma_ok)],
                lambda: t4_bound_i(sigma), self._sigma_notes()
            ),
            self._make(
                "T4ii", base + submodular + [("epsilon(G_K) bounded", eps_ok)],
                lambda: t4_bound_ii(eps)
            ),
            self._make(
                "C3", base + submodular + [("backward monotone", h["backward_monotone"])],
                lambda: 0.5
            ),
            self._make(
                "T5", base + monotone + [("eta_hat bounded", eta_ok)] + full_hyp,
                lambda: t5_bound(eta, K)
            ),
            self._make(
                "C4", base + submodular + full_hyp,
                lambda: 0.5
            ),
            self._make(
                "P2i",
                base + monotone + [
                    ("sigma(O) bounded", sigma_ok), ("eta_hat bounded", eta_ok),
                    ("sigma(O) + eta_bar > 0", sigma_ok and eta_ok and sigma + bar > 0)
                ],
                lambda: p2_bound_i(sigma, eta, K),
                notes
            ),
            self._make(
                "P2ii",
                base + monotone + [
                    ("epsilon(G_K) bounded", eps_ok), ("eta_hat bounded", eta_ok),
                    ("eta_bar > 0", eta_ok and bar > 0)
                ],
                lambda: p2_bound_ii(eps, eta, K)
            ),
        ]

    def _sigma_notes(self) -> List[str]:
        report = self.curvatures.get("sigma(O)")
        if report is not None and report.note:
            return [report.note]
        return []

    # --- results ---

    def _compile_results(self) -> Dict:
        curvature_rows = []
        for name, report in self.curvatures.items():
            curvature_rows.append({
                "quantity": name,
                "value": None if report is None else report.value,
                "bounded": None if report is None else report.bounded,
                "witness": "" if report is None else report.witness_text(),
                "search_len": None if report is None else report.search_len
            })
        if self._available("eta_hat"):
            curvature_rows.append({
                "quantity": "eta_bar",
                "value": eta_bar(self._value("eta_hat"), self.spec.horizon).value,
                "bounded": True,
                "witness": "",
                "search_len": None
            })

        checks_df = pd.DataFrame(
            [c.to_dict() for c in self.checks],
            columns=["theorem", "guaranteed_ratio", "raw_ratio", "measured_ratio",
                     "hypotheses_met", "pass", "status", "diagnostics"]
        )
        counts = {status: int((checks_df["status"] == status).sum()) for status in (PASS, FAILED, NOT_APPLICABLE)}

        return {
            "objective": self.spec.objective.name,
            "num_actions": self.spec.num_actions,
            "K": self.spec.horizon,
            "structure": "uniform" if self.uniform else self.matroid.name,
            "greedy": self.trace.to_dict(),
            "optimum": format_string(self.optimum),
            "f_greedy": self.trace.value,
            "f_optimal": self.f_optimal,
            "measured_ratio": self.measured,
            "hypotheses": dict(self.hypotheses),
            "notes": list(self.notes),
            "curvatures": pd.DataFrame(curvature_rows, columns=["quantity", "value", "bounded", "witness", "search_len"]),
            "checks": checks_df,
            "counts": counts
        }

    def export_results(
        self,
        results: Dict,
        path: Optional[str] = None,
        format: str = "csv"
    ) -> Dict[str, str]:
        """
        Export suite results to file

        Args:
            results: Results dictionary from run()
            path: Output file (defaults to CONFIG['OUTPUT_DIR']/<objective>_bounds.<format>)
            format: "csv" (one row per check) or "json" (everything)

        Returns:
            Dictionary with file paths
        """
        if path is None:
            path = os.path.join(CONFIG['OUTPUT_DIR'], f"{results['objective']}_bounds.{format}")

        meta = {
            key: results[key]
            for key in ("objective", "num_actions", "K", "structure", "greedy", "optimum",
                        "f_greedy", "f_optimal", "measured_ratio", "hypotheses", "notes", "counts")
        }
        meta["curvatures"] = results["curvatures"].to_dict(orient="records")
        export_frame(results["checks"], path, format, meta)
        print(f"Bound checks exported to: {path}")
        return {"checks": path}

    def print_summary(self, results: Dict):
        """
        Print suite summary to console

        Args:
            results: Results dictionary from run()
        """
        print("\n" + "=" * 60)
        print(f"BOUND SUITE: {results['objective']}")
        print("=" * 60)
        print(f"Structure: {results['structure']} (|A|={results['num_actions']}, K={results['K']})")
        print(f"Greedy: {results['greedy']['strategy']}  f = {results['f_greedy']:.6f}")
        print(f"Optimum: {results['optimum']}  f = {results['f_optimal']:.6f}")
        print(f"Measured ratio: {results['measured_ratio']:.6f}")
        print("-" * 60)
        for _, row in results["curvatures"].iterrows():
            value = "n/a" if row["value"] is None or pd.isna(row["value"]) else f"{row['value']:.6f}"
            print(f"{row['quantity']}: {value}")
        print("-" * 60)
        for _, row in results["checks"].iterrows():
            guaranteed = "" if pd.isna(row["guaranteed_ratio"]) else f"{row['guaranteed_ratio']:.6f}"
            print(f"{row['theorem']:<5} {row['status']:<15} {guaranteed}")
        counts = results["counts"]
        print("-" * 60)
        print(f"PASS: {counts[PASS]}  FAILED: {counts[FAILED]}  NOT-APPLICABLE: {counts[NOT_APPLICABLE]}")
        print("=" * 60 + "\n")


def run_bound_suite(
    spec: ProblemSpec,
    matroid: Optional[StringMatroid] = None,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
    sigma_upper: Optional[float] = None,
    assume: Iterable[str] = ()
) -> List[BoundCheck]:
    """
    Evaluate every bound on an instance

    Returns:
        List of BoundCheck in THEOREMS order
    """
    suite = BoundSuite(spec, matroid, tol, budget, sigma_upper, assume)
    suite.run()
    order = {name: i for i, name in enumerate(THEOREMS)}
    return sorted(suite.checks, key=lambda c: order[c.theorem])
