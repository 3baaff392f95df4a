"""
Subtask-accomplishment objective

There are n subtasks. Taking action a at stage j accomplishes subtask i with
probability p_i^j(a), independently across stages, and the objective is the
expected fraction of subtasks accomplished:

    f((a_1, ..., a_k)) = (1/n) sum_i (1 - prod_j (1 - p_i^j(a_j)))

Instance JSON:
    {"n": 2, "K": 3, "probs": [[[...per action...] per stage] per subtask],
     "L": [...per action...], "U": [...per action...]}
Stages past the declared ones repeat the last declared stage.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import pandas as pd

from bounds import t1_bound_i, t2_bound
from curvature import elemental_forward_eta, total_backward_sigma_wrt
from strategies.base_strategy import ProblemSpec
from strategies.exhaustive import optimal_exhaustive
from strategies.greedy import greedy
from utils.config import CONFIG
from utils.errors import DepthExceededError, NotMonotoneError
from utils.strings import ActionString, format_string
from .base_objective import ObjectiveOracle

logger = logging.getLogger(__name__)

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0

# Slack for probabilities sitting exactly on a declared bound
_BOUND_SLACK = 1e-12


@dataclass
class TaskModel:
    """Stagewise accomplishment probabilities with per-action bounds"""
    K: int
    probs: np.ndarray  # (subtasks, declared stages, actions)
    L: np.ndarray      # per-action lower bound
    U: np.ndarray      # per-action upper bound

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        self.L = np.asarray(self.L, dtype=float)
        self.U = np.asarray(self.U, dtype=float)
        self.validate()

    def validate(self) -> bool:
        """
        Check shapes and the bound invariants

        Returns:
            True if valid, raises ValueError otherwise
        """
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.probs.ndim != 3 or 0 in self.probs.shape:
            raise ValueError(f"probs must be a nonempty [subtask][stage][action] array, got shape {self.probs.shape}")
        actions = self.probs.shape[2]
        if self.L.shape != (actions,) or self.U.shape != (actions,):
            raise ValueError(f"L and U need one entry per action ({actions})")
        if not (np.all(self.L > 0) and np.all(self.U < 1) and np.all(self.L < self.U)):
            raise ValueError("bounds must satisfy 0 < L(a) < U(a) < 1 for every action")
        below = self.probs < self.L - _BOUND_SLACK
        above = self.probs > self.U + _BOUND_SLACK
        if below.any() or above.any():
            i, j, a = np.argwhere(below | above)[0]
            raise ValueError(
                f"p_{i}^{j + 1}({a}) = {self.probs[i, j, a]} outside [L, U] = [{self.L[a]}, {self.U[a]}]"
            )
        return True

    @property
    def n(self) -> int:
        return self.probs.shape[0]

    @property
    def num_actions(self) -> int:
        return self.probs.shape[2]

    @property
    def probe_depth(self) -> int:
        """Longest string the oracle evaluates"""
        return max(3 * self.K - 1, 2 * self.K + 2)

    @property
    def L_hat(self) -> float:
        return float(self.L.min())

    @property
    def U_hat(self) -> float:
        return float(self.U.max())

    @property
    def c(self) -> float:
        """min over actions of (1 - U(a)) / (1 - L(a))"""
        return float(((1.0 - self.U) / (1.0 - self.L)).min())

    def stage_probs(self, depth: Optional[int] = None) -> np.ndarray:
        """Probabilities for stages 1..depth, repeating the last declared stage"""
        depth = self.probe_depth if depth is None else depth
        declared = self.probs.shape[1]
        if depth <= declared:
            return self.probs[:, :depth, :]
        tail = np.repeat(self.probs[:, -1:, :], depth - declared, axis=1)
        return np.concatenate([self.probs, tail], axis=1)

    def subtask(self, i: int) -> "TaskModel":
        """Single-subtask model for subtask i"""
        return TaskModel(self.K, self.probs[i:i + 1], self.L, self.U)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "K": self.K,
            "probs": self.probs.tolist(),
            "L": self.L.tolist(),
            "U": self.U.tolist()
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TaskModel":
        """
        Build a task model from its JSON document

        Args:
            doc: {"n", "K", "probs", "L", "U"}

        Returns:
            TaskModel
        """
        missing = [key for key in ("K", "probs", "L", "U") if key not in doc]
        if missing:
            raise ValueError(f"Task document missing required keys: {missing}")
        model = cls(int(doc["K"]), doc["probs"], doc["L"], doc["U"])
        if "n" in doc and int(doc["n"]) != model.n:
            raise ValueError(f"n = {doc['n']} but probs holds {model.n} subtasks")
        return model


class TaskOracle(ObjectiveOracle):
    """Expected fraction of accomplished subtasks"""

    def __init__(self, model: TaskModel, name: str = "tasks"):
        super().__init__(model.num_actions, name)
        self.model = model
        self.depth = model.probe_depth
        self._miss = 1.0 - model.stage_probs(self.depth)  # (n, depth, actions)
        self._products: List[np.ndarray] = [np.ones((model.n, 1))]

    def evaluate(self, string: ActionString) -> float:
        if len(string) > self.depth:
            raise DepthExceededError(len(string), self.depth)
        misses = self._miss[:, np.arange(len(string)), list(string)]
        return float(np.mean(1.0 - np.prod(misses, axis=1)))

    def _compute_level(self, length: int) -> np.ndarray:
        if length > self.depth:
            raise DepthExceededError(length, self.depth)
        while len(self._products) <= length:
            stage = len(self._products) - 1
            prev = self._products[-1]
            nxt = prev[:, :, None] * self._miss[:, stage, None, :]
            self._products.append(nxt.reshape(self.model.n, -1))
        return np.mean(1.0 - self._products[length], axis=0)


def task_objective(m: TaskModel) -> TaskOracle:
    """Objective oracle of a task model; f(∅) = 0 and forward monotone"""
    return TaskOracle(m)


def task_eta_upper(m: TaskModel) -> float:
    """(1 - L̂) Û / L̂, an upper bound on the elemental curvature"""
    return (1.0 - m.L_hat) * m.U_hat / m.L_hat


def task_submodular_sufficient(m: TaskModel) -> bool:
    """1/L̂ - 1/Û <= 1, equivalent to task_eta_upper(m) <= 1"""
    return 1.0 / m.L_hat - 1.0 / m.U_hat <= 1.0


def task_t5_hypothesis_sufficient(m: TaskModel) -> bool:
    """1 - Û >= (1 - L̂)², which puts f(G_K ⊕ O) >= f(O) on every instance"""
    return 1.0 - m.U_hat >= (1.0 - m.L_hat) ** 2


def task_sigma_hat_closed(L_hat: float, U_hat: float, K: int) -> float:
    """
    1 - min over K <= k < 2K of ((1 - Û)^k - (1 - L̂)^(k+1)) / L̂, floored at 0

    Only the lower clamp is applied; values above 1 are possible when
    (1 - L̂)^(k+1) > (1 - Û)^k and still bound the enumerated value.
    """
    worst = min(
        ((1.0 - U_hat) ** k - (1.0 - L_hat) ** (k + 1)) / L_hat
        for k in range(K, 2 * K)
    )
    return max(0.0, 1.0 - worst)


def task_sigma_hat_closed_form(m: TaskModel) -> float:
    return task_sigma_hat_closed(m.L_hat, m.U_hat, m.K)


def task_epsilon_hat_closed_form(m: TaskModel, i: int) -> float:
    """1 - (1 - Û)^(i+K-1)"""
    if i < 1:
        raise ValueError(f"stage index must be >= 1, got {i}")
    return 1.0 - (1.0 - m.U_hat) ** (i + m.K - 1)


def task_t2_hypothesis_sufficient(m: TaskModel, first_action: int) -> bool:
    """
    min_i p_i^1(a*) >= 1 - c^K, where a* is greedy's first action

    When this holds, f(G_i ⊕ O) >= f(O) for i = 1..K-1.
    """
    p_first = float(m.probs[:, 0, first_action].min())
    return p_first >= 1.0 - m.c ** m.K


def task_golden_ratio_condition(m: TaskModel) -> bool:
    """L̂ >= 1 - 1/α and Û <= 1/α with α the golden ratio"""
    return m.L_hat >= 1.0 - 1.0 / GOLDEN_RATIO and m.U_hat <= 1.0 / GOLDEN_RATIO


def check_t2_direction(
    m: TaskModel,
    tol: Optional[float] = None,
    budget: Optional[int] = None
) -> pd.DataFrame:
    """
    Compare f(G_i ⊕ O) with f(O) for i = 1..K-1

    Returns:
        DataFrame with columns i, f_GiO, f_O, geq, leq
    """
    tol = CONFIG['TOL'] if tol is None else tol
    f = task_objective(m)
    spec = ProblemSpec(m.num_actions, m.K, f, forward_monotone=True)
    trace = greedy(spec)
    optimum, f_opt = optimal_exhaustive(spec, budget)

    rows = []
    for i in range(1, m.K):
        value = f(trace.partial(i) + optimum)
        rows.append({
            "i": i,
            "f_GiO": value,
            "f_O": f_opt,
            "geq": value >= f_opt - tol,
            "leq": value <= f_opt + tol
        })
    return pd.DataFrame(rows, columns=["i", "f_GiO", "f_O", "geq", "leq"])


@dataclass
class MonotoneCaseReport:
    """Improved curvature bounds when p^j(a) is monotone in the stage j"""
    non_increasing: bool
    non_decreasing: bool
    K: int
    eta: Optional[float] = None
    eta_closed: Optional[float] = None
    t2_improved: Optional[float] = None
    sigma_O: Optional[float] = None
    sigma_closed: Optional[float] = None
    t1_improved: Optional[float] = None
    optimum: ActionString = ()
    notes: List[str] = field(default_factory=list)

    @property
    def eta_ok(self) -> bool:
        return self.eta is None or self.eta <= self.eta_closed + CONFIG['TOL']

    @property
    def sigma_ok(self) -> bool:
        return self.sigma_O is None or self.sigma_O <= self.sigma_closed + CONFIG['TOL']

    def to_dict(self) -> dict:
        return {
            "non_increasing": self.non_increasing,
            "non_decreasing": self.non_decreasing,
            "K": self.K,
            "eta": self.eta,
            "eta_closed": self.eta_closed,
            "t2_improved": self.t2_improved,
            "sigma_O": self.sigma_O,
            "sigma_closed": self.sigma_closed,
            "t1_improved": self.t1_improved,
            "optimum": format_string(self.optimum),
            "notes": list(self.notes)
        }


def task_monotone_special_cases(
    m: TaskModel,
    tol: Optional[float] = None,
    budget: Optional[int] = None
) -> MonotoneCaseReport:
    """
    Check the monotone-probability improvements on an instance

    Non-increasing p^j(a): the enumerated elemental curvature is at most
    1 - L̂ and Theorem 2 holds with that η. Non-decreasing p^j(a): σ(O) is at
    most 1 - (1 - Û)^(2K-1) and Theorem 1(i) holds with that σ. A constant
    sequence falls in both cases.

    Args:
        m: Task model
        tol: Comparison tolerance
        budget: Evaluation cap

    Returns:
        MonotoneCaseReport
    """
    tol = CONFIG['TOL'] if tol is None else tol
    steps = np.diff(m.stage_probs(), axis=1)
    non_increasing = bool(np.all(steps <= 0))
    non_decreasing = bool(np.all(steps >= 0))
    if not (non_increasing or non_decreasing):
        raise NotMonotoneError("p^j(a) is neither non-increasing nor non-decreasing in j")

    f = task_objective(m)
    report = MonotoneCaseReport(non_increasing, non_decreasing, m.K)

    if non_increasing:
        eta = elemental_forward_eta(f, m.num_actions, 2 * m.K, tol, budget)
        report.eta = eta.value
        report.eta_closed = 1.0 - m.L_hat
        report.t2_improved = t2_bound(report.eta_closed, m.K)
        if not report.eta_ok:
            report.notes.append(f"eta {eta.value:.6g} exceeds 1 - L_hat at {eta.witness_text()}")

    if non_decreasing:
        spec = ProblemSpec(m.num_actions, m.K, f, forward_monotone=True)
        report.optimum, _ = optimal_exhaustive(spec, budget)
        sigma = total_backward_sigma_wrt(f, report.optimum, m.num_actions, m.K, tol, budget)
        report.sigma_O = sigma.value
        report.sigma_closed = 1.0 - (1.0 - m.U_hat) ** (2 * m.K - 1)
        report.t1_improved = t1_bound_i(report.sigma_closed, m.K)
        if not report.sigma_ok:
            report.notes.append(f"sigma(O) {sigma.value:.6g} exceeds the closed form at {sigma.witness_text()}")

    for note in report.notes:
        logger.warning("monotone special case: %s", note)
    return report


def random_task_model(
    n: int,
    K: int,
    num_actions: int,
    L_hat: float,
    U_hat: float,
    rng: np.random.Generator,
    trend: Optional[str] = None,
    stages: Optional[int] = None
) -> TaskModel:
    """
    Draw a task model whose bounds span exactly [L_hat, U_hat]

    Per-action bounds are drawn inside [L_hat, U_hat] with one action pinned
    to each end. Probabilities are uniform within each action's bounds.

    Args:
        n: Number of subtasks
        K: Horizon
        num_actions: Size of the action set
        L_hat: Smallest lower bound
        U_hat: Largest upper bound
        rng: numpy Generator
        trend: None, "increasing", "decreasing" or "constant" along stages
        stages: Declared stages (defaults to K)

    Returns:
        TaskModel
    """
    if not 0 < L_hat < U_hat < 1:
        raise ValueError(f"need 0 < L_hat < U_hat < 1, got {L_hat}, {U_hat}")
    if trend not in (None, "increasing", "decreasing", "constant"):
        raise ValueError(f"Unknown trend: {trend}")
    stages = K if stages is None else stages

    mid = (L_hat + U_hat) / 2.0
    L = rng.uniform(L_hat, mid, size=num_actions)
    U = rng.uniform(mid, U_hat, size=num_actions)
    L[rng.integers(num_actions)] = L_hat
    U[rng.integers(num_actions)] = U_hat

    if trend == "constant":
        probs = np.repeat(rng.uniform(L, U, size=(n, 1, num_actions)), stages, axis=1)
    else:
        probs = rng.uniform(L, U, size=(n, stages, num_actions))
        if trend == "increasing":
            probs = np.sort(probs, axis=1)
        elif trend == "decreasing":
            probs = np.sort(probs, axis=1)[:, ::-1, :]
    return TaskModel(K, probs, L, U)
