"""
Information gain of a two-channel Gaussian measurement schedule

The state has a diagonal prior covariance Diag(s0, t0) with s0 >= t0. Each
action splits unit measurement power between the channels,
A = Diag(√e, √(1 - e)) with e on a finite grid, and stage i adds white noise
of variance σ_i². The posterior stays diagonal:

    1/s_k = 1/s0 + Σ e_i / σ_i²,    1/t_k = 1/t0 + Σ (1 - e_i) / σ_i²

and the objective is the entropy reduction ½(log s0 t0 - log s_k t_k).

Instance JSON:
    {"s0": 2.0, "t0": 1.0, "noise_vars": [1.0, 1.2], "a": 1.0, "b": 1.1,
     "grid": [0, 0.25, 0.5, 0.75, 1], "K": 2}
Stages past the declared variances repeat the last one.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from checkers import ViolationReport, check_diminishing_return
from curvature import restricted_eta_hat
from utils.config import CONFIG
from utils.errors import DepthExceededError
from utils.strings import ActionString, decode_index
from .base_objective import ObjectiveOracle

logger = logging.getLogger(__name__)

# Relative slack allowed between the two sides of the information identity
_TRACE_RTOL = 1e-12


@dataclass
class InfoGainModel:
    """Prior, noise schedule and action grid"""
    s0: float
    t0: float
    noise_vars: Sequence[float]
    K: int
    grid: Sequence[float] = field(default_factory=lambda: CONFIG['DEFAULT_GRID'])
    a: Optional[float] = None  # noise deviations lie in [a, b]
    b: Optional[float] = None

    def __post_init__(self):
        self.noise_vars = [float(v) for v in self.noise_vars]
        self.grid = [float(e) for e in self.grid]
        if self.a is None:
            self.a = math.sqrt(min(self.noise_vars)) if self.noise_vars else None
        if self.b is None:
            self.b = math.sqrt(max(self.noise_vars)) if self.noise_vars else None
        self.validate()

    def validate(self) -> bool:
        """
        Check the prior, the grid and the noise interval

        Returns:
            True if valid, raises ValueError otherwise
        """
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if not self.s0 >= self.t0 > 0:
            raise ValueError(f"prior needs s0 >= t0 > 0, got s0={self.s0}, t0={self.t0}")
        if not self.noise_vars or min(self.noise_vars) <= 0:
            raise ValueError("noise_vars must be a nonempty list of positive variances")
        if not self.grid or any(not 0 <= e <= 1 for e in self.grid):
            raise ValueError(f"grid entries must lie in [0, 1], got {self.grid}")
        if not 0 < self.a <= self.b:
            raise ValueError(f"need 0 < a <= b, got a={self.a}, b={self.b}")
        lo, hi = self.a ** 2 * (1 - 1e-12), self.b ** 2 * (1 + 1e-12)
        outside = [v for v in self.noise_vars if not lo <= v <= hi]
        if outside:
            raise ValueError(f"noise variances {outside} outside [a², b²] = [{self.a ** 2}, {self.b ** 2}]")
        return True

    @property
    def num_actions(self) -> int:
        return len(self.grid)

    @property
    def probe_depth(self) -> int:
        return max(3 * self.K - 1, 2 * self.K + 2)

    def variances(self, depth: Optional[int] = None) -> np.ndarray:
        """σ_1² .. σ_depth², repeating the last declared variance"""
        depth = self.probe_depth if depth is None else depth
        declared = np.asarray(self.noise_vars, dtype=float)
        if depth <= len(declared):
            return declared[:depth]
        return np.concatenate([declared, np.full(depth - len(declared), declared[-1])])

    def action(self, e: float) -> int:
        """Grid index of power split e"""
        for idx, value in enumerate(self.grid):
            if abs(value - e) <= 1e-12:
                return idx
        raise ValueError(f"power split {e} is not on the grid {self.grid}")

    def to_dict(self) -> dict:
        return {
            "s0": self.s0,
            "t0": self.t0,
            "noise_vars": list(self.noise_vars),
            "a": self.a,
            "b": self.b,
            "grid": list(self.grid),
            "K": self.K
        }

    @classmethod
    def from_dict(cls, doc: dict, grid: Optional[Sequence[float]] = None) -> "InfoGainModel":
        """
        Build a model from its JSON document

        Args:
            doc: {"s0", "t0", "noise_vars", "K", optional "a", "b", "grid"}
            grid: Overrides the document's grid when given

        Returns:
            InfoGainModel
        """
        missing = [key for key in ("s0", "t0", "noise_vars", "K") if key not in doc]
        if missing:
            raise ValueError(f"Info-gain document missing required keys: {missing}")
        return cls(
            s0=float(doc["s0"]),
            t0=float(doc["t0"]),
            noise_vars=doc["noise_vars"],
            K=int(doc["K"]),
            grid=grid if grid is not None else doc.get("grid", CONFIG['DEFAULT_GRID']),
            a=doc.get("a"),
            b=doc.get("b")
        )


@dataclass(frozen=True)
class PosteriorState:
    """Accumulated information on each channel beyond the prior"""
    s0: float
    t0: float
    info_s: float = 0.0
    info_t: float = 0.0

    @property
    def s(self) -> float:
        return 1.0 / (1.0 / self.s0 + self.info_s)

    @property
    def t(self) -> float:
        return 1.0 / (1.0 / self.t0 + self.info_t)

    def update(self, e: float, variance: float) -> "PosteriorState":
        """One measurement with power split e under noise variance"""
        return PosteriorState(
            self.s0, self.t0,
            self.info_s + e / variance,
            self.info_t + (1.0 - e) / variance
        )

    def gain(self) -> float:
        """½(log s0 t0 - log s t)"""
        return 0.5 * (math.log1p(self.s0 * self.info_s) + math.log1p(self.t0 * self.info_t))


class InfoGainOracle(ObjectiveOracle):
    """
    Entropy reduction by the diagonal recursion

    With check_trace set, every evaluation also verifies that
    1/s_k + 1/t_k = 1/s0 + 1/t0 + Σ 1/σ_i².
    """

    def __init__(self, model: InfoGainModel, check_trace: bool = False, name: str = "infogain"):
        super().__init__(model.num_actions, name)
        self.model = model
        self.check_trace = check_trace
        self.depth = model.probe_depth
        self._variances = model.variances(self.depth)
        self._grid = np.asarray(model.grid, dtype=float)
        self._info: List[tuple] = [(np.zeros(1), np.zeros(1))]

    def posterior(self, string: ActionString) -> PosteriorState:
        if len(string) > self.depth:
            raise DepthExceededError(len(string), self.depth)
        state = PosteriorState(self.model.s0, self.model.t0)
        for stage, a in enumerate(string):
            state = state.update(self._grid[a], self._variances[stage])
        return state

    def evaluate(self, string: ActionString) -> float:
        state = self.posterior(string)
        if self.check_trace:
            self._check_trace(state, len(string))
        return state.gain()

    def _check_trace(self, state: PosteriorState, length: int):
        m = self.model
        lhs = 1.0 / state.s + 1.0 / state.t
        rhs = 1.0 / m.s0 + 1.0 / m.t0 + float(np.sum(1.0 / self._variances[:length]))
        if abs(lhs - rhs) > _TRACE_RTOL * rhs:
            raise RuntimeError(f"information identity broken: {lhs!r} != {rhs!r}")

    def _compute_level(self, length: int) -> np.ndarray:
        if length > self.depth:
            raise DepthExceededError(length, self.depth)
        while len(self._info) <= length:
            stage = len(self._info) - 1
            info_s, info_t = self._info[-1]
            variance = self._variances[stage]
            self._info.append((
                (info_s[:, None] + self._grid[None, :] / variance).reshape(-1),
                (info_t[:, None] + (1.0 - self._grid[None, :]) / variance).reshape(-1)
            ))
        info_s, info_t = self._info[length]
        if self.check_trace:
            total = 1.0 / self.model.s0 + 1.0 / self.model.t0 + float(np.sum(1.0 / self._variances[:length]))
            lhs = 1.0 / self.model.s0 + info_s + 1.0 / self.model.t0 + info_t
            if np.any(np.abs(lhs - total) > _TRACE_RTOL * total):
                raise RuntimeError(f"information identity broken at length {length}")
        return 0.5 * (np.log1p(self.model.s0 * info_s) + np.log1p(self.model.t0 * info_t))


class MatrixInfoGainOracle(ObjectiveOracle):
    """Reference oracle using general 2x2 inverses and log-determinants"""

    def __init__(self, model: InfoGainModel, name: str = "infogain_matrix"):
        super().__init__(model.num_actions, name)
        self.model = model
        self.depth = model.probe_depth
        self._variances = model.variances(self.depth)
        self._prior = np.diag([model.s0, model.t0])

    def evaluate(self, string: ActionString) -> float:
        if len(string) > self.depth:
            raise DepthExceededError(len(string), self.depth)
        cov = self._prior.copy()
        for stage, a in enumerate(string):
            e = self.model.grid[a]
            A = np.diag([math.sqrt(e), math.sqrt(1.0 - e)])
            cov = np.linalg.inv(np.linalg.inv(cov) + A.T @ A / self._variances[stage])
        _, logdet_prior = np.linalg.slogdet(self._prior)
        _, logdet_post = np.linalg.slogdet(cov)
        return 0.5 * (logdet_prior - logdet_post)


def infogain_objective(m: InfoGainModel, check_trace: bool = False) -> InfoGainOracle:
    return InfoGainOracle(m, check_trace=check_trace)


def _nondecreasing(values: np.ndarray) -> bool:
    return bool(np.all(np.diff(values) >= 0))


@dataclass
class SubmodularityWitness:
    """Submodularity verdict for a noise schedule, with the explicit violation when there is one"""
    nondecreasing: bool
    dr_empty: bool
    eta_hat: float
    stage: Optional[int] = None         # first k with σ_k² > σ_{k+1}²
    prefix: ActionString = ()           # M = (e=1) repeated k-1 times
    first: Optional[int] = None         # action e = 1
    second: Optional[int] = None        # action e = 0
    gain_after: Optional[float] = None  # f(M ⊕ first ⊕ second) - f(M ⊕ first)
    gain_before: Optional[float] = None # f(M ⊕ second) - f(M)

    @property
    def confirmed(self) -> bool:
        """Violation witnessed: the later gain beats the earlier one"""
        return self.stage is not None and self.gain_after > self.gain_before

    def to_dict(self) -> dict:
        return {
            "nondecreasing": self.nondecreasing,
            "dr_empty": self.dr_empty,
            "eta_hat": self.eta_hat,
            "stage": self.stage,
            "prefix": list(self.prefix),
            "first": self.first,
            "second": self.second,
            "gain_after": self.gain_after,
            "gain_before": self.gain_before,
            "confirmed": self.confirmed
        }


def infogain_submodularity_witness(
    m: InfoGainModel,
    tol: Optional[float] = None,
    budget: Optional[int] = None
) -> SubmodularityWitness:
    """
    Relate submodularity to the noise schedule

    The objective is string submodular exactly when the variances are
    nondecreasing. At the first decrease σ_k² > σ_{k+1}², measuring the s
    channel for k stages and then the t channel gains more than measuring
    the t channel at stage k, a diminishing-return violation.

    Args:
        m: Model whose grid holds e = 0 and e = 1
        tol: Comparison tolerance
        budget: Evaluation cap

    Returns:
        SubmodularityWitness
    """
    full, empty = m.action(1.0), m.action(0.0)
    f = infogain_objective(m)
    variances = m.variances(2 * m.K)
    eta = restricted_eta_hat(f, m.num_actions, m.K, tol, budget)
    dr = check_diminishing_return(f, m.num_actions, 2 * m.K, tol, budget, limit=0)
    witness = SubmodularityWitness(_nondecreasing(variances), dr.is_empty, eta.value)

    drops = np.flatnonzero(variances[:-1] > variances[1:])
    if drops.size:
        k = int(drops[0]) + 1
        prefix = (full,) * (k - 1)
        witness.stage = k
        witness.prefix = prefix
        witness.first, witness.second = full, empty
        witness.gain_after = f(prefix + (full, empty)) - f(prefix + (full,))
        witness.gain_before = f(prefix + (empty,)) - f(prefix)
        logger.debug("variance drop at stage %d: gains %.6g vs %.6g", k, witness.gain_after, witness.gain_before)
    return witness


def eta_hat_lower_closed_form(m: InfoGainModel) -> float:
    """
    Lower bound on η̂ attained by an explicit candidate

    Picks the stage pair with the largest σ_{k+1}²/σ_{k+2}², k <= 2K-2. If that
    ratio is at most 1 the prefix measures only the s channel and the t
    variance stays at t0; otherwise the prefix measures only the t channel,
    which shrinks it to τ = 1/(1/t0 + Σ_{i<=k} σ_i^-2). Either way the value is
    log(1 + t σ_{k+2}^-2) / log(1 + t σ_{k+1}^-2).
    """
    for e in (0.0, 1.0):
        m.action(e)  # raises unless the grid holds both pure splits
    precision = 1.0 / m.variances(2 * m.K)
    ratios = precision[1:] / precision[:-1]  # σ_{k+1}² / σ_{k+2}² for k = 0..2K-2
    k = int(np.argmax(ratios))
    if ratios[k] <= 1:
        t = m.t0
    else:
        t = 1.0 / (1.0 / m.t0 + float(np.sum(precision[:k])))
    return math.log1p(t * precision[k + 1]) / math.log1p(t * precision[k])


def eta_hat_lower_interval(m: InfoGainModel) -> float:
    """log(1 + t0 b^-2) / log(1 + t0 a^-2), valid for any variances in [a², b²]"""
    return math.log1p(m.t0 / m.b ** 2) / math.log1p(m.t0 / m.a ** 2)


@dataclass
class EtaUpperBound:
    """Upper bounds on η̂ from the instance's variances and from the interval [a, b]"""
    instance: float
    interval: float

    def to_dict(self) -> dict:
        return {"instance": self.instance, "interval": self.interval}


def eta_hat_upper_closed_form(m: InfoGainModel) -> EtaUpperBound:
    """
    Upper bounds on η̂

    Instance form, with precisions p_i = σ_i^-2 over the first 2K stages:
        log ¼(1 + s0/t0 + s0 Σ p_i)(1 + (1/s0 + max p_i)/(1/t0 + p_1))
        / log(1 + min p_i / (1/t0 + Σ_{i<=2K-2} p_i))
    The interval form replaces each precision by its worst case in
    [b^-2, a^-2]. It grows with K.
    """
    K, s0, t0 = m.K, m.s0, m.t0
    p = 1.0 / m.variances(2 * K)
    numer = math.log(
        0.25 * (1.0 + s0 / t0 + s0 * p.sum()) * (1.0 + (1.0 / s0 + p.max()) / (1.0 / t0 + p[0]))
    )
    denom = math.log1p(p.min() / (1.0 / t0 + p[:2 * K - 2].sum()))

    pa, pb = m.a ** -2, m.b ** -2
    numer_iv = math.log(
        0.25 * (1.0 + s0 / t0 + 2.0 * s0 * K * pa) * (1.0 + (1.0 / s0 + pa) / (1.0 / t0 + pb))
    )
    denom_iv = math.log1p(t0 * pb / (1.0 + t0 * (2 * K - 2) * pa))
    return EtaUpperBound(numer / denom, numer_iv / denom_iv)


def _first_stage_gain(m: InfoGainModel, e: float) -> float:
    variance = m.variances(1)[0]
    return 0.5 * (math.log1p(m.s0 * e / variance) + math.log1p(m.t0 * (1.0 - e) / variance))


def greedy_first_split(m: InfoGainModel) -> float:
    """
    Best first-stage power split over the continuous interval [0, 1]

    e* = (1 + (1/t0 - 1/s0) σ_1²) / 2, clamped to [0, 1].
    """
    variance = m.variances(1)[0]
    e = 0.5 * (1.0 + (1.0 / m.t0 - 1.0 / m.s0) * variance)
    return min(1.0, max(0.0, e))


@dataclass
class FirstSplitReport:
    """Closed-form first split against a numerical maximizer"""
    variance_form: float   # uses σ_1²
    deviation_form: float  # uses σ_1
    numeric: float
    grid_choice: float     # e of the grid greedy's first action
    matches: str           # "variance", "deviation", "both" or "neither"

    def to_dict(self) -> dict:
        return {
            "variance_form": self.variance_form,
            "deviation_form": self.deviation_form,
            "numeric": self.numeric,
            "grid_choice": self.grid_choice,
            "matches": self.matches
        }


def first_split_report(m: InfoGainModel, xtol: float = 1e-9) -> FirstSplitReport:
    """
    Compare both printed forms of the first split with scipy's bounded maximizer

    Args:
        m: Model
        xtol: Absolute tolerance of the numerical maximizer; forms within
            1e3 * xtol of it count as matching

    Returns:
        FirstSplitReport
    """
    sigma = math.sqrt(m.variances(1)[0])
    deviation = min(1.0, max(0.0, 0.5 * (1.0 + (1.0 / m.t0 - 1.0 / m.s0) * sigma)))
    variance = greedy_first_split(m)

    result = minimize_scalar(
        lambda e: -_first_stage_gain(m, e),
        bounds=(0.0, 1.0),
        method="bounded",
        options={"xatol": xtol}
    )
    numeric = float(result.x)
    # the bounded method never evaluates the endpoints exactly
    for end in (0.0, 1.0):
        if _first_stage_gain(m, end) >= _first_stage_gain(m, numeric):
            numeric = end

    gains = [_first_stage_gain(m, e) for e in m.grid]
    grid_choice = m.grid[int(np.argmax(gains))]

    close = 1e3 * xtol
    variance_ok = abs(variance - numeric) <= close
    deviation_ok = abs(deviation - numeric) <= close
    if variance_ok and deviation_ok:
        matches = "both"
    elif variance_ok:
        matches = "variance"
    elif deviation_ok:
        matches = "deviation"
    else:
        matches = "neither"
    return FirstSplitReport(variance, deviation, numeric, grid_choice, matches)


def t2_condition_sufficient(m: InfoGainModel) -> bool:
    """b^-2 / (a^-2 - b^-2) >= (K²/4) t0 (a^-2 + b^-2) + 1; true when a = b"""
    pa, pb = m.a ** -2, m.b ** -2
    if pa == pb:
        return True
    return pb / (pa - pb) >= (m.K ** 2 / 4.0) * m.t0 * (pa + pb) + 1.0


def verify_first_action_prefix(
    m: InfoGainModel,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
    limit: Optional[int] = None
) -> ViolationReport:
    """
    Find strings M of length K with f((a*) ⊕ M) < f(M) - tol

    a* is the grid greedy's first action.

    Returns:
        ViolationReport of (M,) entries (check "first_action_prefix")
    """
    tol = CONFIG['TOL'] if tol is None else tol
    f = infogain_objective(m)
    n, K = m.num_actions, m.K
    values = f.levels(K + 1, budget)
    first = int(np.argmax(values[1]))

    prefixed = values[K + 1][first * n ** K + np.arange(n ** K)]
    margins = values[K] - prefixed
    report = ViolationReport("first_action_prefix", K)
    report._add(margins, margins > tol, lambda ix: (decode_index(int(ix[0]), K, n),), limit)
    return report


def random_infogain_model(
    K: int,
    rng: np.random.Generator,
    a: float = 1.0,
    b: float = 1.5,
    s0: float = 1.0,
    t0: float = 0.5,
    nondecreasing: Optional[bool] = None,
    levels: int = 4,
    grid: Optional[Sequence[float]] = None
) -> InfoGainModel:
    """
    Draw 2K noise variances from a coarse grid inside [a², b²]

    Args:
        K: Horizon
        rng: numpy Generator
        a, b: Noise deviation interval
        s0, t0: Prior variances
        nondecreasing: True sorts the draw; False forces at least one decrease
        levels: Points in the variance grid
        grid: Action grid (defaults to CONFIG['DEFAULT_GRID'])

    Returns:
        InfoGainModel
    """
    choices = np.linspace(a ** 2, b ** 2, levels)
    variances = rng.choice(choices, size=2 * K)
    if nondecreasing:
        variances = np.sort(variances)
    elif nondecreasing is False and _nondecreasing(variances):
        k = int(rng.integers(2 * K - 1))
        variances[k], variances[k + 1] = choices[-1], choices[0]
    return InfoGainModel(
        s0=s0, t0=t0, noise_vars=variances.tolist(), K=K,
        grid=CONFIG['DEFAULT_GRID'] if grid is None else grid, a=a, b=b
    )
