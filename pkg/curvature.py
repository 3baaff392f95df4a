"""
Curvature of string functions by exact bounded enumeration

Backward curvature sigma measures how much a singleton loses when it is
prepended to a string, forward curvature epsilon how much it loses when
appended, and elemental curvature eta how much one intervening action can
inflate the next action's gain. Every quantity is a max of a ratio over all
strings up to a search length; candidates with a zero denominator are
skipped.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Optional, Sequence

import numpy as np

from objectives.base_objective import ObjectiveOracle
from utils.config import CONFIG
from utils.errors import DegenerateOracleError
from utils.strings import ActionString, decode_index, format_string, string_index

logger = logging.getLogger(__name__)

KINDS = (
    "sigma", "sigma_wrt", "epsilon", "epsilon_wrt", "eta",
    "sigma_hat", "epsilon_hat_i", "eta_hat",
)


@dataclass
class CurvatureReport:
    """One curvature value with the strings that attain it"""
    kind: str
    value: float
    witness: Dict[str, ActionString]
    search_len: int
    candidates: int = 0
    skipped: int = 0     # zero-denominator candidates left out of the max
    unbounded: int = 0   # skipped candidates whose ratio would be +inf
    note: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"Unknown curvature kind: {self.kind}")

    @property
    def bounded(self) -> bool:
        return self.unbounded == 0

    def witness_text(self) -> str:
        return ";".join(f"{key}={format_string(s)}" for key, s in self.witness.items())

    def to_dict(self) -> dict:
        """Convert report to dictionary"""
        return {
            "kind": self.kind,
            "value": self.value,
            "witness": {key: format_string(s) for key, s in self.witness.items()},
            "search_len": self.search_len,
            "candidates": self.candidates,
            "skipped": self.skipped,
            "unbounded": self.unbounded,
            "note": self.note
        }


@dataclass
class EtaBar:
    """eta if eta <= 1, else eta ** (2K - 1)"""
    eta: float
    horizon: int
    value: float = field(init=False)

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")
        if self.horizon < 1:
            raise ValueError(f"K must be >= 1, got {self.horizon}")
        self.value = self.eta if self.eta <= 1 else self.eta ** (2 * self.horizon - 1)


def eta_bar(eta: float, K: int) -> EtaBar:
    """Adjusted elemental curvature used by the non-uniform bounds"""
    return EtaBar(float(eta), int(K))


class _MaxScan:
    """Running max of a ratio over blocks of candidates"""

    def __init__(self, kind: str, one_minus: bool, tol: float):
        self.kind = kind
        self.one_minus = one_minus
        self.tol = tol
        self.best = -np.inf
        self.witness: Optional[Dict[str, ActionString]] = None
        self.candidates = 0
        self.skipped = 0
        self.unbounded = 0

    def offer(self, numer: np.ndarray, denom: np.ndarray, decode: Callable[[tuple], Dict[str, ActionString]]):
        numer, denom = np.broadcast_arrays(numer, denom)
        valid = denom != 0
        n_valid = int(valid.sum())
        self.candidates += n_valid
        self.skipped += int(valid.size - n_valid)
        if self.one_minus:
            self.unbounded += int(np.count_nonzero(~valid & (numer < -self.tol)))
        else:
            self.unbounded += int(np.count_nonzero(~valid & (numer > self.tol)))
        if n_valid == 0:
            return

        ratio = np.divide(numer, denom, out=np.zeros(numer.shape), where=valid)
        if self.one_minus:
            ratio = 1.0 - ratio
        ratio = np.where(valid, ratio, -np.inf)
        flat = int(np.argmax(ratio))
        if ratio.reshape(-1)[flat] > self.best:
            self.best = float(ratio.reshape(-1)[flat])
            self.witness = decode(np.unravel_index(flat, ratio.shape))

    def report(self, search_len: int, note: str = "") -> CurvatureReport:
        if self.candidates == 0:
            raise DegenerateOracleError(f"{self.kind}: every candidate has a zero denominator")
        if self.unbounded:
            logger.warning("%s: %d zero-denominator candidates with unbounded ratio",
                           self.kind, self.unbounded)
        return CurvatureReport(
            self.kind, self.best, self.witness, search_len,
            self.candidates, self.skipped, self.unbounded, note
        )


def _backward_scan(f, n, lengths: Sequence[int], kind, tol, budget) -> CurvatureReport:
    lengths = list(lengths)
    values = f.levels(max(lengths) + 1, budget)
    singles = values[1] - values[0][0]
    scan = _MaxScan(kind, one_minus=True, tol=tol)
    for L in lengths:
        numer = values[L + 1].reshape(n, -1) - values[L][None, :]
        scan.offer(
            numer, singles[:, None],
            lambda ix, L=L: {"a": (int(ix[0]),), "M": decode_index(int(ix[1]), L, n)}
        )
    return scan.report(max(lengths))


def _forward_scan(f, n, lengths: Sequence[int], kind, tol, budget) -> CurvatureReport:
    lengths = list(lengths)
    values = f.levels(max(lengths) + 1, budget)
    singles = values[1] - values[0][0]
    scan = _MaxScan(kind, one_minus=True, tol=tol)
    for L in lengths:
        numer = values[L + 1].reshape(-1, n) - values[L][:, None]
        scan.offer(
            numer, singles[None, :],
            lambda ix, L=L: {"a": (int(ix[1]),), "M": decode_index(int(ix[0]), L, n)}
        )
    return scan.report(max(lengths))


def _eta_scan(f, n, lengths: Sequence[int], kind, tol, budget) -> CurvatureReport:
    lengths = list(lengths)
    values = f.levels(max(lengths) + 2, budget)
    scan = _MaxScan(kind, one_minus=False, tol=tol)
    for L in lengths:
        base = values[L]
        once = values[L + 1].reshape(-1, n)
        twice = values[L + 2].reshape(-1, n, n)
        numer = twice - once[:, :, None]           # gain of a_j after M ⊕ (a_i)
        denom = (once - base[:, None])[:, None, :]  # gain of a_j after M
        scan.offer(
            numer, denom,
            lambda ix, L=L: {
                "a_i": (int(ix[1]),), "a_j": (int(ix[2]),), "M": decode_index(int(ix[0]), L, n)
            }
        )
    return scan.report(max(lengths))


def _check(f: ObjectiveOracle, num_actions: int):
    if f.num_actions != num_actions:
        raise ValueError(f"Oracle has {f.num_actions} actions, curvature requested {num_actions}")


def total_backward_sigma(
    f: ObjectiveOracle,
    num_actions: int,
    search_len: int,
    tol: Optional[float] = None,
    budget: Optional[int] = None
) -> CurvatureReport:
    """
    sigma = max over a and |M| <= search_len of 1 - (f((a) ⊕ M) - f(M)) / f((a))

    Args:
        f: Objective oracle
        num_actions: Size of the action set
        search_len: Longest M enumerated
        tol: Tolerance for classifying unbounded candidates
        budget: Evaluation cap

    Returns:
        CurvatureReport with witness {"a", "M"}
    """
    _check(f, num_actions)
    tol = CONFIG['TOL'] if tol is None else tol
    return _backward_scan(f, num_actions, range(search_len + 1), "sigma", tol, budget)


def restricted_sigma_hat(
    f: ObjectiveOracle,
    num_actions: int,
    K: int,
    tol: Optional[float] = None,
    budget: Optional[int] = None
) -> CurvatureReport:
    """sigma restricted to K <= |M| < 2K"""
    _check(f, num_actions)
    tol = CONFIG['TOL'] if tol is None else tol
    return _backward_scan(f, num_actions, range(K, 2 * K), "sigma_hat", tol, budget)


def total_forward_epsilon(
    f: ObjectiveOracle,
    num_actions: int,
    search_len: int,
    tol: Optional[float] = None,
    budget: Optional[int] = None
) -> CurvatureReport:
    """epsilon = max over a and |M| <= search_len of 1 - (f(M ⊕ (a)) - f(M)) / f((a))"""
    _check(f, num_actions)
    tol = CONFIG['TOL'] if tol is None else tol
    return _forward_scan(f, num_actions, range(search_len + 1), "epsilon", tol, budget)


def restricted_epsilon_hat(
    f: ObjectiveOracle,
    num_actions: int,
    i: int,
    K: int,
    tol: Optional[float] = None,
    budget: Optional[int] = None
) -> CurvatureReport:
    """epsilon restricted to i <= |M| < i + K"""
    _check(f, num_actions)
    if i < 0:
        raise ValueError(f"stage index must be >= 0, got {i}")
    tol = CONFIG['TOL'] if tol is None else tol
    return _forward_scan(f, num_actions, range(i, i + K), "epsilon_hat_i", tol, budget)


def elemental_forward_eta(
    f: ObjectiveOracle,
    num_actions: int,
    search_len: int,
    tol: Optional[float] = None,
    budget: Optional[int] = None
) -> CurvatureReport:
    """
    eta = max over a_i, a_j and |M| <= search_len of
    (f(M ⊕ (a_i) ⊕ (a_j)) - f(M ⊕ (a_i))) / (f(M ⊕ (a_j)) - f(M))

    Returns:
        CurvatureReport with witness {"a_i", "a_j", "M"}
    """
    _check(f, num_actions)
    tol = CONFIG['TOL'] if tol is None else tol
    return _eta_scan(f, num_actions, range(search_len + 1), "eta", tol, budget)


def restricted_eta_hat(
    f: ObjectiveOracle,
    num_actions: int,
    K: int,
    tol: Optional[float] = None,
    budget: Optional[int] = None
) -> CurvatureReport:
    """eta restricted to |M| <= 2K - 2"""
    _check(f, num_actions)
    tol = CONFIG['TOL'] if tol is None else tol
    return _eta_scan(f, num_actions, range(2 * K - 1), "eta_hat", tol, budget)


def _wrt_scan(f, n, M: ActionString, K: int, kind: str, tol, budget) -> CurvatureReport:
    M = tuple(M)
    m_len = len(M)
    values = f.levels(K + m_len, budget)
    f_m = values[m_len][string_index(M, n)]
    m_idx = string_index(M, n)
    scan = _MaxScan(kind, one_minus=True, tol=tol)
    for length in range(1, K + 1):
        n_idx = np.arange(n ** length)
        if kind == "sigma_wrt":
            joined = n_idx * n ** m_len + m_idx     # N ⊕ M
        else:
            joined = m_idx * n ** length + n_idx    # M ⊕ N
        numer = values[length + m_len][joined] - f_m
        denom = values[length] - values[0][0]
        scan.offer(
            numer, denom,
            lambda ix, L=length: {"N": decode_index(int(ix[0]), L, n), "M": M}
        )
    return scan.report(K)


def total_backward_sigma_wrt(
    f: ObjectiveOracle,
    M: Sequence[int],
    num_actions: int,
    K: int,
    tol: Optional[float] = None,
    budget: Optional[int] = None
) -> CurvatureReport:
    """
    sigma(M) = max over 0 < |N| <= K of 1 - (f(N ⊕ M) - f(M)) / f(N)

    Returns:
        CurvatureReport with witness {"N", "M"}; search_len is K
    """
    _check(f, num_actions)
    tol = CONFIG['TOL'] if tol is None else tol
    return _wrt_scan(f, num_actions, M, K, "sigma_wrt", tol, budget)


def total_forward_epsilon_wrt(
    f: ObjectiveOracle,
    M: Sequence[int],
    num_actions: int,
    K: int,
    tol: Optional[float] = None,
    budget: Optional[int] = None
) -> CurvatureReport:
    """epsilon(M) = max over 0 < |N| <= K of 1 - (f(M ⊕ N) - f(M)) / f(N)"""
    _check(f, num_actions)
    tol = CONFIG['TOL'] if tol is None else tol
    return _wrt_scan(f, num_actions, M, K, "epsilon_wrt", tol, budget)


def witness_ratio(f: ObjectiveOracle, report: CurvatureReport) -> float:
    """
    Re-evaluate the defining ratio at a report's witness with direct oracle calls

    Args:
        f: The oracle the report was computed on
        report: CurvatureReport

    Returns:
        The ratio value at the witness
    """
    w = report.witness
    empty = f(())
    if report.kind in ("sigma", "sigma_hat"):
        a, M = w["a"], w["M"]
        return 1.0 - (f(a + M) - f(M)) / (f(a) - empty)
    if report.kind in ("epsilon", "epsilon_hat_i"):
        a, M = w["a"], w["M"]
        return 1.0 - (f(M + a) - f(M)) / (f(a) - empty)
    if report.kind == "sigma_wrt":
        N, M = w["N"], w["M"]
        return 1.0 - (f(N + M) - f(M)) / (f(N) - empty)
    if report.kind == "epsilon_wrt":
        N, M = w["N"], w["M"]
        return 1.0 - (f(M + N) - f(M)) / (f(N) - empty)
    a_i, a_j, M = w["a_i"], w["a_j"], w["M"]
    return (f(M + a_i + a_j) - f(M + a_i)) / (f(M + a_j) - f(M))


def curvature_profile(
    f: ObjectiveOracle,
    num_actions: int,
    K: int,
    search_len: Optional[int] = None,
    tol: Optional[float] = None,
    budget: Optional[int] = None
) -> Iterable[CurvatureReport]:
    """
    Every instance-level curvature: sigma, epsilon, eta over search_len
    (default 2K), then sigma_hat, epsilon_hat_i for i = 1..K-1, and eta_hat

    Degenerate quantities are logged and left out.
    """
    search_len = 2 * K if search_len is None else search_len
    jobs = [
        lambda: total_backward_sigma(f, num_actions, search_len, tol, budget),
        lambda: total_forward_epsilon(f, num_actions, search_len, tol, budget),
        lambda: elemental_forward_eta(f, num_actions, search_len, tol, budget),
        lambda: restricted_sigma_hat(f, num_actions, K, tol, budget),
    ]
    jobs += [
        (lambda i=i: restricted_epsilon_hat(f, num_actions, i, K, tol, budget))
        for i in range(1, K)
    ]
    jobs.append(lambda: restricted_eta_hat(f, num_actions, K, tol, budget))

    reports = []
    for job in jobs:
        try:
            reports.append(job())
        except DegenerateOracleError as e:
            logger.warning("skipping degenerate curvature: %s", e)
    return reports
