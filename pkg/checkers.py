"""
Monotonicity and diminishing-return checkers

Each checker enumerates every string up to max_len through the oracle's
per-length value arrays and reports each comparison that fails by more
than tol.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
import pandas as pd

from objectives.base_objective import ObjectiveOracle
from utils.config import CONFIG
from utils.strings import decode_index, format_string

logger = logging.getLogger(__name__)


@dataclass
class ViolationReport:
    """Failed comparisons of one check up to a maximum string length"""
    check: str
    max_len: int
    count: int = 0
    violations: List[tuple] = field(default_factory=list)
    worst_margin: float = 0.0  # largest amount by which a comparison failed

    @property
    def is_empty(self) -> bool:
        return self.count == 0

    def __bool__(self) -> bool:
        return self.count > 0

    def to_dict(self) -> dict:
        """Convert report to dictionary"""
        return {
            "check": self.check,
            "max_len": self.max_len,
            "count": self.count,
            "worst_margin": self.worst_margin,
            "violations": [[format_string(part) for part in v] for v in self.violations]
        }

    def to_frame(self) -> pd.DataFrame:
        """One row per recorded violation"""
        rows = [
            {"check": self.check, "violation": " | ".join(format_string(part) for part in v)}
            for v in self.violations
        ]
        return pd.DataFrame(rows, columns=["check", "violation"])

    def _add(self, margins: np.ndarray, mask: np.ndarray, decode: Callable, limit: Optional[int]):
        hits = np.flatnonzero(mask)
        if hits.size == 0:
            return
        self.count += int(hits.size)
        self.worst_margin = max(self.worst_margin, float(margins.reshape(-1)[hits].max()))
        room = hits.size if limit is None else max(0, limit - len(self.violations))
        for flat in hits[:room]:
            self.violations.append(decode(np.unravel_index(flat, mask.shape)))


def _values(f: ObjectiveOracle, num_actions: int, max_len: int, budget: Optional[int]):
    if f.num_actions != num_actions:
        raise ValueError(f"Oracle has {f.num_actions} actions, check requested {num_actions}")
    if max_len < 0:
        raise ValueError(f"max_len must be >= 0, got {max_len}")
    return f.levels(max_len, budget)


def check_forward_monotone(
    f: ObjectiveOracle,
    num_actions: int,
    max_len: int,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
    limit: Optional[int] = None
) -> ViolationReport:
    """
    Find (M, a) with |M| < max_len and f(M ⊕ (a)) < f(M) - tol

    Args:
        f: Objective oracle
        num_actions: Size of the action set
        max_len: Longest string evaluated
        tol: Comparison tolerance
        budget: Evaluation cap
        limit: Keep at most this many decoded violations (all are counted)

    Returns:
        ViolationReport of (M, (a)) pairs
    """
    tol = CONFIG['TOL'] if tol is None else tol
    n = num_actions
    values = _values(f, n, max_len, budget)
    report = ViolationReport("forward_monotone", max_len)

    for length in range(max_len):
        parent = values[length][:, None]
        child = values[length + 1].reshape(-1, n)
        margins = parent - child
        report._add(
            margins, margins > tol,
            lambda ix, L=length: (decode_index(int(ix[0]), L, n), (int(ix[1]),)),
            limit
        )
    return report


def check_backward_monotone(
    f: ObjectiveOracle,
    num_actions: int,
    max_len: int,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
    limit: Optional[int] = None
) -> ViolationReport:
    """
    Find ((a), M) with |M| < max_len and f((a) ⊕ M) < f(M) - tol

    Prepending single actions covers f(N ⊕ M) >= f(N) for every N by chaining.
    """
    tol = CONFIG['TOL'] if tol is None else tol
    n = num_actions
    values = _values(f, n, max_len, budget)
    report = ViolationReport("backward_monotone", max_len)

    for length in range(max_len):
        base = values[length][None, :]
        child = values[length + 1].reshape(n, -1)
        margins = base - child
        report._add(
            margins, margins > tol,
            lambda ix, L=length: ((int(ix[0]),), decode_index(int(ix[1]), L, n)),
            limit
        )
    return report


def check_diminishing_return(
    f: ObjectiveOracle,
    num_actions: int,
    max_len: int,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
    limit: Optional[int] = None
) -> ViolationReport:
    """
    Find (M, N, a) with M a proper prefix of N, |N| < max_len and
    f(M ⊕ (a)) - f(M) < f(N ⊕ (a)) - f(N) - tol

    Returns:
        ViolationReport of (M, N, (a)) triples
    """
    tol = CONFIG['TOL'] if tol is None else tol
    n = num_actions
    values = _values(f, n, max_len, budget)
    report = ViolationReport("diminishing_return", max_len)

    gains = [values[L + 1].reshape(-1, n) - values[L][:, None] for L in range(max_len)]
    for long_len in range(1, max_len):
        long_gain = gains[long_len]
        long_idx = np.arange(n ** long_len)
        for short_len in range(long_len):
            short_gain = gains[short_len][long_idx // n ** (long_len - short_len)]
            margins = long_gain - short_gain
            report._add(
                margins, margins > tol,
                lambda ix, L=long_len, l=short_len: (
                    decode_index(int(ix[0]) // n ** (L - l), l, n),
                    decode_index(int(ix[0]), L, n),
                    (int(ix[1]),)
                ),
                limit
            )
    return report


def check_lemma1(
    f: ObjectiveOracle,
    num_actions: int,
    max_len: int,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
    limit: Optional[int] = None
) -> ViolationReport:
    """
    Find N with |N| <= max_len and f(N) > sum of f((n_i)) + tol

    Holds on every string-submodular oracle.
    """
    tol = CONFIG['TOL'] if tol is None else tol
    n = num_actions
    values = _values(f, n, max_len, budget)
    report = ViolationReport("singleton_sum", max_len)

    singles = values[1] - values[0][0] if max_len >= 1 else np.zeros(n)
    sums = np.zeros(1)
    for length in range(1, max_len + 1):
        sums = np.add.outer(sums, singles).reshape(-1)
        margins = values[length] - sums
        report._add(
            margins, margins > tol,
            lambda ix, L=length: (decode_index(int(ix[0]), L, n),),
            limit
        )
    return report


def is_string_submodular(
    f: ObjectiveOracle,
    num_actions: int,
    max_len: int,
    tol: Optional[float] = None,
    budget: Optional[int] = None
) -> bool:
    """Forward monotone and diminishing return up to max_len"""
    return (
        check_forward_monotone(f, num_actions, max_len, tol, budget, limit=0).is_empty
        and check_diminishing_return(f, num_actions, max_len, tol, budget, limit=0).is_empty
    )
