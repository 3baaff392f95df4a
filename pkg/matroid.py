"""
String matroids: independence oracles over strings with a rank

A family I of strings is a string matroid when it is hereditary under
subsequences and has the augmentation property: for M, N in I with
|M| < |N| some element x of N gives M ⊕ (x) in I. Augmentation is read as
appending only.
"""
import logging
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence

import numpy as np

from checkers import ViolationReport
from objectives.base_objective import ObjectiveOracle
from strategies.base_strategy import GreedyTrace, ProblemSpec
from strategies.exhaustive import constrained_optimal
from strategies.greedy import ConstrainedGreedyStrategy
from utils.config import CONFIG
from utils.errors import BudgetExceededError, PermutationConstructionError
from utils.strings import ActionString, count_strings, format_string, iter_strings, parse_string

logger = logging.getLogger(__name__)


class StringMatroid(ABC):
    """Independence oracle with a rank (longest independent string)"""

    def __init__(self, rank: int, name: str):
        if rank < 1:
            raise ValueError(f"rank must be >= 1, got {rank}")
        self.rank = int(rank)
        self.name = name

    @abstractmethod
    def is_independent(self, string: Sequence[int]) -> bool:
        """True iff string is in I"""
        pass

    def to_dict(self) -> dict:
        return {"kind": self.name, "rank": self.rank}

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__}: rank {self.rank}>"


class UniformMatroid(StringMatroid):
    """All strings of length <= rank"""

    def __init__(self, rank: int):
        super().__init__(rank, "uniform")

    def is_independent(self, string: Sequence[int]) -> bool:
        return len(string) <= self.rank


class MaxRepeatsMatroid(StringMatroid):
    """Strings of length <= rank where action a appears at most caps[a] times"""

    def __init__(self, rank: int, caps: Sequence[int]):
        super().__init__(rank, "max_repeats")
        if any(c < 0 for c in caps):
            raise ValueError(f"caps must be nonnegative, got {list(caps)}")
        self.caps = [int(c) for c in caps]

    def is_independent(self, string: Sequence[int]) -> bool:
        if len(string) > self.rank:
            return False
        counts = Counter(string)
        return all(a < len(self.caps) and k <= self.caps[a] for a, k in counts.items())

    def to_dict(self) -> dict:
        return {"kind": self.name, "rank": self.rank, "caps": list(self.caps)}


class PrefixForbiddenMatroid(StringMatroid):
    """Strings of length <= rank none of whose prefixes is on the forbidden list"""

    def __init__(self, rank: int, forbidden: Iterable[Sequence[int]]):
        super().__init__(rank, "prefix_forbidden")
        self.forbidden = frozenset(tuple(s) for s in forbidden)
        if () in self.forbidden:
            raise ValueError("The empty string cannot be forbidden")

    def is_independent(self, string: Sequence[int]) -> bool:
        string = tuple(string)
        if len(string) > self.rank:
            return False
        return not any(string[:j] in self.forbidden for j in range(1, len(string) + 1))

    @classmethod
    def opening_only(cls, num_actions: int, rank: int, actions: Iterable[int]) -> "PrefixForbiddenMatroid":
        """
        Actions that may only be taken at the first stage

        Forbids every prefix of length 2..rank ending in one of the actions.
        """
        actions = sorted(set(actions))
        forbidden = [
            head + (a,)
            for length in range(1, rank)
            for head in iter_strings(num_actions, length)
            for a in actions
        ]
        return cls(rank, forbidden)

    def to_dict(self) -> dict:
        return {
            "kind": self.name,
            "rank": self.rank,
            "forbidden": sorted(format_string(s) for s in self.forbidden)
        }


def matroid_from_dict(doc: dict, num_actions: int) -> StringMatroid:
    """
    Build one of the built-in matroids from its JSON document

    Args:
        doc: {"kind": "uniform" | "max_repeats" | "prefix_forbidden", "rank": K, ...}
        num_actions: Size of the action set

    Returns:
        StringMatroid
    """
    kind = doc.get("kind")
    if "rank" not in doc:
        raise ValueError("Matroid document missing 'rank'")
    rank = int(doc["rank"])
    if kind == "uniform":
        return UniformMatroid(rank)
    if kind == "max_repeats":
        caps = doc.get("caps")
        if caps is None or len(caps) != num_actions:
            raise ValueError(f"max_repeats needs one cap per action ({num_actions})")
        return MaxRepeatsMatroid(rank, caps)
    if kind == "prefix_forbidden":
        if "opening_only" in doc:
            return PrefixForbiddenMatroid.opening_only(num_actions, rank, doc["opening_only"])
        return PrefixForbiddenMatroid(rank, [parse_string(s) for s in doc.get("forbidden", [])])
    raise ValueError(f"Unknown matroid kind: {kind}")


def validate_axioms(
    m: StringMatroid,
    num_actions: int,
    budget: Optional[int] = None,
    limit: Optional[int] = None
) -> ViolationReport:
    """
    Check the hereditary and augmentation axioms over all strings up to rank

    Hereditary violations are recorded as (M, N) with N a one-element
    deletion of an independent M that is not independent. Augmentation
    violations are (M, N) with no element of N appendable to M. Missing
    empty string, an independent string longer than rank, or no independent
    string of length rank are recorded as single-string violations.

    Args:
        m: Matroid to validate
        num_actions: Size of the action set
        budget: Enumeration cap
        limit: Keep at most this many decoded violations

    Returns:
        ViolationReport (check "matroid_axioms")
    """
    budget = CONFIG['BUDGET'] if budget is None else budget
    requested = count_strings(num_actions, m.rank + 1)
    if requested > budget:
        raise BudgetExceededError(requested, budget, "matroid validation")

    report = ViolationReport("matroid_axioms", m.rank)

    def record(*parts):
        report.count += 1
        report.worst_margin = 1.0
        if limit is None or len(report.violations) < limit:
            report.violations.append(tuple(parts))

    independent: List[ActionString] = [
        s for length in range(m.rank + 1) for s in iter_strings(num_actions, length) if m.is_independent(s)
    ]
    members = set(independent)

    if () not in members:
        record(())
    if not any(len(s) == m.rank for s in independent):
        record(("rank",),)
    for s in iter_strings(num_actions, m.rank + 1):
        if m.is_independent(s):
            record(s)
            break

    for s in independent:
        for j in range(len(s)):
            sub = s[:j] + s[j + 1:]
            if sub not in members:
                record(s, sub)

    extendable = {
        s: {a for a in range(num_actions) if s + (a,) in members or (len(s) < m.rank and m.is_independent(s + (a,)))}
        for s in independent
    }
    element_sets = {s: set(s) for s in independent}
    by_length: dict = {}
    for s in independent:
        by_length.setdefault(len(s), []).append(s)
    for short in independent:
        ext = extendable[short]
        for length in range(len(short) + 1, m.rank + 1):
            for long in by_length.get(length, []):
                if ext.isdisjoint(element_sets[long]):
                    record(short, long)

    if report.count:
        logger.info("matroid %s: %d axiom violations", m.name, report.count)
    return report


def constrained_greedy(spec: ProblemSpec, m: StringMatroid) -> GreedyTrace:
    """Greedy over feasible extensions; stops early (recorded in the trace) if none exist"""
    return ConstrainedGreedyStrategy(m).run(spec)


@dataclass
class PermutationCertificate:
    """Reordering of N whose stage-i element is a feasible greedy alternative at stage i"""
    original: ActionString
    permuted: ActionString
    per_stage_checks: List[bool]
    alternative_gains: List[float] = field(default_factory=list)
    greedy_gains: List[float] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return (
            all(self.per_stage_checks)
            and Counter(self.original) == Counter(self.permuted)
        )

    def to_dict(self) -> dict:
        return {
            "original": format_string(self.original),
            "permuted": format_string(self.permuted),
            "per_stage_checks": list(self.per_stage_checks),
            "alternative_gains": list(self.alternative_gains),
            "greedy_gains": list(self.greedy_gains)
        }


def build_theorem3_permutation(
    f: ObjectiveOracle,
    m: StringMatroid,
    greedy: GreedyTrace,
    N: Sequence[int],
    tol: Optional[float] = None
) -> PermutationCertificate:
    """
    Reorder N so that each element could have been chosen by greedy at its stage

    Works backward from i = |N| to 1: among the unplaced elements of N whose
    appension to G_{i-1} is independent, place the one with the largest
    marginal gain at position i (ties by position in N). Each stage is then
    checked against the greedy gain, f(G_{i-1} ⊕ (n_i)) - f(G_{i-1}) <=
    f(G_i) - f(G_{i-1}) + tol.

    Args:
        f: Objective oracle
        m: Matroid the greedy ran under
        greedy: Trace of constrained greedy
        N: Independent string no longer than the greedy strategy
        tol: Comparison tolerance

    Returns:
        PermutationCertificate
    """
    tol = CONFIG['TOL'] if tol is None else tol
    N = tuple(N)
    if len(N) > len(greedy.strategy):
        raise ValueError(f"|N| = {len(N)} exceeds greedy length {len(greedy.strategy)}")

    remaining = list(enumerate(N))
    placed: List[Optional[int]] = [None] * len(N)
    alt_gains = [0.0] * len(N)
    greedy_gains = [0.0] * len(N)
    checks = [False] * len(N)

    for i in range(len(N), 0, -1):
        prefix = greedy.partial(i - 1)
        base = f(prefix)
        feasible = [(pos, x) for pos, x in remaining if m.is_independent(prefix + (x,))]
        if not feasible:
            raise PermutationConstructionError(
                f"no element of {format_string(N)} can extend G_{i - 1} = {format_string(prefix)}; "
                "the matroid fails augmentation"
            )
        gains = [f(prefix + (x,)) - base for _, x in feasible]
        choice = int(np.argmax(gains))
        pos, x = feasible[choice]
        remaining.remove((pos, x))
        placed[i - 1] = x
        alt_gains[i - 1] = gains[choice]
        greedy_gains[i - 1] = greedy.values[i] - greedy.values[i - 1]
        checks[i - 1] = bool(alt_gains[i - 1] <= greedy_gains[i - 1] + tol)

    return PermutationCertificate(N, tuple(placed), checks, alt_gains, greedy_gains)


__all__ = [
    "StringMatroid", "UniformMatroid", "MaxRepeatsMatroid", "PrefixForbiddenMatroid",
    "PermutationCertificate", "matroid_from_dict", "validate_axioms",
    "constrained_greedy", "constrained_optimal", "build_theorem3_permutation",
]
