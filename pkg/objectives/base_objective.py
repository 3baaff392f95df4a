"""
Objective oracle contract that every string function implements
"""
import logging
from abc import ABC, abstractmethod
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from utils.config import CONFIG
from utils.errors import BudgetExceededError
from utils.strings import ActionString, EMPTY, count_strings, iter_strings, string_index, validate_string

logger = logging.getLogger(__name__)


class ObjectiveOracle(ABC):
    """
    Abstract base class for deterministic string functions f: A* -> R

    Subclasses implement evaluate(). Calling the oracle memoizes values per
    string, and levels() materializes every string of each length as a numpy
    array in index order, which is what the checkers and curvature scans
    consume.
    """

    def __init__(self, num_actions: int, name: Optional[str] = None):
        """
        Initialize oracle

        Args:
            num_actions: Size of the action set
            name: Display name (defaults to the class name)
        """
        if int(num_actions) < 1:
            raise ValueError(f"num_actions must be >= 1, got {num_actions}")
        self.num_actions = int(num_actions)
        self.name = name or self.__class__.__name__
        self._memo: Dict[ActionString, float] = {}
        self._levels: List[np.ndarray] = []

    @abstractmethod
    def evaluate(self, string: ActionString) -> float:
        """
        Compute f(string) without caching

        Args:
            string: Tuple of action ids

        Returns:
            Objective value
        """
        pass

    def __call__(self, string: Sequence[int] = EMPTY) -> float:
        s = validate_string(string, self.num_actions)
        if len(s) < len(self._levels):
            return float(self._levels[len(s)][string_index(s, self.num_actions)])
        value = self._memo.get(s)
        if value is None:
            value = float(self.evaluate(s))
            if not np.isfinite(value):
                raise ValueError(f"{self.name} returned non-finite value {value} at {s}")
            self._memo[s] = value
        return value

    def gain(self, base: Sequence[int], action: int) -> float:
        """Marginal gain f(base ⊕ (action)) - f(base)"""
        base = tuple(base)
        return self(base + (action,)) - self(base)

    def levels(self, max_len: int, budget: Optional[int] = None) -> List[np.ndarray]:
        """
        Values of every string up to max_len, one array per length

        Args:
            max_len: Longest string length required
            budget: Evaluation cap (defaults to CONFIG['BUDGET'])

        Returns:
            List where entry L holds the num_actions**L values of length L
        """
        budget = CONFIG['BUDGET'] if budget is None else budget
        requested = count_strings(self.num_actions, max_len)
        if requested > budget:
            raise BudgetExceededError(requested, budget, f"{self.name} up to length {max_len}")

        while len(self._levels) <= max_len:
            length = len(self._levels)
            logger.debug("%s: materializing %d strings of length %d",
                         self.name, self.num_actions ** length, length)
            level = np.asarray(self._compute_level(length), dtype=float)
            if not np.all(np.isfinite(level)):
                raise ValueError(f"{self.name} returned non-finite values at length {length}")
            self._levels.append(level)
        return self._levels[:max_len + 1]

    def _compute_level(self, length: int) -> np.ndarray:
        """Evaluate all strings of one length; subclasses may vectorize"""
        return np.fromiter(
            (self(s) for s in iter_strings(self.num_actions, length)),
            dtype=float,
            count=self.num_actions ** length
        )

    def clear_cache(self):
        """Drop memoized values and materialized levels"""
        self._memo.clear()
        self._levels = []

    def __str__(self) -> str:
        return f"{self.name} (|A|={self.num_actions})"

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__}: {self.name}>"


class FunctionOracle(ObjectiveOracle):
    """Wraps a plain callable on tuples"""

    def __init__(self, num_actions: int, fn: Callable[[ActionString], float], name: str = "function"):
        super().__init__(num_actions, name)
        self.fn = fn

    def evaluate(self, string: ActionString) -> float:
        return self.fn(string)


class NormalizedOracle(ObjectiveOracle):
    """g(M) = f(M) - f(∅)"""

    def __init__(self, base: ObjectiveOracle):
        super().__init__(base.num_actions, f"normalized({base.name})")
        self.base = base
        self.offset = base(EMPTY)

    def evaluate(self, string: ActionString) -> float:
        return self.base(string) - self.offset


class OrderSymmetricOracle(ObjectiveOracle):
    """Evaluates a base oracle on the sorted string, so f(M) = f(P(M)) for every permutation P"""

    def __init__(self, base: ObjectiveOracle):
        super().__init__(base.num_actions, f"symmetric({base.name})")
        self.base = base

    def evaluate(self, string: ActionString) -> float:
        return self.base(tuple(sorted(string)))


def normalize(f: ObjectiveOracle) -> ObjectiveOracle:
    """
    Shift an oracle so that f(∅) = 0

    Args:
        f: Any objective oracle

    Returns:
        Oracle g with g(M) = f(M) - f(∅)
    """
    return NormalizedOracle(f)
