"""
Base strategy class that all string-building strategies inherit from
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from objectives.base_objective import ObjectiveOracle
from utils.config import CONFIG
from utils.strings import ActionString, format_string


@dataclass
class ProblemSpec:
    """Maximize f(M) over strings with |M| <= horizon"""
    num_actions: int
    horizon: int
    objective: ObjectiveOracle
    forward_monotone: bool = False  # lets exhaustive search scan only full-length strings

    def __post_init__(self):
        self.validate()

    def validate(self) -> bool:
        """
        Validate sizes and the oracle's action set

        Returns:
            True if valid, raises ValueError otherwise
        """
        if self.num_actions < 1:
            raise ValueError(f"num_actions must be >= 1, got {self.num_actions}")
        if self.horizon < 1:
            raise ValueError(f"horizon K must be >= 1, got {self.horizon}")
        if self.objective.num_actions != self.num_actions:
            raise ValueError(
                f"Objective is defined over {self.objective.num_actions} actions, spec has {self.num_actions}"
            )
        return True


@dataclass
class GreedyTrace:
    """Stage-by-stage record of a greedy run"""
    strategy: ActionString
    stage_gains: List[float]
    tie_sets: List[Tuple[int, ...]]
    values: List[float]  # f of the partial string after 0..k stages
    name: str = "greedy"
    direction: str = "forward"  # "forward" appends, "backward" prepends
    complete: bool = True
    note: Optional[str] = None

    @property
    def value(self) -> float:
        return self.values[-1]

    def __len__(self) -> int:
        return len(self.strategy)

    def partial(self, i: int) -> ActionString:
        """String after i stages (G_i, or the last i elements for backward greedy)"""
        if self.direction == "backward":
            return self.strategy[len(self.strategy) - i:]
        return self.strategy[:i]

    def to_dict(self) -> dict:
        """Convert trace to dictionary"""
        return {
            "name": self.name,
            "direction": self.direction,
            "strategy": format_string(self.strategy),
            "value": self.value,
            "stage_gains": list(self.stage_gains),
            "tie_sets": [format_string(t) for t in self.tie_sets],
            "complete": self.complete,
            "note": self.note
        }


class BaseStrategy(ABC):
    """
    Abstract base class for greedy-type strategies

    All strategies must implement:
    - run(): Build a string for a problem spec and return its trace
    """

    def __init__(self, name: str, params: Optional[dict] = None):
        """
        Initialize strategy

        Args:
            name: Strategy name
            params: Dictionary of strategy parameters
        """
        self.name = name
        self.params = params or {}

    @abstractmethod
    def run(self, spec: ProblemSpec) -> GreedyTrace:
        """
        Build a string stage by stage

        Args:
            spec: Problem to solve

        Returns:
            GreedyTrace of the run
        """
        pass

    def get_param(self, key: str, default=None):
        """
        Get strategy parameter with fallback to default

        Args:
            key: Parameter key
            default: Default value if key not found

        Returns:
            Parameter value or default
        """
        return self.params.get(key, default)

    def select(self, gains: np.ndarray, candidates: List[int]) -> Tuple[int, Tuple[int, ...]]:
        """
        Pick the best candidate action

        The chosen action is the exact argmax, lowest id first; the tie set
        reports every candidate within tol of the maximum.

        Args:
            gains: Marginal gain per candidate (same order as candidates)
            candidates: Candidate action ids in increasing order

        Returns:
            Tuple of (chosen action, tie set)
        """
        tol = self.get_param("tol", CONFIG['TOL'])
        best = int(np.argmax(gains))
        ties = tuple(a for a, g in zip(candidates, gains) if g >= gains[best] - tol)
        return candidates[best], ties

    def __str__(self) -> str:
        return f"{self.name} (params: {self.params})"

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__}: {self.name}>"
