"""String-building strategies"""
from .base_strategy import BaseStrategy, GreedyTrace, ProblemSpec
from .exhaustive import constrained_optimal, optimal_exhaustive
from .greedy import (
    BackwardGreedyStrategy, ConstrainedGreedyStrategy, GreedyStrategy, backward_greedy, greedy
)

__all__ = [
    "BaseStrategy", "GreedyTrace", "ProblemSpec",
    "GreedyStrategy", "BackwardGreedyStrategy", "ConstrainedGreedyStrategy",
    "greedy", "backward_greedy", "optimal_exhaustive", "constrained_optimal",
]
