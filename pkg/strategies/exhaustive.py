"""
Exhaustive optimum over the uniform structure or a string matroid
"""
import logging
from typing import Optional, Tuple

import numpy as np

from utils.config import CONFIG
from utils.errors import BudgetExceededError
from utils.strings import ActionString, count_strings, decode_index, iter_strings
from .base_strategy import ProblemSpec

logger = logging.getLogger(__name__)


def optimal_exhaustive(spec: ProblemSpec, budget: Optional[int] = None) -> Tuple[ActionString, float]:
    """
    Maximize f over {|M| <= K} by enumeration

    All lengths 0..K are scanned unless the ProblemSpec is flagged forward-monotone,
    in which case only length K is. Ties go to the longer string, then to the
    lowest index.

    Args:
        spec: Problem spec
        budget: Evaluation cap (defaults to CONFIG['BUDGET'])

    Returns:
        Tuple of (maximizer, value)
    """
    n, K = spec.num_actions, spec.horizon
    levels = spec.objective.levels(K, budget)
    lengths = [K] if spec.forward_monotone else range(K, -1, -1)

    best: ActionString = ()
    best_value = -np.inf
    for length in lengths:
        idx = int(np.argmax(levels[length]))
        if levels[length][idx] > best_value:
            best_value = float(levels[length][idx])
            best = decode_index(idx, length, n)

    logger.debug("optimum %s with value %.6g", best, best_value)
    return best, best_value


def constrained_optimal(spec: ProblemSpec, matroid, budget: Optional[int] = None) -> Tuple[ActionString, float]:
    """
    Maximize f over the independent strings of a matroid

    Args:
        spec: Problem spec
        matroid: Object exposing is_independent(string) and rank
        budget: Evaluation cap

    Returns:
        Tuple of (maximizer, value); ties go to the longer string
    """
    budget = CONFIG['BUDGET'] if budget is None else budget
    n = spec.num_actions
    rank = min(matroid.rank, spec.horizon)
    requested = count_strings(n, rank)
    if requested > budget:
        raise BudgetExceededError(requested, budget, "constrained optimum")

    levels = spec.objective.levels(rank, budget)
    best: ActionString = ()
    best_value = -np.inf
    for length in range(rank, -1, -1):
        for idx, string in enumerate(iter_strings(n, length)):
            if levels[length][idx] > best_value and matroid.is_independent(string):
                best_value = float(levels[length][idx])
                best = tuple(string)

    if best_value == -np.inf:
        raise ValueError("Matroid has no independent string")
    return best, best_value
