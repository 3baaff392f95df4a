"""
Greedy strategies

Forward greedy appends the action with the largest marginal gain at every
stage; backward greedy prepends; constrained greedy only considers
extensions that stay independent in a string matroid.
"""
import logging
from typing import List, Optional

import numpy as np

from utils.strings import ActionString
from .base_strategy import BaseStrategy, GreedyTrace, ProblemSpec

logger = logging.getLogger(__name__)


class GreedyStrategy(BaseStrategy):
    """
    Forward greedy over the uniform structure {|M| <= K}

    Parameters:
        tol (float): Tolerance used to report tie sets (default: CONFIG['TOL'])
    """

    def __init__(self, params: dict = None):
        super().__init__(name="greedy", params=params)

    def run(self, spec: ProblemSpec) -> GreedyTrace:
        f = spec.objective
        actions = list(range(spec.num_actions))
        string: ActionString = ()
        values = [f(string)]
        gains_log: List[float] = []
        ties_log = []

        for stage in range(1, spec.horizon + 1):
            gains = np.array([f(string + (a,)) - values[-1] for a in actions])
            chosen, ties = self.select(gains, actions)
            string = string + (chosen,)
            values.append(f(string))
            gains_log.append(values[-1] - values[-2])
            ties_log.append(ties)
            logger.debug("stage %d: chose %d (ties %s), gain %.6g", stage, chosen, ties, gains_log[-1])

        return GreedyTrace(string, gains_log, ties_log, values, name=self.name)


class BackwardGreedyStrategy(BaseStrategy):
    """Backward greedy: each stage prepends the action maximizing f((a) ⊕ Ĝ) - f(Ĝ)"""

    def __init__(self, params: dict = None):
        super().__init__(name="backward_greedy", params=params)

    def run(self, spec: ProblemSpec) -> GreedyTrace:
        f = spec.objective
        actions = list(range(spec.num_actions))
        string: ActionString = ()
        values = [f(string)]
        gains_log: List[float] = []
        ties_log = []

        for _ in range(spec.horizon):
            gains = np.array([f((a,) + string) - values[-1] for a in actions])
            chosen, ties = self.select(gains, actions)
            string = (chosen,) + string
            values.append(f(string))
            gains_log.append(values[-1] - values[-2])
            ties_log.append(ties)

        return GreedyTrace(string, gains_log, ties_log, values, name=self.name, direction="backward")


class ConstrainedGreedyStrategy(BaseStrategy):
    """
    Greedy restricted to feasible extensions of a string matroid

    Parameters:
        matroid: Object exposing is_independent(string) and rank
        tol (float): Tie-set tolerance
    """

    def __init__(self, matroid, params: Optional[dict] = None):
        params = dict(params or {})
        params["matroid"] = matroid
        super().__init__(name="constrained_greedy", params=params)

    def run(self, spec: ProblemSpec) -> GreedyTrace:
        f = spec.objective
        matroid = self.get_param("matroid")
        limit = min(spec.horizon, matroid.rank)
        string: ActionString = ()
        values = [f(string)]
        gains_log: List[float] = []
        ties_log = []
        note = None

        while len(string) < limit:
            feasible = [a for a in range(spec.num_actions) if matroid.is_independent(string + (a,))]
            if not feasible:
                note = f"no feasible extension at length {len(string)}"
                logger.warning("constrained greedy stopped early: %s", note)
                break
            gains = np.array([f(string + (a,)) - values[-1] for a in feasible])
            chosen, ties = self.select(gains, feasible)
            string = string + (chosen,)
            values.append(f(string))
            gains_log.append(values[-1] - values[-2])
            ties_log.append(ties)

        return GreedyTrace(
            string, gains_log, ties_log, values,
            name=self.name,
            complete=len(string) == limit and limit == spec.horizon,
            note=note
        )


def greedy(spec: ProblemSpec) -> GreedyTrace:
    """Run forward greedy on the uniform structure"""
    return GreedyStrategy().run(spec)


def backward_greedy(spec: ProblemSpec) -> GreedyTrace:
    """Run backward (prepending) greedy on the uniform structure"""
    return BackwardGreedyStrategy().run(spec)
