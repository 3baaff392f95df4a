"""
Exception types raised across StringBound
"""


class BudgetExceededError(RuntimeError):
    """Raised when an enumeration would request more oracle evaluations than allowed"""

    def __init__(self, requested: int, budget: int, what: str = "enumeration"):
        self.requested = requested
        self.budget = budget
        super().__init__(
            f"{what} needs {requested} oracle evaluations, budget is {budget}"
        )


class DegenerateOracleError(ValueError):
    """Raised when every curvature candidate has a zero denominator"""


class DepthExceededError(ValueError):
    """Raised when an application oracle is evaluated past its probe depth"""

    def __init__(self, length: int, depth: int):
        self.length = length
        self.depth = depth
        super().__init__(f"string of length {length} exceeds probe depth {depth}")


class PermutationConstructionError(RuntimeError):
    """Raised when no remaining element can be placed while building a stage-wise permutation"""


class NotMonotoneError(ValueError):
    """Raised when stage probabilities are neither non-increasing nor non-decreasing"""
