"""Shared utilities: action strings, configuration, errors and output"""
from .config import CONFIG
from .errors import (
    BudgetExceededError, DegenerateOracleError, DepthExceededError,
    NotMonotoneError, PermutationConstructionError
)
from .strings import ActionString, format_string, parse_string

__all__ = [
    "CONFIG", "ActionString", "format_string", "parse_string",
    "BudgetExceededError", "DegenerateOracleError", "DepthExceededError",
    "NotMonotoneError", "PermutationConstructionError",
]
