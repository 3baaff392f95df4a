"""Objective oracles"""
from .base_objective import FunctionOracle, NormalizedOracle, ObjectiveOracle, OrderSymmetricOracle, normalize
from .table import DenseTableOracle, LinearOracle, TableOracle, random_submodular_table

__all__ = [
    "ObjectiveOracle", "FunctionOracle", "NormalizedOracle", "OrderSymmetricOracle", "normalize",
    "TableOracle", "DenseTableOracle", "LinearOracle", "random_submodular_table",
]
