"""
Table-backed and string-linear oracles, plus the random string-submodular generator

Table JSON:
    {"num_actions": 3, "values": {"": 0.0, "0": 1.0, "0,1": 1.5}, "default": 0.0}
Keys are comma-joined action ids; missing strings take "default".
"""
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from utils.strings import (
    ActionString, decode_index, format_string, parse_string, string_index, validate_string
)
from .base_objective import ObjectiveOracle


class TableOracle(ObjectiveOracle):
    """Sparse lookup table with a default value"""

    def __init__(
        self,
        num_actions: int,
        values: Mapping[Sequence[int], float],
        default: float = 0.0,
        name: str = "table"
    ):
        super().__init__(num_actions, name)
        self.values: Dict[ActionString, float] = {
            validate_string(k, num_actions): float(v) for k, v in values.items()
        }
        self.default = float(default)

    def evaluate(self, string: ActionString) -> float:
        return self.values.get(string, self.default)

    def to_dict(self) -> dict:
        """Convert table to its JSON document"""
        return {
            "num_actions": self.num_actions,
            "values": {format_string(k): v for k, v in sorted(self.values.items(), key=lambda kv: (len(kv[0]), kv[0]))},
            "default": self.default
        }

    @classmethod
    def from_dict(cls, doc: dict, name: str = "table") -> "TableOracle":
        """
        Build a table oracle from its JSON document

        Args:
            doc: Dictionary with num_actions, values and optional default

        Returns:
            TableOracle
        """
        missing = [key for key in ("num_actions", "values") if key not in doc]
        if missing:
            raise ValueError(f"Table document missing required keys: {missing}")
        values = {parse_string(k): v for k, v in doc["values"].items()}
        return cls(int(doc["num_actions"]), values, doc.get("default", 0.0), name=name)


class DenseTableOracle(ObjectiveOracle):
    """Table holding every string up to a fixed depth as per-length arrays"""

    def __init__(self, num_actions: int, tables: List[np.ndarray], default: float = 0.0, name: str = "dense_table"):
        super().__init__(num_actions, name)
        for length, table in enumerate(tables):
            if len(table) != num_actions ** length:
                raise ValueError(
                    f"Level {length} has {len(table)} entries, expected {num_actions ** length}"
                )
        self.tables = [np.asarray(t, dtype=float) for t in tables]
        self.default = float(default)

    @property
    def depth(self) -> int:
        return len(self.tables) - 1

    def evaluate(self, string: ActionString) -> float:
        if len(string) > self.depth:
            return self.default
        return float(self.tables[len(string)][string_index(string, self.num_actions)])

    def _compute_level(self, length: int) -> np.ndarray:
        if length > self.depth:
            return np.full(self.num_actions ** length, self.default)
        return self.tables[length].copy()

    def to_dict(self) -> dict:
        """Export in the sparse table JSON format"""
        values = {}
        for length, table in enumerate(self.tables):
            for idx, value in enumerate(table):
                values[format_string(decode_index(idx, length, self.num_actions))] = float(value)
        return {"num_actions": self.num_actions, "values": values, "default": self.default}


class LinearOracle(ObjectiveOracle):
    """String-linear objective f(M) = sum of per-action weights"""

    def __init__(self, weights: Sequence[float], name: str = "linear"):
        super().__init__(len(weights), name)
        self.weights = np.asarray(weights, dtype=float)

    def evaluate(self, string: ActionString) -> float:
        return float(sum(self.weights[a] for a in string))

    def _compute_level(self, length: int) -> np.ndarray:
        level = np.zeros(1)
        for _ in range(length):
            level = np.add.outer(level, self.weights).reshape(-1)
        return level


def random_submodular_table(
    num_actions: int,
    K: int,
    rng: np.random.Generator,
    depth: Optional[int] = None
) -> DenseTableOracle:
    """
    Draw a string-submodular table oracle

    Root gains are uniform on [0.1, 1]; the gain of each action after M ⊕ (b)
    is its gain after M times a U[0, 1] factor, so gains never increase along
    a prefix extension and never go negative.

    Args:
        num_actions: Size of the action set
        K: Horizon
        rng: numpy Generator
        depth: Deepest tabulated length (defaults to 2K + 2, enough for
            the default elemental-curvature search)

    Returns:
        DenseTableOracle normalized to f(∅) = 0
    """
    depth = 2 * K + 2 if depth is None else depth
    gains = rng.uniform(0.1, 1.0, size=(1, num_actions))
    tables = [np.zeros(1)]
    for length in range(depth):
        tables.append((tables[-1][:, None] + gains).reshape(-1))
        if length + 1 < depth:
            parent = np.repeat(gains, num_actions, axis=0)
            gains = parent * rng.uniform(0.0, 1.0, size=parent.shape)
    return DenseTableOracle(num_actions, tables, default=0.0, name="random_submodular")
