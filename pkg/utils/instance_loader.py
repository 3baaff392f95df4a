"""
Loading problem instances from JSON files, or drawing random ones
"""
import json
import logging
import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from matroid import StringMatroid, matroid_from_dict
from objectives.base_objective import ObjectiveOracle, normalize
from objectives.infogain import InfoGainModel, infogain_objective, random_infogain_model
from objectives.table import LinearOracle, TableOracle, random_submodular_table
from objectives.tasks import TaskModel, random_task_model, task_objective
from strategies.base_strategy import ProblemSpec

logger = logging.getLogger(__name__)

MODELS = ("table", "tasks", "infogain")


@dataclass
class LoadedInstance:
    """A ready-to-run problem with the model it came from"""
    kind: str
    spec: ProblemSpec
    matroid: Optional[StringMatroid] = None
    model: Optional[object] = None  # TaskModel or InfoGainModel
    source: str = "random"


class InstanceLoader:
    """Builds instances from documents of the three model kinds"""

    # Random draws when no instance file is given
    DEFAULTS = {
        "table": {"num_actions": 3, "K": 4},
        "tasks": {"n": 2, "num_actions": 3, "K": 3, "L_hat": 0.4, "U_hat": 0.6},
        "infogain": {"K": 3, "a": 1.0, "b": 1.5, "s0": 1.0, "t0": 0.5},
    }

    def __init__(self, grid: Optional[Sequence[float]] = None, horizon: Optional[int] = None):
        """
        Initialize loader

        Args:
            grid: Info-gain action grid override
            horizon: K override (required for tables without "K")
        """
        self.grid = grid
        self.horizon = horizon

    def load(self, path: str, kind: str) -> LoadedInstance:
        """
        Read an instance file

        Args:
            path: JSON file
            kind: "table", "tasks" or "infogain"

        Returns:
            LoadedInstance
        """
        if not os.path.exists(path):
            raise FileNotFoundError(f"Instance file not found: {path}")
        with open(path, "r") as f:
            doc = json.load(f)
        instance = self.from_dict(doc, kind)
        instance.source = path
        logger.info("loaded %s instance from %s", kind, path)
        return instance

    def from_dict(self, doc: dict, kind: str) -> LoadedInstance:
        if kind not in MODELS:
            raise ValueError(f"Unknown model: {kind}")
        if kind == "tasks":
            if self.horizon is not None:
                doc = {**doc, "K": self.horizon}
            model = TaskModel.from_dict(doc)
            return self._wrap(kind, task_objective(model), model.K, model, forward_monotone=True)
        if kind == "infogain":
            if self.horizon is not None:
                doc = {**doc, "K": self.horizon}
            model = InfoGainModel.from_dict(doc, grid=self.grid)
            return self._wrap(kind, infogain_objective(model), model.K, model, forward_monotone=True)
        return self._table(doc)

    def _table(self, doc: dict) -> LoadedInstance:
        if "weights" in doc:
            f: ObjectiveOracle = LinearOracle(doc["weights"])
        else:
            f = TableOracle.from_dict(doc)
        if f(()) != 0:
            logger.info("table has f(∅) = %g; normalizing", f(()))
            f = normalize(f)

        K = self.horizon if self.horizon is not None else doc.get("K")
        if K is None:
            raise ValueError("Table instance needs a horizon: add \"K\" or pass --horizon")
        matroid = matroid_from_dict(doc["matroid"], f.num_actions) if "matroid" in doc else None
        return LoadedInstance("table", ProblemSpec(f.num_actions, int(K), f), matroid)

    def generate(self, kind: str, seed: int, num_actions: Optional[int] = None, **params) -> LoadedInstance:
        """
        Draw a random instance

        Args:
            kind: Model kind
            seed: Seed for numpy's default_rng
            num_actions: Action count (table and tasks)
            **params: Overrides of DEFAULTS[kind]

        Returns:
            LoadedInstance
        """
        if kind not in MODELS:
            raise ValueError(f"Unknown model: {kind}")
        p = {**self.DEFAULTS[kind], **params}
        if num_actions is not None:
            p["num_actions"] = num_actions
        if self.horizon is not None:
            p["K"] = self.horizon
        rng = np.random.default_rng(seed)

        if kind == "table":
            f = random_submodular_table(p["num_actions"], p["K"], rng)
            return LoadedInstance(kind, ProblemSpec(p["num_actions"], p["K"], f, forward_monotone=True))
        if kind == "tasks":
            model = random_task_model(
                p["n"], p["K"], p["num_actions"], p["L_hat"], p["U_hat"], rng, trend=p.get("trend")
            )
            return self._wrap(kind, task_objective(model), model.K, model, forward_monotone=True)
        model = random_infogain_model(
            p["K"], rng, a=p["a"], b=p["b"], s0=p["s0"], t0=p["t0"],
            nondecreasing=p.get("nondecreasing"), grid=self.grid
        )
        return self._wrap(kind, infogain_objective(model), model.K, model, forward_monotone=True)

    @staticmethod
    def _wrap(kind, f, K, model, forward_monotone=False) -> LoadedInstance:
        spec = ProblemSpec(f.num_actions, K, f, forward_monotone=forward_monotone)
        return LoadedInstance(kind, spec, None, model)


def parse_grid(text: Optional[str]) -> Optional[list]:
    """Comma-separated power splits, e.g. "0,0.5,1" """
    if text is None:
        return None
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"Invalid grid: {text!r}")
