"""
Parameter sweeps: one bound-suite row per grid point

Sweep JSON:
    {"model": "tasks",
     "base": {"n": 2, "K": 3, "num_actions": 3, "L_hat": 0.4, "seed": 7},
     "sweep": {"axis": "U_hat", "values": [0.45, 0.5, 0.55, 0.6]}}

"base" is either a full instance document or generator parameters (see
InstanceLoader.DEFAULTS); the axis value overrides the matching key.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional

import pandas as pd

from bounds import BoundSuite, FAILED, NOT_APPLICABLE, PASS, THEOREMS
from objectives import infogain, tasks
from utils.config import CONFIG
from utils.instance_loader import MODELS, InstanceLoader, LoadedInstance

AXES = ("K", "U_hat", "noise_b", "seed")

# Keys whose presence marks "base" as a full instance document
DOCUMENT_KEYS = {
    "table": ("values", "weights"),
    "tasks": ("probs",),
    "infogain": ("noise_vars",),
}


def validate_sweep(doc: dict) -> bool:
    """
    Check a sweep document

    Returns:
        True if valid, raises ValueError otherwise
    """
    if doc.get("model") not in MODELS:
        raise ValueError(f"Sweep model must be one of {MODELS}, got {doc.get('model')}")
    sweep = doc.get("sweep")
    if not isinstance(sweep, dict) or "axis" not in sweep or "values" not in sweep:
        raise ValueError("Sweep document needs \"sweep\": {\"axis\": ..., \"values\": [...]}")
    if sweep["axis"] not in AXES:
        raise ValueError(f"Unknown sweep axis {sweep['axis']}; choose from {AXES}")
    if sweep["axis"] == "U_hat" and doc["model"] != "tasks":
        raise ValueError("U_hat sweeps need the tasks model")
    if sweep["axis"] == "noise_b" and doc["model"] != "infogain":
        raise ValueError("noise_b sweeps need the infogain model")
    if not sweep["values"]:
        raise ValueError("Sweep has no values")
    return True


def build_instance(model: str, base: dict, axis: str, value, grid=None) -> LoadedInstance:
    """Instance at one grid point"""
    is_document = any(key in base for key in DOCUMENT_KEYS[model])
    key = {"noise_b": "b"}.get(axis, axis)

    if is_document:
        if axis != "K":
            raise ValueError(f"Axis {axis} needs generator parameters, not a full instance document")
        return InstanceLoader(grid=grid, horizon=int(value)).from_dict(base, model)

    params = {**base, key: value}
    seed = int(params.pop("seed", 0))
    if "K" in params:
        params["K"] = int(params["K"])
    return InstanceLoader(grid=grid).generate(model, seed, **params)


def _closed_forms(instance: LoadedInstance) -> Dict[str, float]:
    m = instance.model
    if instance.kind == "tasks":
        return {
            "sigma_hat_closed": tasks.task_sigma_hat_closed_form(m),
            "eta_upper_closed": tasks.task_eta_upper(m),
            "submodular_sufficient": tasks.task_submodular_sufficient(m),
            "t5_sufficient": tasks.task_t5_hypothesis_sufficient(m),
        }
    if instance.kind == "infogain":
        upper = infogain.eta_hat_upper_closed_form(m)
        return {
            "eta_hat_lower": infogain.eta_hat_lower_closed_form(m),
            "eta_hat_upper": upper.instance,
            "eta_hat_upper_interval": upper.interval,
        }
    return {}


def evaluate_row(job: tuple) -> Dict:
    """
    Run the bound suite at one grid point

    Args:
        job: (model, base, axis, value, tol, budget, grid)

    Returns:
        Flat row dictionary
    """
    model, base, axis, value, tol, budget, grid = job
    instance = build_instance(model, base, axis, value, grid)
    suite = BoundSuite(instance.spec, instance.matroid, tol, budget)
    results = suite.run()

    def curvature(name):
        report = suite.curvatures.get(name)
        return math.nan if report is None else report.value

    row = {
        "axis": axis,
        "value": value,
        "K": instance.spec.horizon,
        "greedy": results["greedy"]["strategy"],
        "optimum": results["optimum"],
        "f_greedy": results["f_greedy"],
        "f_optimal": results["f_optimal"],
        "measured_ratio": results["measured_ratio"],
        "submodular": results["hypotheses"]["submodular"],
        "sigma_O": curvature("sigma(O)"),
        "eps_GK": curvature("epsilon(G_K)"),
        "eta_hat": curvature("eta_hat"),
    }
    row.update(_closed_forms(instance))
    for check in suite.checks:
        row[check.theorem] = math.nan if check.guaranteed_ratio is None else check.guaranteed_ratio
    counts = results["counts"]
    row["passed"] = counts[PASS]
    row["failed"] = counts[FAILED]
    row["not_applicable"] = counts[NOT_APPLICABLE]
    return row


def run_sweep(
    doc: dict,
    workers: Optional[int] = None,
    tol: Optional[float] = None,
    budget: Optional[int] = None,
    grid=None
) -> pd.DataFrame:
    """
    Evaluate every grid point of a sweep document

    Rows come back in the order of the axis values whatever the worker count.

    Args:
        doc: Sweep document
        workers: Process count (defaults to CONFIG['WORKERS'])
        tol: Comparison tolerance
        budget: Evaluation cap
        grid: Info-gain action grid override

    Returns:
        DataFrame with one row per axis value
    """
    validate_sweep(doc)
    workers = CONFIG['WORKERS'] if workers is None else workers
    tol = CONFIG['TOL'] if tol is None else tol
    budget = CONFIG['BUDGET'] if budget is None else budget

    model, base = doc["model"], doc.get("base", {})
    axis, values = doc["sweep"]["axis"], doc["sweep"]["values"]
    jobs = [(model, base, axis, value, tol, budget, grid) for value in values]
    print(f"Sweeping {axis} over {len(values)} values ({model}, {workers} worker(s))...")

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows: List[Dict] = list(pool.map(evaluate_row, jobs))
    else:
        rows = [evaluate_row(job) for job in jobs]

    frame = pd.DataFrame(rows)
    leading = [c for c in frame.columns if c not in THEOREMS and c not in ("passed", "failed", "not_applicable")]
    trailing = [t for t in THEOREMS if t in frame.columns] + ["passed", "failed", "not_applicable"]
    frame = frame[leading + trailing]

    failed = int(frame["failed"].sum())
    print(f"Completed sweep: {len(frame)} rows, {failed} failed checks")
    return frame
