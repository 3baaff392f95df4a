"""
Writing result tables to CSV or JSON
"""
import json
import os
from typing import Optional

import pandas as pd

FORMATS = ("csv", "json")


def export_frame(
    frame: pd.DataFrame,
    path: str,
    format: str = "csv",
    meta: Optional[dict] = None
) -> str:
    """
    Write one result table

    CSV gets the rows only; JSON gets the meta fields plus "rows": [...].
    Nothing time-dependent is written, so repeated runs give identical files.

    Args:
        frame: Table to write
        path: Output file
        format: "csv" or "json"
        meta: Extra JSON fields (ignored for CSV)

    Returns:
        The path written
    """
    if format not in FORMATS:
        raise ValueError(f"Unknown format: {format}")
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    if format == "csv":
        frame.to_csv(path, index=False, float_format="%.12g")
    else:
        doc = dict(meta or {})
        doc["rows"] = frame.to_dict(orient="records")
        with open(path, "w") as f:
            json.dump(doc, f, indent=2, default=str)
    return path
