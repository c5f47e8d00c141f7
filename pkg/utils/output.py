"""
Result Writers
==============
CSV and JSON writers whose output depends on the data only: fixed float
format, LF line endings, sorted JSON keys and a top-level schema version.
Identical results give byte-identical files.
"""

import json
import math
import os
from dataclasses import asdict, is_dataclass
from enum        import Enum

import numpy as np
import pandas as pd


OUT_DIR        = os.getenv("POLYKIN_OUT", "out")
SCHEMA_VERSION = 1
FLOAT_FORMAT   = "%.17g"


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def output_path(name: str, out_dir: str = None) -> str:
    return os.path.join(out_dir or OUT_DIR, name)


def write_csv(df: pd.DataFrame, path: str) -> str:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        df.to_csv(fh, index=False, lineterminator="\n", float_format=FLOAT_FORMAT)
    return path


def to_jsonable(obj):
    """Plain JSON types; numpy values unwrapped, non-finite floats as None."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, pd.DataFrame):
        return [to_jsonable(row) for row in obj.to_dict(orient="records")]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(payload: dict) -> str:
    body = {"schema": SCHEMA_VERSION, **to_jsonable(payload)}
    return json.dumps(body, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(payload: dict, path: str) -> str:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps(payload))
    return path
