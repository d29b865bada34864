"""Report envelope, JSON schema validation and CSV projection."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from importlib import resources
from typing import Any

import numpy as np

from .multiplicative import RNG_NAME

SCHEMA_VERSION = "1.0"
GENERATOR_NAME = RNG_NAME


def to_plain(obj: Any) -> Any:
    """JSON-ready copy: complex -> [re, im], non-finite floats -> None, numpy -> builtins."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_plain(obj.real), to_plain(obj.imag)]
    if dataclasses.is_dataclass(obj) and hasattr(obj, "to_json"):
        return to_plain(obj.to_json())
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def envelope(subcommand: str, config: dict, seed: int, result: Any) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "subcommand": subcommand,
        "config": to_plain(config),
        "generator": {"name": GENERATOR_NAME, "seed": int(seed)},
        "result": to_plain(result),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_schema() -> dict:
    return json.loads(resources.files("chartax").joinpath("report_schema.json").read_text())


def validate(report: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if the report does not match the schema."""
    import jsonschema

    jsonschema.validate(report, load_schema())


def _flatten(row: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in row.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v, sort_keys=True)
        else:
            out[key] = v
    return out


def to_csv(rows: list[dict]) -> str:
    """One line per row; nested fields are dotted, lists are JSON-encoded."""
    flat = [_flatten(to_plain(r)) for r in rows]
    fields: list[str] = []
    for r in flat:
        fields += [k for k in r if k not in fields]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    w.writerows(flat)
    return buf.getvalue()
