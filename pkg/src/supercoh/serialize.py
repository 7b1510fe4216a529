"""Versioned JSON documents for results and byte-stable dumping."""

from __future__ import annotations

import json
from typing import Any

import numpy as np

SCHEMA = "supercoh/1"


def _default(obj: Any):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, tuple):
        return list(obj)
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def envelope(kind: str, data: Any, **meta: Any) -> dict:
    return {"schema": SCHEMA, "kind": kind, **meta, "data": data}


def dumps(doc: Any) -> str:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, default=_default, ensure_ascii=True) + "\n"


def loads(text: str) -> dict:
    doc = json.loads(text)
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise ValueError(f"not a {SCHEMA} document")
    return doc
