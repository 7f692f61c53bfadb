"""Deterministic JSON rendering for reports.

Floats are written with 17 significant digits, which round-trips every
IEEE double exactly; non-finite floats (which JSON cannot carry) render
as null.  Dict insertion order is preserved, so a given document always
renders to the same bytes.
"""

from __future__ import annotations

import json

import numpy as np

__all__ = ["render"]


def render(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if value != value or value in (float("inf"), float("-inf")):
            return "null"
        return format(value, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {render(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(render(v) for v in obj) + "]"
    raise TypeError(f"cannot render {type(obj).__name__} as JSON")
