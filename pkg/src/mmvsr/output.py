"""Deterministic text output.

All numeric output is printed with 17 significant digits so doubles
round-trip exactly and repeated runs are byte-identical. The JSON emitter
below is used instead of json.dumps because the stdlib encoder offers no
hook for float formatting.
"""

import json

import numpy as np


def format_float(x) -> str:
    """17 significant digits; round-trippable for any finite double."""
    return format(float(x), ".17g")


def dumps(obj) -> str:
    """Serialize to JSON with .17g floats and insertion-ordered keys."""
    parts = []
    _emit(obj, parts)
    return "".join(parts)


def _emit(obj, parts):
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, str):
        parts.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        parts.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if x != x or x in (float("inf"), float("-inf")):
            parts.append("null")
        else:
            parts.append(format_float(x))
    elif isinstance(obj, dict):
        parts.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                parts.append(",")
            parts.append(json.dumps(str(key)))
            parts.append(":")
            _emit(value, parts)
        parts.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        parts.append("[")
        for i, value in enumerate(obj):
            if i:
                parts.append(",")
            _emit(value, parts)
        parts.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def csv_cell(value) -> str:
    """One CSV field: ints verbatim, floats at .17g, None empty."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    x = float(value)
    if x != x:
        return ""
    return format_float(x)


def csv_lines(header, rows) -> str:
    """Render header plus rows as newline-terminated CSV text."""
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(csv_cell(v) for v in row))
    return "\n".join(out) + "\n"
