"""Canonical JSON rendering for byte-stable files and golden tests.

Rules: object keys sorted lexicographically, floats rendered with 17
significant digits (round-trip exact for IEEE doubles), no insignificant
whitespace. ``dumps`` output is a single line; callers append the newline.
"""

from __future__ import annotations

import json
import math
from typing import Any


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite float not representable: {x!r}")
    s = f"{x:.17g}"
    # Keep floats typed as floats on re-parse.
    if "." not in s and "e" not in s and "E" not in s:
        s += ".0"
    return s


def dumps(value: Any) -> str:
    out: list[str] = []
    _emit(value, out)
    return "".join(out)


def _emit(value: Any, out: list[str]) -> None:
    if value is None:
        out.append("null")
    elif isinstance(value, bool):
        out.append("true" if value else "false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(format_float(value))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if not isinstance(key, str):
                raise TypeError(f"object keys must be strings, got {key!r}")
            if i:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _emit(value[key], out)
        out.append("}")
    else:
        raise TypeError(f"cannot canonicalize {type(value).__name__}")
