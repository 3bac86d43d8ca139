"""Deterministic JSON: complex as [re, im], rationals as [num, den], sorted keys."""
from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Any

import numpy as np


def to_plain(obj: Any) -> Any:
    """Recursively convert numpy, complex and Fraction values to JSON-ready data."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return [obj.numerator, obj.denominator]
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if hasattr(obj, "to_json"):
        return to_plain(obj.to_json())
    return obj


def _render(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_render(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_render(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _render(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return json.dumps(str(obj))
        text = "%.17g" % (obj + 0.0)  # folds -0.0 into 0.0
        if not any(ch in text for ch in ".en"):
            text += ".0"
        return text
    return json.dumps(obj)


def dumps(obj: Any, indent: int = 2) -> str:
    return _render(to_plain(obj), indent, 0) + "\n"


def parse_complex(value: Any) -> complex:
    """Accept a number, a "1+2j" style string or an [re, im] pair."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex pair must have 2 entries, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", "").replace("i", "j"))
    return complex(value)
