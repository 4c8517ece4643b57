"""Deterministic report serialization.

JSON output is produced by a small hand-rolled writer rather than
``json.dumps`` so the byte stream is fully pinned down: keys keep insertion
order, floats are always written in scientific notation with 17 significant
digits, and indentation is fixed.  The text renderer is the lossy
human-facing view, rounding to 6 significant digits.
"""

from __future__ import annotations

import json
import math

import numpy as np

SCHEMA = "movepoly-report/1"


def _normalize(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def _format_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"reports must contain finite numbers, got {value}")
    return format(value, ".16e")


def _write(value, indent: int, out: list):
    value = _normalize(value)
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if value is None:
        out.append("null")
    elif isinstance(value, bool):
        out.append("true" if value else "false")
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=True))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(_format_float(value))
    elif isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, item) in enumerate(value.items()):
            if not isinstance(key, str):
                raise TypeError(f"report keys must be strings, got {key!r}")
            out.append(f"{inner}{json.dumps(key, ensure_ascii=True)}: ")
            _write(item, indent + 1, out)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not value:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(value):
            out.append(inner)
            _write(item, indent + 1, out)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__} in a report")


def canonical_json(report: dict) -> str:
    """The pinned-down JSON text for a report, without a trailing newline."""
    out: list[str] = []
    _write(report, 0, out)
    return "".join(out)


def _format_scalar(value) -> str:
    value = _normalize(value)
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return format(value, ".6g")
    if isinstance(value, str):
        return value
    return str(value)


def _is_scalar(value) -> bool:
    value = _normalize(value)
    return value is None or isinstance(value, (bool, int, float, str))


def _render(value, indent: int, lines: list):
    value = _normalize(value)
    pad = "  " * indent
    if isinstance(value, dict):
        for key, item in value.items():
            item = _normalize(item)
            if _is_scalar(item):
                lines.append(f"{pad}{key}: {_format_scalar(item)}")
            elif isinstance(item, (list, tuple)) and all(
                    _is_scalar(v) for v in item):
                joined = ", ".join(_format_scalar(v) for v in item)
                lines.append(f"{pad}{key}: [{joined}]")
            else:
                lines.append(f"{pad}{key}:")
                _render(item, indent + 1, lines)
    elif isinstance(value, (list, tuple)):
        for item in value:
            item = _normalize(item)
            if _is_scalar(item):
                lines.append(f"{pad}- {_format_scalar(item)}")
            else:
                lines.append(f"{pad}-")
                _render(item, indent + 1, lines)
    else:
        lines.append(f"{pad}{_format_scalar(value)}")


def render_text(report: dict) -> str:
    """Human-readable rendering, rounded to 6 significant digits."""
    lines: list[str] = []
    _render(report, 0, lines)
    return "\n".join(lines)
