"""Byte-stable CSV and JSON-lines output, and the matching parsers.

Floats are written with 17 significant digits so that reruns are
byte-identical and values round-trip exactly.  Both formats start with the
resolved run configuration: CSV as a ``# config: {json}`` comment line, JSON
lines as a ``config`` field on every record.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Any, Iterable, Sequence

CONFIG_PREFIX = "# config: "


def format_float(x: float) -> str:
    return format(x, ".17g")


def _plain(value: Any) -> Any:
    """Reduce a value to JSON-compatible primitives (floats stay floats)."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else str(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item"):  # numpy scalars
        return _plain(value.item())
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(value: Any) -> str:
    """Compact JSON with keys in insertion order and %.17g floats."""
    value = _plain(value)
    if isinstance(value, float):
        text = format_float(value)
        return text if any(ch in text for ch in ".en") else text + ".0"
    if isinstance(value, dict):
        return "{" + ",".join(f"{json.dumps(k)}:{dumps(v)}" for k, v in value.items()) + "}"
    if isinstance(value, list):
        return "[" + ",".join(dumps(v) for v in value) + "]"
    return json.dumps(value)


def csv_cell(value: Any) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, list):
        return " ".join(csv_cell(v) for v in value)
    text = str(value)
    if any(ch in text for ch in ",\n\r\""):
        raise ValueError(f"CSV cell {text!r} would need quoting")
    return text


def render_csv(columns: Sequence[str], rows: Iterable[dict], config: dict) -> str:
    lines = [CONFIG_PREFIX + dumps(config), ",".join(columns)]
    lines += [",".join(csv_cell(row.get(col)) for col in columns) for row in rows]
    return "\n".join(lines) + "\n"


def render_jsonl(rows: Iterable[dict], config: dict) -> str:
    return "".join(dumps({**row, "config": config}) + "\n" for row in rows)


def parse_csv(text: str) -> tuple[dict, list[str], list[dict[str, str]]]:
    """Inverse of render_csv: (config, columns, rows of raw strings)."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0].startswith(CONFIG_PREFIX):
        raise ValueError("missing config comment line")
    config = json.loads(lines[0][len(CONFIG_PREFIX) :])
    columns = lines[1].split(",")
    rows = []
    for ln in lines[2:]:
        cells = ln.split(",")
        if len(cells) != len(columns):
            raise ValueError(f"row has {len(cells)} cells, header has {len(columns)}")
        rows.append(dict(zip(columns, cells)))
    return config, columns, rows


def parse_jsonl(text: str) -> list[dict]:
    return [json.loads(ln) for ln in text.splitlines() if ln.strip()]
