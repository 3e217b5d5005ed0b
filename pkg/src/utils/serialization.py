"""
Canonical output encoders: sorted-key JSON through orjson and CSV through the
csv module. Rationals are always written as "p/q" strings.
"""

import csv
import io
from fractions import Fraction
from typing import Any, Iterable, Tuple

import orjson
from pydantic import BaseModel

from src.core.rational import format_rational

JSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2


def _default(value: Any) -> Any:
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json", exclude_none=True)
    if isinstance(value, tuple):
        return list(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(payload: Any) -> str:
    """Deterministic JSON text; identical payloads give identical bytes."""
    if isinstance(payload, BaseModel):
        payload = payload.model_dump(mode="json", exclude_none=True)
    return orjson.dumps(payload, default=_default, option=JSON_OPTIONS).decode("utf-8")


def interval_set_csv(period: Fraction, intervals: Iterable[Tuple[Fraction, Fraction]]) -> str:
    """`period,P` header, then one `lo,hi` row per stored interval."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["period", format_rational(period)])
    writer.writerow(["lo", "hi"])
    for lo, hi in intervals:
        writer.writerow([format_rational(lo), format_rational(hi)])
    return buffer.getvalue()


def trace_csv(rows: Iterable[Tuple[Fraction, int, Any]]) -> str:
    """Rows of (t, runner, position); positions may be rationals or decimal strings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["t", "runner", "position"])
    for t, runner, position in rows:
        if isinstance(position, Fraction):
            position = format_rational(position)
        writer.writerow([format_rational(t), runner, position])
    return buffer.getvalue()


def dumps_line(payload: Any) -> str:
    """Single-line JSON for log entries."""
    return orjson.dumps(payload, default=_default, option=orjson.OPT_SORT_KEYS).decode("utf-8")
