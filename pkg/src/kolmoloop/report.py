"""Report writing: CSV and JSON with reproducibility metadata.

CSV output is RFC-4180 style with a mandatory header row; run metadata goes
into leading `#` comment lines.  JSON output is a single object
{"schema_version": 1, "meta": {...}, "rows": [...]}.  Rationals are
rendered as "num/den" strings and doubles in 17-significant-digit
round-trip form, so identical configurations produce byte-identical output
(modulo the suppressible timestamp).
"""

from __future__ import annotations

import csv
import datetime
import io
import json
import sys
from fractions import Fraction

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "format_fraction",
    "format_double",
    "format_cell",
    "build_meta",
    "render_csv",
    "render_json",
    "write_text",
]


def format_fraction(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def format_double(value: float) -> str:
    return format(float(value), ".17g")


def format_cell(value) -> str:
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_double(value)
    return str(value)


def build_meta(subcommand: str, params: dict, timestamp: bool = True) -> dict:
    from . import __version__

    meta = {"tool": "kolmoloop", "version": __version__, "subcommand": subcommand}
    if timestamp:
        meta["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    for key in sorted(params):
        meta[key] = params[key]
    return meta


def render_csv(meta: dict, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def render_json(meta: dict, header: list[str], rows: list[list]) -> str:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "meta": meta,
        "rows": [
            {name: _jsonable(v) for name, v in zip(header, row)} for row in rows
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def _jsonable(value):
    if isinstance(value, Fraction):
        return format_fraction(value)
    if isinstance(value, float):
        return format_double(value)
    return value


def write_text(out: str, text: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
