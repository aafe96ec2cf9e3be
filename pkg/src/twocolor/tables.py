"""Deterministic tabular output: labelled sweep results to CSV/JSON.

CSV dialect: comma separated, '.' decimal, floats at 17 significant
digits (round-trip exact for doubles), '#'-prefixed metadata header
lines.  No wall-clock or environment data is written, so identical
inputs give byte-identical files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCHEMA = "twocolor.table.v1"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if value is None:
        return "nan"
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        return f"{v:.17g}"
    return str(value)


def _jsonable(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        v = float(value)
        return None if math.isnan(v) else v
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, np.bool_):
        return bool(value)
    return value


@dataclass
class SweepTable:
    """Labelled results of a parameter sweep (theta, gamma or p)."""

    name: str
    columns: list[str]
    rows: list[list] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def append(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError("row length does not match columns")
        self.rows.append(list(values))

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.asarray([
            (math.nan if r[i] is None else r[i]) for r in self.rows
        ])

    def header_lines(self) -> list[str]:
        lines = [f"# twocolor table: {self.name}", f"# schema: {SCHEMA}"]
        for key in sorted(self.metadata):
            lines.append(f"# {key}: {_fmt(self.metadata[key])}")
        return lines

    def to_csv(self, path) -> Path:
        path = Path(path)
        out = self.header_lines()
        out.append(",".join(self.columns))
        for row in self.rows:
            out.append(",".join(_fmt(v) for v in row))
        path.write_text("\n".join(out) + "\n", encoding="utf-8")
        return path

    def to_json(self, path) -> Path:
        path = Path(path)
        doc = {
            "schema": SCHEMA,
            "name": self.name,
            "metadata": {k: _jsonable(v) for k, v in sorted(self.metadata.items())},
            "columns": list(self.columns),
            "rows": [[_jsonable(v) for v in row] for row in self.rows],
        }
        path.write_text(json.dumps(doc, indent=1, sort_keys=False) + "\n", encoding="utf-8")
        return path

    def write(self, path, fmt: str) -> Path:
        if fmt == "csv":
            return self.to_csv(Path(path).with_suffix(".csv"))
        if fmt == "json":
            return self.to_json(Path(path).with_suffix(".json"))
        raise ValueError(f"unknown output format {fmt!r}")
