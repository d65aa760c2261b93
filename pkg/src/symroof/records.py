"""Output records written by the command-line interface."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

SCHEMA = "symroof/1"


def _num(x):
    if x is None:
        return None
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return None if not math.isfinite(x) else float(format(x, ".17g"))
    if isinstance(x, np.ndarray):
        return [_num(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _num(v) for k, v in x.items()}
    return x


@dataclass
class OutputRecord:
    """Named numeric columns of equal length plus free-form metadata."""

    command: str
    columns: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    schema: str = SCHEMA

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"columns have inconsistent lengths {sorted(lengths)}")
        self.metadata.setdefault("timestamp", datetime.now(timezone.utc).isoformat(timespec="seconds"))

    def to_json(self) -> str:
        body = {
            "schema": self.schema,
            "command": self.command,
            "metadata": _num(self.metadata),
            "columns": {k: _num(np.asarray(v)) for k, v in self.columns.items()},
        }
        return json.dumps(body, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema: {self.schema}\n")
        buf.write(f"# command: {self.command}\n")
        for k, v in self.metadata.items():
            buf.write(f"# {k}: {json.dumps(_num(v))}\n")
        w = csv.writer(buf, lineterminator="\n")
        names = list(self.columns)
        w.writerow(names)
        rows = zip(*(self.columns[n] for n in names))
        for row in rows:
            w.writerow(["nan" if v is None else format(float(v), ".17g") for v in row])
        return buf.getvalue()

    def write(self, path: str, fmt: str | None = None) -> None:
        fmt = fmt or ("csv" if str(path).endswith(".csv") else "json")
        text = self.to_csv() if fmt == "csv" else self.to_json()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def read_csv(path: str):
    """Read a CSV record back as (metadata, columns)."""
    meta, lines = {}, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition(": ")
                meta[key] = val
            else:
                lines.append(line)
    rows = list(csv.reader(lines))
    names = rows[0]
    data = np.array([[float(v) for v in r] for r in rows[1:]]).reshape(-1, len(names))
    return meta, {n: data[:, i] for i, n in enumerate(names)}
