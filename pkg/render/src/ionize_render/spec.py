"""Figure specifications and the frozen CSV/JSON input contract.

A figure spec is a small JSON document:

    {
      "kind": "heatmap",
      "inputs": {"dynamics": "out/dynamics.csv",
                 "threshold": "out/threshold.csv"},
      "output": "fig1.png",
      "options": {"level": 0, "x_range": [1.0, 2.0], ...}
    }

Every CSV input must sit next to its JSON sidecar (same stem) carrying the
schema version and column list written by the sweep runner; mismatches are
rejected with an error naming the expected version.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

EXPECTED_SCHEMA_VERSION = 1


class RenderError(ValueError):
    """Invalid figure spec or unreadable input."""


class SchemaError(RenderError):
    """Input does not match the frozen CSV schema contract."""


@dataclass(frozen=True)
class Table:
    """One loaded CSV input: named float columns plus its sidecar."""

    columns: dict
    sidecar: dict

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def __len__(self) -> int:
        first = next(iter(self.columns.values()))
        return len(first)


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: dict
    output: str
    options: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path) -> "FigureSpec":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise RenderError(f"cannot read spec: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise RenderError(f"spec is not valid JSON: {exc}") from exc
        for key in ("kind", "inputs", "output"):
            if key not in raw:
                raise RenderError(f"spec is missing {key!r}")
        if not isinstance(raw["inputs"], dict):
            raise RenderError("inputs must map roles to file paths")
        return cls(kind=raw["kind"], inputs=dict(raw["inputs"]),
                   output=raw["output"], options=dict(raw.get("options", {})))

    def table(self, role: str) -> Table:
        if role not in self.inputs:
            raise RenderError(f"spec has no {role!r} input")
        return load_table(self.inputs[role])


def load_table(path) -> Table:
    path = Path(path)
    if not path.exists():
        raise RenderError(f"input {path} does not exist")
    sidecar_path = path.with_suffix(".json")
    if not sidecar_path.exists():
        raise SchemaError(
            f"missing sidecar {sidecar_path}; inputs must carry "
            f"schema_version {EXPECTED_SCHEMA_VERSION}")
    with open(sidecar_path) as fh:
        sidecar = json.load(fh)
    version = sidecar.get("schema_version")
    if version != EXPECTED_SCHEMA_VERSION:
        raise SchemaError(
            f"{path}: expected schema_version {EXPECTED_SCHEMA_VERSION}, "
            f"got {version!r}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise RenderError(f"input {path} is empty")
    header = rows[0]
    if sidecar.get("columns") != header:
        raise SchemaError(
            f"{path}: header {header} does not match sidecar columns "
            f"{sidecar.get('columns')}")
    data = {name: [] for name in header}
    for row in rows[1:]:
        for name, value in zip(header, row):
            data[name].append(float(value) if value != "" else np.nan)
    columns = {name: np.array(values) for name, values in data.items()}
    return Table(columns=columns, sidecar=sidecar)
