"""Validation of the two documented CSV schemas.

Series CSVs start with a `t` column followed by named norm columns; probe
report CSVs carry the fixed eight-column header.  Rows are never dropped:
a malformed cell is an error naming its column.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

PROBE_COLUMNS = ["eps", "s", "sigma", "quantity", "value",
                 "predicted_exponent", "fitted_slope", "r2"]
PROBE_TEXT_COLUMNS = {"quantity"}


class SchemaError(ValueError):
    """Input CSV does not match the documented schema; names the offending column."""


@dataclass
class ProbeTable:
    rows: list[dict]

    def quantities(self) -> list[str]:
        seen = []
        for row in self.rows:
            if row["quantity"] not in seen:
                seen.append(row["quantity"])
        return seen

    def select(self, quantity: str) -> list[dict]:
        return [row for row in self.rows if row["quantity"] == quantity]


@dataclass
class SeriesTable:
    t: np.ndarray
    columns: dict[str, np.ndarray]


def read_probe_csv(path) -> ProbeTable:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header {PROBE_COLUMNS}")
        for col in PROBE_COLUMNS:
            if col not in header:
                raise SchemaError(f"{path}: missing required column {col!r}")
        extra = [col for col in header if col not in PROBE_COLUMNS]
        if extra:
            raise SchemaError(f"{path}: unexpected column {extra[0]!r}")
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            if len(raw) != len(header):
                raise SchemaError(f"{path}:{lineno}: expected {len(header)} cells, got {len(raw)}")
            row = {}
            for col, cell in zip(header, raw):
                if col in PROBE_TEXT_COLUMNS:
                    row[col] = cell
                else:
                    try:
                        row[col] = float(cell)
                    except ValueError:
                        raise SchemaError(f"{path}:{lineno}: column {col!r} is not numeric: {cell!r}")
            rows.append(row)
    return ProbeTable(rows)


def read_series_csv(path) -> SeriesTable:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected a 't,...' header")
        if not header or header[0] != "t":
            raise SchemaError(f"{path}: first column must be 't', got {header[:1] or 'nothing'}")
        if len(set(header)) != len(header):
            dup = next(col for col in header if header.count(col) > 1)
            raise SchemaError(f"{path}: duplicated column {dup!r}")
        data: list[list[float]] = []
        for lineno, raw in enumerate(reader, start=2):
            if len(raw) != len(header):
                raise SchemaError(f"{path}:{lineno}: expected {len(header)} cells, got {len(raw)}")
            parsed = []
            for col, cell in zip(header, raw):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise SchemaError(f"{path}:{lineno}: column {col!r} is not numeric: {cell!r}")
            data.append(parsed)
    arr = np.asarray(data, dtype=np.float64).reshape(len(data), len(header))
    return SeriesTable(arr[:, 0], {col: arr[:, j + 1] for j, col in enumerate(header[1:])})
