"""Time-stamped series of named norm values, with deterministic CSV I/O.

All floats are written with `repr`, which round-trips exactly and keeps
re-runs byte-identical.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


def fmt(x) -> str:
    return repr(float(x))


@dataclass
class NormSeries:
    """Columns of per-time values for one run; `times` is the shared axis."""

    times: np.ndarray
    values: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        for name, col in self.values.items():
            col = np.asarray(col, dtype=np.float64)
            if col.shape != self.times.shape:
                raise ValueError(f"column {name!r} length {col.size} != {self.times.size}")
            self.values[name] = col

    def column(self, name: str) -> np.ndarray:
        return self.values[name]

    def sup(self, name: str) -> float:
        return float(np.max(self.values[name]))

    def names(self) -> list[str]:
        return list(self.values)

    def to_csv(self, path, lead: tuple[str, ...] = ()) -> None:
        """Write `t,<columns...>`; `lead` columns come first, rest in insertion order."""
        names = [n for n in lead if n in self.values]
        names += [n for n in self.values if n not in names]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + names)
            for i, t in enumerate(self.times):
                writer.writerow([fmt(t)] + [fmt(self.values[n][i]) for n in names])


def series_from_csv(path) -> NormSeries:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "t":
            raise ValueError(f"series CSV must start with a 't' column, got {header}")
        rows = [[float(x) for x in row] for row in reader]
    data = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(header))
    return NormSeries(data[:, 0], {name: data[:, j + 1] for j, name in enumerate(header[1:])})
