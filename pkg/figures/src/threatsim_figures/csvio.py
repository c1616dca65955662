"""Loading and validation for threatsim CSV files.

Files carry one leading ``#`` comment line, a header row, and
comma-separated values; numeric parsing falls back to strings for label
columns (strategy tags, classifications, faces).
"""

from __future__ import annotations

import csv


class InputError(ValueError):
    """A CSV input is missing, empty, or malformed."""


class Table:
    """Column-oriented view of one CSV file."""

    def __init__(self, columns: list[str], rows: list[list]):
        self.columns = columns
        self.rows = rows

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str):
        if name not in self.columns:
            raise InputError(f"missing column {name!r}; have {self.columns}")
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def columns_matching(self, prefix: str) -> list[str]:
        return [c for c in self.columns if c.startswith(prefix)]


def _parse_cell(cell: str):
    try:
        return float(cell)
    except ValueError:
        return cell


def load_table(path: str) -> Table:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(ln for ln in fh if not ln.startswith("#"))
            header = next(reader, None)
            if header is None:
                raise InputError(f"{path}: no header row")
            rows = [[_parse_cell(c) for c in row] for row in reader if row]
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise InputError(f"{path}: no data rows")
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise InputError(f"{path}: row {i + 1} has {len(row)} cells, header has {len(header)}")
    return Table(header, rows)
