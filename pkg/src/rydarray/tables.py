"""Tabular scan results and their CSV round-trip.

The on-disk format is plain CSV with a ``#``-prefixed metadata preamble:

    # key = value
    col_a,col_b
    1.0,2.5
    ...

Floats are written with shortest round-trip repr, so read(write(t)) == t
bit-exactly (including inf sentinels).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError


@dataclass
class ScanTable:
    """A rectangular numeric table with named columns and metadata."""

    columns: list
    rows: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.size == 0:
            self.rows = self.rows.reshape(0, len(self.columns))
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.columns):
            raise ValueError("rows must be rectangular with one entry per column")

    def column(self, name: str) -> np.ndarray:
        try:
            return self.rows[:, self.columns.index(name)]
        except ValueError:
            raise KeyError(f"no column named {name!r}") from None

    def __len__(self) -> int:
        return self.rows.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScanTable):
            return NotImplemented
        return (self.columns == other.columns
                and np.array_equal(self.rows, other.rows, equal_nan=True)
                and self.metadata == other.metadata)


def _format(x: float) -> str:
    return repr(float(x))


def write_table(table: ScanTable, destination) -> None:
    """Write a table as CSV with a metadata preamble."""
    lines = [f"# {k} = {v}" for k, v in table.metadata.items()]
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(_format(x) for x in row))
    text = "\n".join(lines) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        with open(destination, "w") as fh:
            fh.write(text)


def read_table(source) -> ScanTable:
    """Parse a CSV table written by write_table.

    Raises ParseError with the 1-based offending line number on malformed
    input (missing header, ragged rows, non-numeric cells).
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source) as fh:
            text = fh.read()

    metadata: dict = {}
    columns = None
    rows = []
    header_line = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if columns is not None:
                raise ParseError("metadata line after header", lineno)
            body = line[1:].strip()
            if "=" not in body:
                raise ParseError("metadata line without '='", lineno)
            key, _, value = body.partition("=")
            metadata[key.strip()] = value.strip()
            continue
        if columns is None:
            fields = [f.strip() for f in line.split(",")]
            if any(_is_number(f) for f in fields):
                raise ParseError("expected a header row of column names", lineno)
            columns = fields
            header_line = lineno
            continue
        cells = line.split(",")
        if len(cells) != len(columns):
            raise ParseError(f"expected {len(columns)} cells, got {len(cells)}", lineno)
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise ParseError("non-numeric cell", lineno) from None
    if columns is None:
        raise ParseError("missing header row", 1)
    del header_line
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(columns)))
    return ScanTable(columns=columns, rows=data, metadata=metadata)


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True
