"""CSV ingestion for grouped income data."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from importlib import resources
import math
from pathlib import Path

from .errors import DataError
from .sample import Sample

DEFAULT_GROUP = "all"


def fixture_path() -> Path:
    """Bundled synthetic income file: columns ``quarter`` and ``income``, 4 x 50 rows."""
    return Path(str(resources.files("sgini") / "data" / "fixture.csv"))


@dataclass
class DataFile:
    path: str
    value_column: str
    group_column: str | None
    groups: dict[str, Sample] = field(default_factory=dict)

    def counts(self) -> dict[str, int]:
        return {k: s.n for k, s in self.groups.items()}


def _parse_value(text: str, line: int, column: str) -> float:
    t = text.strip()
    if not t:
        raise DataError(f"line {line}: missing value in column {column!r}")
    try:
        v = float(t)
    except ValueError:
        raise DataError(f"line {line}: malformed number {text!r} in column {column!r}") from None
    if not math.isfinite(v):
        raise DataError(f"line {line}: non-finite value {text!r} in column {column!r}")
    if v <= 0:
        raise DataError(f"line {line}: non-positive value {text!r} in column {column!r}")
    return v


def load_csv(path, value_column: str | None = None, group_column: str | None = None) -> DataFile:
    """Read a headered UTF-8 CSV into one :class:`Sample` per group.

    Without ``group_column`` every row lands in the group ``"all"``. When
    ``value_column`` is omitted the file must have a single column or a
    column named ``value``. Line numbers in errors count the header as 1.
    """
    path = str(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file, expected a header row") from None
        if value_column is None:
            if len(header) == 1:
                value_column = header[0]
            elif "value" in header:
                value_column = "value"
            else:
                raise DataError(f"{path}: choose a value column from {header}")
        for col in filter(None, (value_column, group_column)):
            if col not in header:
                raise DataError(f"{path}: missing column {col!r}; header is {header}")
        vi = header.index(value_column)
        gi = header.index(group_column) if group_column else None
        grouped: dict[str, list[float]] = {}
        for line, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(f"line {line}: expected {len(header)} fields, got {len(row)}")
            label = DEFAULT_GROUP if gi is None else row[gi].strip()
            if not label:
                raise DataError(f"line {line}: missing group label in column {group_column!r}")
            grouped.setdefault(label, []).append(_parse_value(row[vi], line, value_column))
    if not grouped:
        raise DataError(f"{path}: no data rows")
    small = [k for k, v in grouped.items() if len(v) < 2]
    if small:
        raise DataError(f"{path}: groups with fewer than 2 rows: {small}")
    return DataFile(path=path, value_column=value_column, group_column=group_column,
                    groups={k: Sample(v) for k, v in grouped.items()})
