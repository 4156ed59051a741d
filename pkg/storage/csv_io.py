"""
Diagnostics CSV

One header row, one row per record, 17 significant digits so values
parse back exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable

from diagnostics import COLUMNS, DiagnosticsRecord, DiagnosticsSeries

from .errors import DiagnosticsFormatError

CSV_VERSION = 1
HEADER = list(COLUMNS)


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def emit_diagnostics(series: DiagnosticsSeries | Iterable[DiagnosticsRecord], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        for record in series:
            writer.writerow([_fmt(getattr(record, name)) for name in HEADER])
    return path


def read_diagnostics(path: str | Path) -> DiagnosticsSeries:
    """
    Raises:
        DiagnosticsFormatError: If the header is not the version-1 header
            or a row is malformed
    """
    path = Path(path)
    series = DiagnosticsSeries()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != HEADER:
            raise DiagnosticsFormatError(f"unknown diagnostics header {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(HEADER):
                raise DiagnosticsFormatError(f"line {lineno}: expected {len(HEADER)} fields")
            try:
                values = [float(v) for v in row]
            except ValueError as exc:
                raise DiagnosticsFormatError(f"line {lineno}: {exc}") from exc
            series.append(DiagnosticsRecord(**dict(zip(HEADER, values))))
    return series


def emit_curves(columns: list[str], rows: Iterable[Iterable[float]], path: str | Path) -> Path:
    """Numeric table with the given header, e.g. the (delta, tau, error) study curves."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            values = list(row)
            if len(values) != len(columns):
                raise DiagnosticsFormatError(f"row {values!r} does not match {columns!r}")
            writer.writerow([_fmt(v) for v in values])
    return path
