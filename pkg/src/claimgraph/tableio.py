"""CSV reading and writing with deterministic formatting.

All output tables are UTF-8, carry a header row, use RFC-style quoting, and
encode missing values as empty fields. Floats are written with repr-shortest
formatting so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import io
from typing import Iterable, Sequence


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence],
              comment: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])


def write_csv_dicts(path: str, header: Sequence[str], rows: Iterable[dict],
                    comment: str | None = None) -> None:
    write_csv(path, header, ([row.get(col) for col in header] for row in rows),
              comment=comment)


def read_csv(path: str) -> tuple[list[str], list[list[str]]]:
    """Read a CSV written by this module; leading '#' comment lines skipped."""
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    reader = csv.reader(io.StringIO("\n".join(lines)))
    rows = [row for row in reader if row]
    if not rows:
        return [], []
    return rows[0], rows[1:]


def read_csv_dicts(path: str) -> list[dict[str, str]]:
    header, rows = read_csv(path)
    return [dict(zip(header, row)) for row in rows]


def parse_float(cell: str) -> float | None:
    return None if cell == "" else float(cell)


def parse_int(cell: str) -> int | None:
    return None if cell == "" else int(cell)
