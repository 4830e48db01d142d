"""CSV sample files and report serialization.

Sample files are two numeric columns, comma-separated, one observation
per row.  A single leading header row is tolerated (detected by a
non-numeric first cell) and blank lines are ignored.  Writing uses 17
significant digits, which round-trips IEEE doubles exactly, so
write -> read -> write is byte-stable.
"""

from __future__ import annotations

import csv
import io as _io
import json
from typing import IO, Union

from .errors import InputFormatError
from .sample import PairedSample

PathOrFile = Union[str, IO]


def read_paired_csv(source: PathOrFile) -> PairedSample:
    """Parse a two-column CSV into a PairedSample.

    Errors carry 1-based physical line numbers.  ``source`` is a path or
    a readable text file object.
    """
    if hasattr(source, "read"):
        return _parse(source)
    with open(source, "r", newline="") as fh:
        return _parse(fh)


def _parse(fh) -> PairedSample:
    xs: list[float] = []
    ys: list[float] = []
    header_allowed = True
    reader = csv.reader(fh)
    for row in reader:
        line = reader.line_num
        cells = [c.strip() for c in row]
        if not any(cells):
            continue
        if len(cells) != 2:
            raise InputFormatError(f"line {line}: expected 2 columns, got {len(cells)}")
        try:
            x = float(cells[0])
            y = float(cells[1])
        except ValueError:
            bad = cells[0] if not _is_number(cells[0]) else cells[1]
            if header_allowed:
                header_allowed = False
                continue
            raise InputFormatError(f"line {line}: non-numeric value {bad!r}") from None
        header_allowed = False
        xs.append(x)
        ys.append(y)
    if len(xs) < 2:
        raise InputFormatError(f"need at least 2 data rows, got {len(xs)}")
    return PairedSample(xs, ys)


def _is_number(token: str) -> bool:
    try:
        float(token)
        return True
    except ValueError:
        return False


def write_paired_csv(sample: PairedSample, dest: PathOrFile) -> None:
    """Write a PairedSample as CSV with an x,y header, 17 significant digits."""
    if hasattr(dest, "write"):
        _write(sample, dest)
    else:
        with open(dest, "w", newline="") as fh:
            _write(sample, fh)


def _write(sample: PairedSample, fh) -> None:
    fh.write("x,y\n")
    for x, y in zip(sample.xs, sample.ys):
        fh.write(f"{x:.17g},{y:.17g}\n")


def report_to_json(report: dict) -> str:
    """Serialize a report dict with stable key order (insertion order)."""
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def report_to_csv(report: dict) -> str:
    """Flatten a report to rows of section,name,value[,threshold,pass].

    Nested config values (law echoes, lists) are serialized as compact
    JSON inside the cell; the csv module quotes them as needed.
    """
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["section", "name", "value", "threshold", "pass"])

    def cell(v) -> str:
        if isinstance(v, (dict, list)):
            return json.dumps(v, separators=(",", ":"))
        if v is None:
            return ""
        return repr(v) if isinstance(v, float) else str(v)

    writer.writerow(["meta", "command", cell(report.get("command")), "", ""])
    writer.writerow(["meta", "seed", cell(report.get("seed")), "", ""])
    for key, value in report.get("config", {}).items():
        writer.writerow(["config", key, cell(value), "", ""])
    for key, value in report.get("results", {}).items():
        writer.writerow(["result", key, cell(value), "", ""])
    for check in report.get("checks", []):
        writer.writerow(["check", check["name"], cell(check["value"]),
                         cell(check["threshold"]),
                         "pass" if check["pass"] else "fail"])
    return buf.getvalue()
