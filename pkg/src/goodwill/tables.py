"""Delimited text formats read and written by the package.

Every number is written with 12 significant digits so that emitting a parsed
file reproduces it byte for byte.
"""

from __future__ import annotations

import csv
import io
import os
from pathlib import Path

from .errors import FormatError

TRAJECTORY_HEADER = ("age_years", "tree_value")
LEDGER_HEADER = ("time_years", "stream", "amount")
CURVE_HEADER = ("rotation_years", "rate_per_year", "n_thinnings", "plan_descriptor")
DISTRIBUTION_HEADER = ("age_years", "mass")
SUMMARY_HEADER = ("scenario", "u", "ts_rotation", "ts_rate", "re_rotation", "re_rate", "ratio")

LEDGER_STREAMS = ("I", "N", "A")


def fmt(x) -> str:
    """Render a number with 12 significant digits."""
    if isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".12g")


def _text(source) -> str:
    # a non-empty str without a newline is a path, any other str is table text
    if hasattr(source, "read"):
        return source.read()
    if isinstance(source, os.PathLike) or (source and "\n" not in source):
        return Path(source).read_text(encoding="utf-8")
    return source


def _rows(source, header):
    reader = csv.reader(io.StringIO(_text(source)))
    try:
        first = next(reader)
    except StopIteration:
        raise FormatError("empty table") from None
    if tuple(c.strip() for c in first) != header:
        raise FormatError(f"expected header {','.join(header)!r}, got {','.join(first)!r}")
    for i, row in enumerate(reader):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise FormatError(f"expected {len(header)} columns, got {len(row)}", row=i)
        yield i, [c.strip() for c in row]


def _float(text, row, name):
    try:
        return float(text)
    except ValueError:
        raise FormatError(f"cannot parse {name} {text!r}", row=row, field=name) from None


def render(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def write(path, text):
    Path(path).write_text(text, encoding="utf-8")


def read_trajectory_table(source):
    """Parse an ``age_years,tree_value`` table into ``(age, value)`` rows."""
    rows = []
    prev = None
    for i, (a, v) in _rows(source, TRAJECTORY_HEADER):
        age = _float(a, i, "age_years")
        value = _float(v, i, "tree_value")
        if value < 0:
            raise FormatError(f"negative tree_value {value!r}", row=i, field="tree_value")
        if prev is not None and not age > prev:
            raise FormatError("ages must be strictly increasing", row=i, field="age_years")
        prev = age
        rows.append((age, value))
    if len(rows) < 2:
        raise FormatError(f"need at least 2 rows, got {len(rows)}", row=len(rows))
    return rows


def render_trajectory(ages, values) -> str:
    return render(TRAJECTORY_HEADER, zip(ages, values))


def read_ledger(source):
    out = []
    for i, (t, s, a) in _rows(source, LEDGER_HEADER):
        if s not in LEDGER_STREAMS:
            raise FormatError(f"unknown stream {s!r}", row=i, field="stream")
        out.append((_float(t, i, "time_years"), s, _float(a, i, "amount")))
    return out


def render_ledger(entries) -> str:
    return render(LEDGER_HEADER, entries)


def read_curve(source):
    out = []
    for i, (r, rate, n, desc) in _rows(source, CURVE_HEADER):
        try:
            count = int(n)
        except ValueError:
            raise FormatError(f"cannot parse n_thinnings {n!r}", row=i,
                              field="n_thinnings") from None
        out.append((_float(r, i, "rotation_years"), _float(rate, i, "rate_per_year"),
                    count, desc))
    return out


def render_curve(rows) -> str:
    return render(CURVE_HEADER, rows)


def read_distribution(source):
    out = []
    for i, (a, m) in _rows(source, DISTRIBUTION_HEADER):
        out.append((_float(a, i, "age_years"), _float(m, i, "mass")))
    if not out:
        raise FormatError("distribution has no rows")
    return out


def render_distribution(atoms) -> str:
    return render(DISTRIBUTION_HEADER, atoms)


def read_summary(source):
    out = []
    for i, row in _rows(source, SUMMARY_HEADER):
        out.append((row[0], *(_float(x, i, name) for x, name in zip(row[1:], SUMMARY_HEADER[1:]))))
    return out


def render_summary(rows) -> str:
    return render(SUMMARY_HEADER, rows)
