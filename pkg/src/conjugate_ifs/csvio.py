"""CSV read/write with 17 significant digits (lossless float round trip)."""

import csv
import io
import os

import numpy as np


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(dest, header, rows):
    """Write ``rows`` under ``header``. ``dest`` is a path, a file object,
    or ``None`` (return the text instead)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if dest is None:
        return text
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    else:
        dest.write(text)
    return text


def read_csv(src):
    """Return ``(header, array)`` from a path or a text string containing newlines."""
    if isinstance(src, str) and "\n" in src:
        lines = src.splitlines()
    else:
        with open(src) as fh:
            lines = fh.read().splitlines()
    rows = list(csv.reader(lines))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body], dtype=float).reshape(len(body), len(header))
    return header, data
