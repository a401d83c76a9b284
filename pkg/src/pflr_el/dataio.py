"""Dataset CSV format: header ``y,z1,...,zp,x@<t0>,...,x@<t_{m-1}>``, one row per observation."""
from __future__ import annotations

import csv
import io

import numpy as np

from .bspline import FunctionalSample
from .exceptions import DataFormatError, PFLRError
from .numerics import Grid
from .pflr import Dataset


def _fmt(v: float) -> str:
    # shortest repr that round-trips, at most 17 significant digits
    return repr(float(v))


def format_dataset(data: Dataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["y"] + [f"z{j + 1}" for j in range(data.p)]
    header += [f"x@{_fmt(t)}" for t in data.X.grid.points]
    w.writerow(header)
    for i in range(data.n):
        w.writerow([_fmt(data.Y[i])] + [_fmt(v) for v in data.Z[i]]
                   + [_fmt(v) for v in data.X.curves[i]])
    return buf.getvalue()


def write_dataset(data: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_dataset(data))


def parse_dataset(text: str) -> Dataset:
    """Parse the CSV produced by :func:`format_dataset`.

    Raises
    ------
    DataFormatError
        With the offending 1-based line number.
    """
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise DataFormatError("empty file", 1)
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "y":
        raise DataFormatError("first column must be 'y'", 1)
    p = 0
    while 1 + p < len(header) and header[1 + p] == f"z{p + 1}":
        p += 1
    if p == 0:
        raise DataFormatError("expected at least one covariate column 'z1'", 1)
    xcols = header[1 + p:]
    if not xcols or not all(c.startswith("x@") for c in xcols):
        raise DataFormatError("expected curve columns named 'x@<t>' after the z columns", 1)
    try:
        grid = Grid(np.array([float(c[2:]) for c in xcols]))
    except (ValueError, PFLRError) as exc:
        raise DataFormatError(f"invalid grid in header: {exc}", 1) from None

    width = len(header)
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != width:
            raise DataFormatError(f"expected {width} fields, found {len(row)}", lineno)
        try:
            vals = [float(v) for v in row]
        except ValueError as exc:
            raise DataFormatError(str(exc), lineno) from None
        if not np.all(np.isfinite(vals)):
            raise DataFormatError("non-finite value", lineno)
        values.append(vals)
    if len(values) <= p:
        raise DataFormatError(f"need more than {p} observations, found {len(values)}")
    M = np.array(values)
    return Dataset(M[:, 1:1 + p], M[:, 0], FunctionalSample(grid, M[:, 1 + p:]))


def read_dataset(path) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        return parse_dataset(fh.read())
