"""Export of sampled surfaces as CSV, PGM and OBJ, plus a CSV reader.

Formats
-------
csv
    Header ``x,y,z`` then one row per node, ``y`` outer and ``x`` inner,
    every number written with 17 significant digits so values round-trip.
pgm
    Binary ``P5`` with maxval 65535 (two bytes per pixel, big endian).
    Values are min-max normalized and rounded; a constant field maps to 0.
    Image row ``r`` holds grid row ``y = ys[r]``.
obj
    ``v x y z`` for every node (same order as csv) then two triangles per
    cell with 1-based indices, counterclockwise seen from ``+z``.
"""

from __future__ import annotations

import csv
import os

import numpy as np

from .errors import IoError, ShapeMismatch
from .field import SampledField

FORMATS = ("csv", "pgm", "obj")


def _num(v: float) -> str:
    return "%.17g" % v


def csv_bytes(f: SampledField) -> bytes:
    X, Y = f.mesh_grid()
    lines = ["x,y,z"]
    lines += [f"{_num(x)},{_num(y)},{_num(z)}" for x, y, z in zip(X.ravel(), Y.ravel(), f.values.ravel())]
    return ("\n".join(lines) + "\n").encode("ascii")


def pgm_bytes(f: SampledField) -> bytes:
    v = f.values
    lo, hi = float(v.min()), float(v.max())
    if hi > lo:
        pix = np.rint((v - lo) / (hi - lo) * 65535.0)
    else:
        pix = np.zeros_like(v)
    ny, nx = v.shape
    header = f"P5\n{nx} {ny}\n65535\n".encode("ascii")
    return header + pix.astype(">u2").tobytes()


def obj_bytes(f: SampledField) -> bytes:
    X, Y = f.mesh_grid()
    nx, ny = f.resolution
    lines = [f"v {_num(x)} {_num(y)} {_num(z)}" for x, y, z in zip(X.ravel(), Y.ravel(), f.values.ravel())]

    def idx(i, j):
        return j * nx + i + 1

    for j in range(ny - 1):
        for i in range(nx - 1):
            lines.append(f"f {idx(i, j)} {idx(i + 1, j)} {idx(i + 1, j + 1)}")
            lines.append(f"f {idx(i, j)} {idx(i + 1, j + 1)} {idx(i, j + 1)}")
    return ("\n".join(lines) + "\n").encode("ascii")


_WRITERS = {"csv": csv_bytes, "pgm": pgm_bytes, "obj": obj_bytes}


def export_bytes(f: SampledField, fmt: str) -> bytes:
    if fmt not in _WRITERS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    if f.values.size == 0:
        raise ShapeMismatch("cannot export an empty field")
    return _WRITERS[fmt](f)


def export_field(f: SampledField, fmt: str, path) -> None:
    """Write ``f`` to ``path`` in ``fmt`` (``csv``, ``pgm`` or ``obj``).

    Raises
    ------
    IoError
        If the file cannot be written.
    """
    data = export_bytes(f, fmt)
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise IoError(f"cannot write {os.fspath(path)!r}: {exc.strerror or exc}") from exc


def load_csv(path) -> SampledField:
    """Read a field written by :func:`export_field` (or any ``x,y,z`` grid in the same order)."""
    try:
        with open(path, newline="", encoding="ascii") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise IoError(f"cannot read {os.fspath(path)!r}: {exc}") from exc
    if not rows or [c.strip() for c in rows[0]] != ["x", "y", "z"]:
        raise IoError(f"{os.fspath(path)!r} lacks the 'x,y,z' header")
    try:
        data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise IoError(f"malformed number in {os.fspath(path)!r}: {exc}") from exc
    if data.ndim != 2 or data.shape[1] != 3:
        raise IoError(f"{os.fspath(path)!r} must have three columns")
    xs = np.unique(data[:, 0])
    ys = np.unique(data[:, 1])
    if len(xs) * len(ys) != len(data):
        raise IoError(f"{os.fspath(path)!r} is not a full tensor grid")
    X, Y = np.meshgrid(xs, ys)
    if not (np.array_equal(X.ravel(), data[:, 0]) and np.array_equal(Y.ravel(), data[:, 1])):
        raise IoError(f"{os.fspath(path)!r} rows are not in y-major order")
    return SampledField(xs, ys, data[:, 2].reshape(len(ys), len(xs)))
