"""Shared on-disk formats for fields and spectra.

Binary layout (little endian)::

    b"CYLF"  u32 version=1  u32 n_t  u32 n_x  f64 X  u8 kind
    n_t * n_x pairs of f64 (re, im), row-major in the array's own indexing

The CSV mirror has header ``row,col,re,im``.  All writers go through a
temporary file in the target directory and an atomic rename, so a failed
command never leaves a partial file behind.
"""

from __future__ import annotations

import csv
import io
import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .core import KIND_CLASSES, CylinderGrid, Kind

MAGIC = b"CYLF"
VERSION = 1
_HEADER = struct.Struct("<4sIIIdB")


class FormatError(ValueError):
    pass


def atomic_write(path, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def to_bytes(obj) -> bytes:
    g = obj.grid
    header = _HEADER.pack(MAGIC, VERSION, g.n_t, g.n_x, g.X, int(obj.kind))
    body = np.ascontiguousarray(obj.values, dtype="<c16").tobytes()
    return header + body


def from_bytes(data: bytes):
    if len(data) < _HEADER.size:
        raise FormatError("file too short for a CYLF header")
    magic, version, n_t, n_x, X, kind = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"unsupported version {version}")
    try:
        kind = Kind(kind)
    except ValueError:
        raise FormatError(f"unknown kind byte {kind}") from None
    expected = _HEADER.size + 16 * n_t * n_x
    if len(data) != expected:
        raise FormatError(f"expected {expected} bytes, found {len(data)}")
    grid = CylinderGrid(n_t, n_x, X)
    vals = np.frombuffer(data, dtype="<c16", offset=_HEADER.size).reshape(n_t, n_x)
    return KIND_CLASSES[kind](grid, vals)


def write_array(path, obj) -> None:
    atomic_write(path, to_bytes(obj))


def read_array(path):
    return from_bytes(Path(path).read_bytes())


def to_csv(obj) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "col", "re", "im"])
    for (r, c), z in np.ndenumerate(obj.values):
        w.writerow([r, c, repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


def write_csv(path, obj) -> None:
    atomic_write(path, to_csv(obj).encode())


def read_csv(path, grid: CylinderGrid, kind: Kind):
    vals = np.zeros(grid.shape, dtype=np.complex128)
    seen = np.zeros(grid.shape, dtype=bool)
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        if next(r, None) != ["row", "col", "re", "im"]:
            raise FormatError("CSV header must be row,col,re,im")
        for row in r:
            i, j = int(row[0]), int(row[1])
            vals[i, j] = complex(float(row[2]), float(row[3]))
            seen[i, j] = True
    if not seen.all():
        raise FormatError("CSV does not cover every grid entry")
    return KIND_CLASSES[kind](grid, vals)


def write_json(path, payload) -> None:
    atomic_write(path, (json.dumps(payload, indent=2) + "\n").encode())
