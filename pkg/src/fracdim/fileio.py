"""Field dumps and report files.

Field CSV
    ``# {json metadata}`` header line, then ``index,value`` (d = 1) or
    ``row,col,value`` (d = 2) rows.  Indices are grid indices running from
    ``-margin`` to ``n0 + margin - 1``.

Field raster (binary, little-endian throughout)
    4-byte magic ``FDRF``; int64 ``dim``; ``dim`` int64 values of ``n0``;
    int64 ``margin``; int64 ``meta_len`` followed by ``meta_len`` bytes of
    UTF-8 JSON metadata; then the float64 grid values in row-major (C) order.

Report CSV
    ``# {json config}`` header line, a column header, then one row per entry.
"""

from __future__ import annotations

import csv
import io
import json
import struct
from pathlib import Path

import numpy as np

from .covariance import GridSpec
from .errors import ConfigError

MAGIC = b"FDRF"


def _dumps(meta: dict) -> str:
    return json.dumps(meta, sort_keys=True, separators=(",", ":"))


def _num(x) -> str:
    return repr(float(x))


def field_to_csv(values: np.ndarray, grid: GridSpec, meta: dict) -> str:
    values = np.asarray(values, dtype=float)
    buf = io.StringIO()
    buf.write("# " + _dumps(meta) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    m = grid.margin
    if grid.dim == 1:
        w.writerow(["index", "value"])
        for k, v in enumerate(values):
            w.writerow([k - m, _num(v)])
    else:
        w.writerow(["row", "col", "value"])
        for r in range(values.shape[0]):
            for c in range(values.shape[1]):
                w.writerow([r - m, c - m, _num(values[r, c])])
    return buf.getvalue()


def field_to_raster(values: np.ndarray, grid: GridSpec, meta: dict) -> bytes:
    values = np.ascontiguousarray(values, dtype="<f8")
    blob = _dumps(meta).encode()
    head = MAGIC + struct.pack(f"<q{grid.dim}qqq", grid.dim, *grid.n0, grid.margin, len(blob))
    return head + blob + values.tobytes(order="C")


def write_field(path, values, grid: GridSpec, meta: dict, fmt: str = "csv") -> None:
    path = Path(path)
    if fmt == "csv":
        path.write_text(field_to_csv(values, grid, meta))
    elif fmt in ("raster", "bin", "binary"):
        path.write_bytes(field_to_raster(values, grid, meta))
    else:
        raise ConfigError(f"unknown field format {fmt!r}")


def _read_raster(data: bytes):
    off = len(MAGIC)
    (dim,) = struct.unpack_from("<q", data, off)
    if dim not in (1, 2):
        raise ConfigError(f"raster declares dimension {dim}")
    off += 8
    n0 = struct.unpack_from(f"<{dim}q", data, off)
    off += 8 * dim
    margin, meta_len = struct.unpack_from("<qq", data, off)
    off += 16
    meta = json.loads(data[off : off + meta_len].decode()) if meta_len else {}
    off += meta_len
    grid = GridSpec(tuple(n0), int(margin))
    values = np.frombuffer(data, dtype="<f8", offset=off).astype(float)
    if values.size != int(np.prod(grid.shape)):
        raise ConfigError(f"raster holds {values.size} values, grid needs {int(np.prod(grid.shape))}")
    return values.reshape(grid.shape), grid, meta


def _read_csv(text: str):
    meta = {}
    lines = text.splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            try:
                meta.update(json.loads(line[1:].strip()))
            except json.JSONDecodeError:
                pass
        elif line.strip():
            body.append(line)
    if not body:
        raise ConfigError("field file has no data rows")
    rows = list(csv.reader(body))
    header = [h.strip().lower() for h in rows[0]]
    if header == ["index", "value"]:
        idx = np.array([int(r[0]) for r in rows[1:]])
        vals = np.array([float(r[1]) for r in rows[1:]])
        order = np.argsort(idx, kind="stable")
        idx, vals = idx[order], vals[order]
        margin = int(-idx.min())
        n0 = int(idx.max()) + 1 - margin
        if not np.array_equal(idx, np.arange(-margin, n0 + margin)):
            raise ConfigError("1-D field indices are not a contiguous symmetric range")
        return vals, GridSpec((n0,), margin), meta
    if header == ["row", "col", "value"]:
        r = np.array([int(x[0]) for x in rows[1:]])
        c = np.array([int(x[1]) for x in rows[1:]])
        v = np.array([float(x[2]) for x in rows[1:]])
        margin = int(-min(r.min(), c.min()))
        if r.min() != c.min():
            raise ConfigError("2-D field margins differ between axes")
        n0 = (int(r.max()) + 1 - margin, int(c.max()) + 1 - margin)
        grid = GridSpec(n0, margin)
        out = np.full(grid.shape, np.nan)
        out[r + margin, c + margin] = v
        if np.isnan(out).any():
            raise ConfigError("2-D field has missing grid points")
        return out, grid, meta
    raise ConfigError(f"unrecognized field header {rows[0]!r}")


def read_field(path):
    """Return ``(values, grid, metadata)`` from a CSV or raster field file."""
    data = Path(path).read_bytes()
    if data[: len(MAGIC)] == MAGIC:
        return _read_raster(data)
    return _read_csv(data.decode())


def rows_to_csv(columns, rows, meta: dict) -> str:
    buf = io.StringIO()
    buf.write("# " + _dumps(meta) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow(["" if row[c] is None else _fmt(row[c]) for c in columns])
    return buf.getvalue()


def _fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")
