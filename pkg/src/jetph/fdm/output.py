"""CSV time series and flat binary snapshots.

Snapshot layout (little endian): the 8 bytes ``PHSNAP01``, four int64
values (n_snapshots, n_fields, n_x_nodes, n_y_nodes), n_snapshots float64
times, then the float64 field data in row-major order with shape
(n_snapshots, n_fields, n_x_nodes, n_y_nodes).
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ..errors import ConfigError

MAGIC = b"PHSNAP01"
SNAPSHOT_FIELDS = ("w", "psi", "phi", "p_w", "p_psi", "p_phi")


def format_float(v: float) -> str:
    return repr(float(v))


def write_csv(path, columns: dict) -> None:
    names = list(columns)
    n = len(columns[names[0]])
    if any(len(columns[k]) != n for k in names):
        raise ValueError("all CSV columns need the same length")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for i in range(n):
            w.writerow([format_float(columns[k][i]) for k in names])


def read_csv(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {h: np.array([float(r[i]) for r in body]) for i, h in enumerate(header)}


def write_snapshots(path, times, data) -> None:
    data = np.ascontiguousarray(data, dtype="<f8")
    if data.ndim != 4:
        raise ValueError("snapshot data must have shape (n_snap, n_fields, nx+1, ny+1)")
    times = np.ascontiguousarray(times, dtype="<f8")
    if len(times) != data.shape[0]:
        raise ValueError("one time per snapshot required")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(np.asarray(data.shape, dtype="<i8").tobytes())
        fh.write(times.tobytes())
        fh.write(data.tobytes())


def read_snapshots(path) -> tuple:
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise ConfigError(f"{path} is not a snapshot file")
    shape = tuple(int(v) for v in np.frombuffer(raw, dtype="<i8", count=4, offset=8))
    off = 8 + 32
    times = np.frombuffer(raw, dtype="<f8", count=shape[0], offset=off)
    off += 8 * shape[0]
    data = np.frombuffer(raw, dtype="<f8", count=int(np.prod(shape)), offset=off).reshape(shape)
    return times.copy(), data.copy()
