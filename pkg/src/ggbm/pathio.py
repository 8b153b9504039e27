"""Path CSV files (``t,value``) with a flat ``key=value`` metadata sidecar.

Numbers are written with 17 significant digits, so a write/read round trip
returns bit-identical floats.
"""
from __future__ import annotations

import csv
import io
import math
import os

import numpy as np

from .paths import DyadicGrid, Path, ProcessSpec

__all__ = ["fmt", "write_path_csv", "read_path_csv", "write_meta", "read_meta", "sidecar_name"]


def fmt(x) -> str:
    """Round-trip decimal form of a float (17 significant digits)."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def sidecar_name(csv_path) -> str:
    return os.fspath(csv_path) + ".meta"


def _meta_items(path: Path):
    items = {"level": path.grid.level}
    if path.process is not None:
        items["process"] = path.process.kind
        for k, v in path.process.params:
            items[k] = v
    for k, v in path.meta.items():
        if isinstance(v, np.ndarray):
            if k == "time_change":
                items["time_change_at_1"] = v[-1]
            continue
        items[k] = v
    return items


def write_meta(items: dict, fh) -> None:
    for k, v in items.items():
        val = fmt(v) if isinstance(v, (int, float, np.integer, np.floating)) else str(v)
        fh.write(f"{k}={val}\n")


def read_meta(fh) -> dict:
    out = {}
    for line in fh:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        k, _, v = line.partition("=")
        out[k.strip()] = v.strip()
    return out


def path_csv_text(path: Path) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "value"])
    for t, v in zip(path.times, path.values):
        w.writerow([fmt(t), fmt(v)])
    return buf.getvalue()


def write_path_csv(path: Path, filename, meta=True) -> None:
    """Write ``filename`` and, unless ``meta`` is false, ``filename.meta``."""
    with open(filename, "w", newline="") as fh:
        fh.write(path_csv_text(path))
    if meta:
        with open(sidecar_name(filename), "w", newline="") as fh:
            write_meta(_meta_items(path), fh)


_SPEC_KEYS = {"BM": (), "FBM": ("H",), "GGBM": ("beta", "alpha"), "TCBM": ("beta", "alpha")}


def read_path_csv(filename) -> Path:
    """Read a ``t,value`` file on a dyadic grid of [0, 1].

    The process comes from the sidecar when present; externally produced files
    without one get ``process=None``.
    """
    with open(filename, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["t", "value"]:
        raise ValueError(f"{filename}: expected header 't,value'")
    data = np.array([[float(a), float(b)] for a, b in rows[1:]])
    n = data.shape[0] - 1
    level = int(round(math.log2(n))) if n > 0 else 0
    if n < 2 or 2 ** level != n:
        raise ValueError(f"{filename}: {n + 1} rows is not 2^m + 1 for m >= 1")
    grid = DyadicGrid(level)
    if not np.allclose(data[:, 0], grid.times, rtol=0, atol=1e-12):
        raise ValueError(f"{filename}: times are not the dyadic grid of [0, 1]")
    spec, meta = None, {}
    side = sidecar_name(filename)
    if os.path.exists(side):
        with open(side) as fh:
            meta = read_meta(fh)
        kind = meta.get("process")
        if kind in _SPEC_KEYS:
            spec = ProcessSpec(kind, tuple((k, float(meta[k])) for k in _SPEC_KEYS[kind]))
    return Path(grid, data[:, 1], spec, meta)
