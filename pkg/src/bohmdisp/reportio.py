"""Deterministic serialization of reports and lattice data.

JSON output must be byte-identical across repeat runs so report files can
be diffed and archived.  The emitter therefore avoids everything
environment-dependent: keys are sorted, floats are printed with a fixed
``%.17g`` format (17 significant digits round-trip any double exactly),
there are no timestamps, and files are written atomically (temp file +
rename) so readers never observe a partial report.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import is_dataclass

import numpy as np

__all__ = [
    "to_jsonable",
    "canonical_json",
    "atomic_write",
    "write_json",
    "write_snapshot_csv",
    "write_field_csv",
    "write_trajectory_csv",
]

FLOAT_FORMAT = "%.17g"


def to_jsonable(obj):
    """Recursively convert reports/arrays/numpy scalars to plain data."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        # np.float64 subclasses float; coerce so callers get builtins only.
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(vars(obj))
    raise TypeError(f"cannot serialize {type(obj).__name__} deterministically")


def _emit(obj, parts):
    if obj is None:
        parts.append("null")
    elif obj is True:
        parts.append("true")
    elif obj is False:
        parts.append("false")
    elif isinstance(obj, int):
        parts.append(str(obj))
    elif isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"JSON cannot carry non-finite value {obj!r}")
        parts.append(FLOAT_FORMAT % obj)
    elif isinstance(obj, str):
        parts.append(json.dumps(obj, ensure_ascii=True))
    elif isinstance(obj, (list, tuple)):
        parts.append("[")
        for i, item in enumerate(obj):
            if i:
                parts.append(", ")
            _emit(item, parts)
        parts.append("]")
    elif isinstance(obj, dict):
        parts.append("{")
        for i, key in enumerate(sorted(obj)):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got "
                                f"{type(key).__name__}")
            if i:
                parts.append(", ")
            parts.append(json.dumps(key, ensure_ascii=True))
            parts.append(": ")
            _emit(obj[key], parts)
        parts.append("}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} "
                        f"deterministically; convert with to_jsonable first")


def canonical_json(obj):
    """Serialize plain data to a canonical JSON string (trailing newline)."""
    parts = []
    _emit(to_jsonable(obj), parts)
    parts.append("\n")
    return "".join(parts)


def atomic_write(path, text):
    """Write ``text`` to ``path`` via a same-directory temp file + rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-",
                               suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_json(path, obj):
    """Canonical-JSON :func:`atomic_write`; returns the emitted text."""
    text = canonical_json(obj)
    atomic_write(path, text)
    return text


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % float(value)
    return str(value)


def write_field_csv(path, lattice, columns):
    """Dump named lattice-shaped arrays as CSV, one row per lattice point.

    ``columns`` maps column names to arrays of the lattice shape.  Leading
    columns are the spacetime coordinates of the axes actually present.
    Complex arrays are split into ``<name>_re`` and ``<name>_im``.
    """
    names = []
    cols = []
    coords = lattice.grids()
    for axis, name in enumerate(lattice.axis_names):
        names.append(name)
        cols.append(np.broadcast_to(coords[axis], lattice.shape).ravel())
    for name in columns:
        arr = np.asarray(columns[name])
        if arr.shape != lattice.shape:
            raise ValueError(f"column {name!r} has shape {arr.shape}, "
                             f"expected {lattice.shape}")
        if np.iscomplexobj(arr):
            names.extend([f"{name}_re", f"{name}_im"])
            cols.extend([arr.real.ravel(), arr.imag.ravel()])
        else:
            names.append(name)
            cols.append(arr.ravel())
    atomic_write(path, _csv_text(names, zip(*cols)))


def write_snapshot_csv(path, grid, times, snapshots, name):
    """Dump evolution snapshots as CSV: one row per (time, grid point).

    Works for any snapshot count (unlike stacking into a spacetime lattice,
    which needs enough time levels for finite differences).  Leading columns
    are ``t`` and the spatial coordinates; the field column is split into
    ``<name>_re``/``<name>_im`` when complex.
    """
    times = np.asarray(times, dtype=np.float64)
    stack = np.stack([np.asarray(s) for s in snapshots])
    if stack.shape != (times.size,) + grid.shape:
        raise ValueError(f"snapshot stack has shape {stack.shape}, expected "
                         f"{(times.size,) + grid.shape}")
    names = ["t"]
    cols = [np.repeat(times, int(np.prod(grid.shape)))]
    coords = grid.grids()
    for axis, axis_name in enumerate(grid.axis_names):
        tiled = np.broadcast_to(coords[axis], grid.shape).ravel()
        names.append(axis_name)
        cols.append(np.tile(tiled, times.size))
    if np.iscomplexobj(stack):
        names.extend([f"{name}_re", f"{name}_im"])
        cols.extend([stack.real.ravel(), stack.imag.ravel()])
    else:
        names.append(name)
        cols.append(stack.ravel())
    atomic_write(path, _csv_text(names, zip(*cols)))


def write_trajectory_csv(path, stats):
    """Dump a :class:`~bohmdisp.evolve.PacketStats` track as CSV."""
    names = ["t", "norm", "centroid", "width", "peak_position"]
    rows = zip(stats.times, stats.norms, stats.centroids, stats.widths,
               stats.peak_positions)
    atomic_write(path, _csv_text(names, rows))


def _csv_text(names, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(names)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buffer.getvalue()
