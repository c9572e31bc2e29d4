"""Result serialization: diagnostics tables, sweep tables and field snapshots.

Every writer goes through :func:`atomic_write`, so a failed write never
leaves a truncated file behind.  Floats are written with ``repr`` which
round-trips finite doubles exactly.
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path

import numpy as np

from .config import SNAPSHOT_FORMATS
from .diagnostics import DiagnosticsRecord
from .grid import make_grid
from .state import State


def atomic_write(path, text: str) -> Path:
    """Write ``text`` to a temp file next to ``path`` and rename it into place."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def write_diagnostics(records, path) -> Path:
    """One CSV row per record; columns in :class:`DiagnosticsRecord` field order."""
    header = DiagnosticsRecord.field_names()
    return atomic_write(path, _csv_text(header, (r.values() for r in records)))


def read_diagnostics(path) -> list[DiagnosticsRecord]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != tuple(DiagnosticsRecord.field_names()):
            raise ValueError(f"{path}: unexpected diagnostics header")
        return [DiagnosticsRecord(*(float(x) for x in row)) for row in reader]


def write_sweep_table(result, path) -> Path:
    """Sweep rows (value plus metrics) followed by one ``slope`` row."""
    from .experiments import SWEEP_METRICS

    header = ["value", *SWEEP_METRICS, "energy_bounded"]
    rows = [[r[k] for k in header] for r in result.rows]
    rows.append(["slope", *(result.slopes[m] for m in SWEEP_METRICS), ""])
    return atomic_write(path, _csv_text(header, rows))


def write_convergence_table(result, path) -> Path:
    rows = []
    for k, (n, err) in enumerate(zip(result.resolutions, result.errors)):
        rows.append([n, err, result.orders[k - 1] if k > 0 else ""])
    return atomic_write(path, _csv_text(["N", "error", "order"], rows))


# ------------------------------------------------------------------ snapshots


def _grid_csv(state: State) -> str:
    g = state.grid
    fields = state.named_fields()
    names = list(fields)
    lines = [
        f"# dimension = {g.dim}",
        f"# N = {g.n}",
        f"# R = {g.radius!r}",
        f"# h = {g.h!r}",
        f"# time = {float(state.t)!r}",
        f"# fields = {','.join(names)}",
    ]
    columns = np.stack([fields[k].ravel(order="C") for k in names], axis=1)
    body = _csv_text(names, columns.tolist())
    return "\n".join(lines) + "\n" + body


def _vtk_legacy(state: State) -> str:
    g = state.grid
    dims = [g.n + 1] * g.dim + [1] * (3 - g.dim)
    origin = [-g.half_width] * g.dim + [0.0] * (3 - g.dim)
    spacing = [g.h] * 3
    out = [
        "# vtk DataFile Version 3.0",
        f"tumorpen snapshot t={float(state.t)!r}",
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        "DIMENSIONS " + " ".join(str(n) for n in dims),
        "ORIGIN " + " ".join(repr(float(x)) for x in origin),
        "SPACING " + " ".join(repr(float(x)) for x in spacing),
        f"CELL_DATA {g.cell_count}",
    ]
    for name in ("P", "Q", "D", "C", "phi"):
        out.append(f"SCALARS {name} double 1")
        out.append("LOOKUP_TABLE default")
        # vtk orders cells with x varying fastest
        out.extend(repr(float(x)) for x in getattr(state, name).ravel(order="F"))
    for name in ("v", "m"):
        vec = getattr(state, name)
        comps = [vec[k].ravel(order="F") for k in range(g.dim)]
        if g.dim == 2:
            comps.append(np.zeros(g.cell_count))
        out.append(f"VECTORS {name} double")
        out.extend(" ".join(repr(float(c[i])) for c in comps) for i in range(g.cell_count))
    return "\n".join(out) + "\n"


def write_field_snapshot(state: State, path, format: str = "grid-csv") -> Path:
    if format == "grid-csv":
        return atomic_write(path, _grid_csv(state))
    if format == "vtk-legacy":
        return atomic_write(path, _vtk_legacy(state))
    raise ValueError(f"unknown snapshot format {format!r}; choose from {', '.join(SNAPSHOT_FORMATS)}")


def read_field_snapshot(path) -> State:
    """Reload a grid-csv snapshot."""
    meta = {}
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    k = 0
    while k < len(lines) and lines[k].startswith("#"):
        key, _, value = lines[k][1:].partition("=")
        meta[key.strip()] = value.strip()
        k += 1
    try:
        grid = make_grid(float(meta["R"]), int(meta["N"]), int(meta["dimension"]))
        t = float(meta["time"])
    except KeyError as exc:
        raise ValueError(f"{path}: missing header entry {exc.args[0]!r}") from exc
    reader = csv.reader(lines[k:])
    names = next(reader)
    data = np.array([[float(x) for x in row] for row in reader])
    if data.shape != (grid.cell_count, len(names)):
        raise ValueError(f"{path}: expected {grid.cell_count} rows of {len(names)} values")
    cols = {name: data[:, j].reshape(grid.shape) for j, name in enumerate(names)}
    state = State.zeros(grid, t=t)
    for name in ("P", "Q", "D", "C", "phi"):
        setattr(state, name, cols[name])
    for name in ("v", "m"):
        setattr(state, name, np.stack([cols[f"{name}{i}"] for i in range(grid.dim)]))
    return state
