"""CSV interchange for planned trajectories and simulation traces.

Floats are written with ``repr`` so a write/read cycle is bit-exact. All
values are SI (m, rad, s).
"""

from __future__ import annotations

import csv
import io

import numpy as np

from .control import AXIS_NAMES, SimTrace
from .trajectory import Trajectory

POSE_NAMES = ("alpha", "beta", "x", "y", "z")

TRAJECTORY_COLUMNS = (
    ("t",)
    + POSE_NAMES
    + tuple(f"{n}_dot" for n in POSE_NAMES)
    + tuple(f"a_{n}" for n in POSE_NAMES)
    + AXIS_NAMES
    + tuple(f"{n}_dot" for n in AXIS_NAMES)
    + tuple(f"{n}_ddot" for n in AXIS_NAMES)
)

_TRACE_GROUPS = ("q_desired", "q_actual", "qd_desired", "qd_estimated", "error", "u")
TRACE_COLUMNS = (("t",) + tuple(f"{g}_{n}" for g in _TRACE_GROUPS for n in AXIS_NAMES)
                 + ("cycle_time",))


def _write(handle, header, rows):
    w = csv.writer(handle, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) for v in row])


def _open_out(target):
    if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
        return open(target, "w", newline="", encoding="utf-8"), True
    return target, False


def _read(source, columns):
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    else:
        rows = list(csv.reader(source))
    if not rows:
        raise ValueError("empty CSV")
    header = tuple(rows[0])
    missing = [c for c in columns if c not in header]
    if missing:
        raise ValueError(f"missing columns: {', '.join(missing)}")
    pos = [header.index(c) for c in columns]
    data = np.array([[float(r[i]) for i in pos] for r in rows[1:]], dtype=float)
    return data.reshape(-1, len(columns))


def trajectory_rows(traj: Trajectory):
    return np.column_stack([traj.t, traj.pose, traj.V, traj.A, traj.q, traj.q_dot, traj.q_ddot])


def write_trajectory(target, traj: Trajectory):
    fh, owned = _open_out(target)
    try:
        _write(fh, TRAJECTORY_COLUMNS, trajectory_rows(traj))
    finally:
        if owned:
            fh.close()


def read_trajectory(source) -> Trajectory:
    d = _read(source, TRAJECTORY_COLUMNS)
    cols = [d[:, 1 + 5 * i: 6 + 5 * i].copy() for i in range(6)]
    return Trajectory(d[:, 0].copy(), *cols)


def write_trace(target, trace: SimTrace):
    fh, owned = _open_out(target)
    try:
        rows = np.column_stack([trace.t] + [getattr(trace, g) for g in _TRACE_GROUPS]
                               + [trace.cycle_time])
        _write(fh, TRACE_COLUMNS, rows)
    finally:
        if owned:
            fh.close()


def read_trace(source) -> dict:
    """Trace columns as a dict of arrays (``t``, each group as (N, 5), ``cycle_time``)."""
    d = _read(source, TRACE_COLUMNS)
    out = {"t": d[:, 0].copy(), "cycle_time": d[:, -1].copy()}
    for i, g in enumerate(_TRACE_GROUPS):
        out[g] = d[:, 1 + 5 * i: 6 + 5 * i].copy()
    return out


def trajectory_csv_text(traj: Trajectory) -> str:
    buf = io.StringIO()
    write_trajectory(buf, traj)
    return buf.getvalue()
