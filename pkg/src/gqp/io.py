"""CSV and JSON serialization of trajectories, reports and tables.

CSV files use ',' separators, '.' decimals and a header row; floats are
written with ``repr`` so that output is exact and reproducible.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .integrator import Trajectory
from .oracle import ConvergenceTable, GridField


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])
    return path


def read_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    """Header and a float array (blank cells become NaN)."""
    with Path(path).open(newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[float(c) if c != "" else np.nan for c in row] for row in r]
    return header, np.array(rows, dtype=float).reshape(len(rows), len(header))


def write_json(path: str | Path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(obj), indent=2) + "\n")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def trajectory_header(m: int) -> list[str]:
    return ["t"] + [f"C_{k}" for k in range(1, m + 1)] + [f"Cdot_{k}" for k in range(1, m + 1)]


def write_trajectory(path, traj: Trajectory) -> Path:
    rows = (np.concatenate([[t], c, cd]) for t, c, cd in zip(traj.times, traj.C, traj.Cdot))
    return write_csv(path, trajectory_header(traj.m), rows)


def read_trajectory(path) -> dict[str, np.ndarray]:
    header, data = read_csv(path)
    m = (len(header) - 1) // 2
    if header != trajectory_header(m):
        raise ValueError("not a trajectory CSV")
    return {"t": data[:, 0], "C": data[:, 1 : m + 1], "Cdot": data[:, m + 1 :]}


def write_field(path, points: np.ndarray, values: np.ndarray, dim: int) -> Path:
    if dim == 1:
        return write_csv(path, ["x", "value"], zip(points.ravel(), values))
    return write_csv(path, ["x", "y", "value"], ((p[0], p[1], v) for p, v in zip(points, values)))


def write_grid_field(path, field: GridField) -> Path:
    return write_csv(path, ["x", "value"], zip(field.x, field.values))


def write_time_series(path, series: dict[str, np.ndarray]) -> Path:
    cols = ["t", "l2", "h10", "hm1", "dt_l1_slice"]
    return write_csv(path, cols, zip(*(series[c] for c in cols)))


def write_convergence(path, table: ConvergenceTable) -> Path:
    """One row per m; cauchy_l1 is the distance to the next m (blank on the last row)."""
    n = len(table.m_list)
    cauchy = list(table.cauchy_l1) + [None]
    weak = list(table.weak_residual) + [None] * (n - len(table.weak_residual))
    rows = zip(table.m_list, cauchy, table.bv_total, table.A_empirical, weak)
    return write_csv(path, ["m", "cauchy_l1", "bv_total", "A_empirical", "weak_residual"], rows)
