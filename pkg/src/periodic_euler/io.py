"""CSV and JSON emission with fixed columns and round-trip float formatting."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .gas import ProblemParams

FIELD_COLUMNS = ("x", "t", "rho", "m", "z", "w")
LATTICE_COLUMNS = ("j", "n", "rho", "m", "z", "w")
HISTORY_COLUMNS = ("iter", "residual", "clamp_count")


def fmt(v) -> str:
    """Shortest round-trip representation; integers stay integers."""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def _zw(rho, m, params: ProblemParams):
    if rho > 0:
        v = m / rho
        c = rho ** params.theta / params.theta
        return v - c, v + c
    return 0.0, 0.0


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([fmt(v) for v in row])
    return path


def field_rows(xs, t, states, params):
    for x, (rho, m) in zip(xs, states):
        z, w = _zw(rho, m, params)
        yield (float(x), float(t), rho, m, z, w)


def lattice_rows(levels, params, level_ids=None):
    """Rows ``(j, n, rho, m, z, w)`` for each level ``(rho, m)`` on ``J_n``."""
    for k, (rho, m) in enumerate(levels):
        n = k if level_ids is None else level_ids[k]
        for j in range(1 - n % 2, len(rho), 2):
            z, w = _zw(float(rho[j]), float(m[j]), params)
            yield (j, n, float(rho[j]), float(m[j]), z, w)


def read_lattice(path):
    """Read a lattice CSV; returns ``{n: (rho, m)}`` with NaN off ``J_n``."""
    path = Path(path)
    with path.open() as fh:
        rd = csv.DictReader(fh)
        if tuple(rd.fieldnames or ()) != LATTICE_COLUMNS:
            raise ValueError(f"{path}: expected columns {LATTICE_COLUMNS}")
        rows = [(int(r["j"]), int(r["n"]), float(r["rho"]), float(r["m"])) for r in rd]
    if not rows:
        raise ValueError(f"{path}: no rows")
    size = max(r[0] for r in rows) + 1
    size += (size % 2 == 0)  # the largest index is 2 Nx, so the size is odd
    out = {}
    for j, n, rho, m in rows:
        if n not in out:
            out[n] = (np.full(size, np.nan), np.full(size, np.nan))
        out[n][0][j] = rho
        out[n][1][j] = m
    return out


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")
    return path


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj
