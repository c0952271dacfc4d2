"""Serialisation: CSV polar grids, lon/lat patches and deterministic JSON.

CSV grid layout (row-major, radius-major)::

    r_min,r_max,n_r,n_theta
    0.1,1000,256,256
    r,theta,u,K
    <n_r * n_theta rows>

Values are written with 17 significant digits so a round trip is exact.
JSON floats are rounded to 12 significant digits and keys keep insertion
order, so identical runs give identical bytes.
"""

import csv
import json
import math

import numpy as np

from .conformal_growth import PlaneConformalGrid, PolarGrid

FLOAT_DIGITS = 12


def write_grid_csv(field, path):
    g = field.grid
    R, T = g.mesh()
    K = field.K if field.K is not None else np.full_like(field.u, np.nan)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r_min", "r_max", "n_r", "n_theta"])
        w.writerow([repr(float(g.r_min)), repr(float(g.r_max)), g.n_r, g.n_theta])
        w.writerow(["r", "theta", "u", "K"])
        for r, t, u, k in zip(R.ravel(), T.ravel(), field.u.ravel(), K.ravel()):
            w.writerow([f"{r:.17g}", f"{t:.17g}", f"{u:.17g}", f"{k:.17g}"])


def read_grid_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 3 or rows[0] != ["r_min", "r_max", "n_r", "n_theta"] or rows[2] != ["r", "theta", "u", "K"]:
        raise ValueError(f"{path}: not a polar grid CSV")
    r_min, r_max = float(rows[1][0]), float(rows[1][1])
    n_r, n_theta = int(rows[1][2]), int(rows[1][3])
    grid = PolarGrid(r_min, r_max, n_r, n_theta)
    data = np.array(rows[3:], dtype=float)
    if data.shape != (n_r * n_theta, 4):
        raise ValueError(f"{path}: expected {n_r * n_theta} data rows, found {len(data)}")
    u = data[:, 2].reshape(n_r, n_theta)
    K = data[:, 3].reshape(n_r, n_theta)
    return PlaneConformalGrid(grid, u, None if np.all(np.isnan(K)) else K)


def write_patch_csv(patch, fields, path):
    """Write named scalar fields sampled on a lon/lat patch."""
    L, B = patch.mesh()
    names = list(fields)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lon_center", "lat_center", "lon_half", "lat_half", "n_lon", "n_lat"])
        w.writerow([repr(float(patch.lon_center)), repr(float(patch.lat_center)), repr(float(patch.lon_half)),
                    repr(float(patch.lat_half)), patch.n_lon, patch.n_lat])
        w.writerow(["lon", "lat"] + names)
        cols = [L.ravel(), B.ravel()] + [np.asarray(fields[k], dtype=float).ravel() for k in names]
        for row in zip(*cols):
            w.writerow([f"{v:.17g}" for v in row])


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
        if x == 0:
            return 0.0
        return float(f"{x:.{FLOAT_DIGITS}g}")
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj):
    """Deterministic JSON: 12 significant digits, NaN -> null, trailing newline."""
    return json.dumps(_clean(obj), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def dump(obj, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))
