"""Tabular and JSON output for time series, ensembles and entropy profiles.

Every writer takes a column mapping ``{name: 1-D array}`` plus a metadata
dict. CSV files start with ``#``-prefixed metadata lines followed by one
header row; JSON files hold ``{"meta": {...}, "data": [{column: value}, ...]}``.
Floats are written with ``repr`` so they round-trip exactly.
"""
import csv
import json
from datetime import datetime, timezone

import numpy as np

FORMATS = ("csv", "json")


def series_columns(series):
    """Columns ``t, R_1..R_2N, V_11..V_2N2N`` (1-based) of a :class:`StateSeries`."""
    times = np.asarray(series.times, dtype=float)
    cols = {"t": times}
    if len(series) == 0:
        return cols
    R = np.array([s.R for s in series.states])
    V = np.array([s.V for s in series.states])
    dim = R.shape[1]
    for i in range(dim):
        cols[f"R_{i + 1}"] = R[:, i]
    for i in range(dim):
        for j in range(dim):
            cols[f"V_{i + 1}{j + 1}" if dim < 10 else f"V_{i + 1}_{j + 1}"] = V[:, i, j]
    return cols


def ensemble_columns(ensemble):
    """Columns ``t, mean_R_i, var_R_i`` summarising a :class:`TrajectoryEnsemble`."""
    cols = {"t": np.asarray(ensemble.times, dtype=float)}
    mean, var = ensemble.mean_R(), ensemble.var_R()
    for i in range(mean.shape[1]):
        cols[f"mean_R_{i + 1}"] = mean[:, i]
    for i in range(var.shape[1]):
        cols[f"var_R_{i + 1}"] = var[:, i]
    return cols


def profile_columns(mean, std=None):
    """Columns ``x, S_mean[, S_std]`` of an entropy profile."""
    mean = np.asarray(mean, dtype=float)
    cols = {"x": np.arange(mean.size), "S_mean": mean}
    if std is not None:
        cols["S_std"] = np.asarray(std, dtype=float)
    return cols


def _cell(value):
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(value)


def _rows(columns):
    names = list(columns)
    arrays = [np.asarray(columns[k]).reshape(-1) for k in names]
    lengths = {a.size for a in arrays}
    if len(lengths) > 1:
        raise ValueError(f"columns have different lengths: {sorted(lengths)}")
    n = lengths.pop() if lengths else 0
    return names, [[_cell(a[i]) for a in arrays] for i in range(n)]


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def stamp_meta(meta, timestamp=True):
    """Copy of ``meta`` with a UTC ``generated`` entry unless ``timestamp`` is false."""
    meta = dict(meta)
    if timestamp:
        meta["generated"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return meta


def write_csv(path, columns, meta=None):
    names, rows = _rows(columns)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for key, value in (meta or {}).items():
            fh.write(f"# {key}: {json.dumps(_jsonable(value), sort_keys=True)}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in rows:
            writer.writerow([repr(v) for v in row])


def write_json(path, columns, meta=None):
    names, rows = _rows(columns)
    doc = {"meta": _jsonable(meta or {}), "data": [dict(zip(names, row)) for row in rows]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=False, allow_nan=True)
        fh.write("\n")


def write_output(path, columns, meta=None, fmt="csv"):
    """Write ``columns`` to ``path`` as CSV or JSON.

    Raises:
        ValueError: for an unknown format or ragged columns.
        OSError: when ``path`` cannot be written.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    (write_csv if fmt == "csv" else write_json)(path, columns, meta)


def read_csv(path):
    """Read a file written by :func:`write_csv`; returns ``(meta, columns)``."""
    meta = {}
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta[key] = json.loads(value)
        else:
            body.append(line)
    reader = csv.reader(body)
    names = next(reader)
    data = [list(map(float, row)) for row in reader]
    arr = np.array(data).reshape(len(data), len(names))
    return meta, {k: arr[:, i] for i, k in enumerate(names)}
