"""Deterministic text serialization of run artifacts.

The CSV layout is one row per recorded time with columns

    t, mean_1..mean_N, var_1..var_N, cov_1_2, cov_1_3, ..., cov_{N-1}_N

covering the upper triangle in lexicographic order over the full
N-component composition.  Values print with 17 significant digits so
equal doubles always produce equal bytes.
"""

import json
import os

import numpy as np


def format_value(x):
    return "%.17g" % float(x)


def csv_header(dim):
    cols = ["t"]
    cols += [f"mean_{i + 1}" for i in range(dim)]
    cols += [f"var_{i + 1}" for i in range(dim)]
    cols += [f"cov_{i + 1}_{j + 1}" for i in range(dim) for j in range(i + 1, dim)]
    return ",".join(cols)


def record_to_row(record):
    if record.cov is None:
        raise ValueError("CSV rows need covariances; run with at least two particles")
    dim = record.mean.shape[0]
    vals = [record.t]
    vals += [record.mean[i] for i in range(dim)]
    vals += [record.cov[i, i] for i in range(dim)]
    vals += [record.cov[i, j] for i in range(dim) for j in range(i + 1, dim)]
    return ",".join(format_value(v) for v in vals)


def timeseries_to_csv(series):
    """Render a moment time series as CSV text (trailing newline)."""
    lines = [csv_header(series.dim)]
    lines += [record_to_row(r) for r in series.records]
    return "\n".join(lines) + "\n"


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def to_jsonable(obj):
    """Recursively convert numpy containers to plain JSON types."""
    return _plain(obj)


def dump_json(obj, path):
    text = json.dumps(to_jsonable(obj), indent=2) + "\n"
    write_text(path, text)


def write_text(path, text):
    """Write text through a same-directory temp file and atomic rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
