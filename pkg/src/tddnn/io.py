"""CSV and JSON writers. All numeric output is formatted deterministically."""

from __future__ import annotations

import csv
import json
import math
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .spectral import Spectrum

__all__ = [
    "write_rho_csv",
    "read_rho_csv",
    "write_trace_csv",
    "trace_filename",
    "write_solution_csv",
    "write_json",
    "write_spectrum_csv",
    "read_spectrum_csv",
]


@contextmanager
def _sink(target):
    # a path, or an already open text stream such as sys.stdout
    if hasattr(target, "write"):
        yield target
    else:
        with open(target, "w", newline="") as fh:
            yield fh


def _fmt(x, spec=".17g") -> str:
    if x is None:
        return ""
    return format(float(x), spec)


def write_rho_csv(path, d, rho, header=("d", "rho")) -> None:
    """Columns d and one or more rho columns (``rho`` may be 1-D or a list of 1-D)."""
    d = np.asarray(d, dtype=float)
    cols = [np.asarray(rho, dtype=float)] if np.ndim(rho) == 1 else [np.asarray(r, dtype=float) for r in rho]
    if len(header) != len(cols) + 1:
        raise ValueError("header does not match column count")
    with _sink(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i, di in enumerate(d):
            writer.writerow([_fmt(di)] + [_fmt(c[i]) for c in cols])


def read_rho_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[float(x) for x in row] for row in rows[1:]])


def trace_filename(variant, d: float) -> str:
    return f"{variant}_d{d:.10g}.csv"


def write_trace_csv(path, trace) -> None:
    with _sink(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "f", "g", "error_norm"])
        for k, f, g, err in trace.history:
            writer.writerow([k, _fmt(f, ".10g"), _fmt(g, ".10g"), _fmt(err, ".10g")])


def write_solution_csv(path, solution) -> None:
    with _sink(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "z", "mu"])
        for row in zip(solution.t, solution.z, solution.mu):
            writer.writerow([_fmt(x) for x in row])


def write_spectrum_csv(spectrum: Spectrum, path) -> None:
    with _sink(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["d"])
        for value in spectrum:
            writer.writerow([_fmt(value)])


def read_spectrum_csv(path) -> Spectrum:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["d"]:
            raise ValueError(f"{path}: expected header 'd'")
        values = [float(row[0]) for row in reader if row and row[0].strip()]
    return Spectrum(tuple(sorted(values)), f"explicit({Path(path).name})")


def _clean(obj):
    # JSON has no inf/nan; spell them as strings
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True)


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj) + "\n")
