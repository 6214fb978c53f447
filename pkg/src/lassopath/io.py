"""Instance and path files, dataset ingestion and plot export.

JSON floats are written with Python's shortest round-trip representation,
so float64 data survives a write/read cycle bit for bit. Paths computed in
extended precision are written rounded to float64.
"""

import csv
import json
import math

import numpy as np

from ._numeric import precision_context, to_float, to_working
from .exceptions import DegenerateColumn, InvalidInstance, ParseError
from .model import Kink, ProblemInstance, RegularizationPath

__all__ = [
    "emit_plot_data",
    "ingest",
    "normalize_instance",
    "plot_value",
    "read_instance",
    "read_path",
    "write_instance",
    "write_path",
]


def _load_json(fh):
    try:
        return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from exc


def _open(target, mode):
    if hasattr(target, "read") or hasattr(target, "write"):
        return _Borrowed(target)
    return open(target, mode, newline="" if "w" in mode else None)


class _Borrowed:
    """Context manager around a caller-owned file object (left open)."""

    def __init__(self, fh):
        self.fh = fh

    def __enter__(self):
        return self.fh

    def __exit__(self, *exc):
        return False


def write_instance(inst, target, meta=None):
    doc = {
        "y": inst.y.tolist(),
        "X": inst.X.tolist(),
        "meta": dict(meta or {}),
    }
    with _open(target, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def instance_from_dict(doc):
    if not isinstance(doc, dict) or "y" not in doc or "X" not in doc:
        raise ParseError("instance file needs keys 'y' and 'X'")
    y, X = doc["y"], doc["X"]
    if not isinstance(X, list) or not all(isinstance(row, list) for row in X):
        raise ParseError("'X' must be a list of rows")
    widths = {len(row) for row in X}
    if len(widths) > 1:
        raise ParseError(f"rows of X have different lengths: {sorted(widths)}")
    if len(X) != len(y):
        raise ParseError(f"X has {len(X)} rows but y has {len(y)} entries")
    try:
        return ProblemInstance(np.array(y, dtype=np.float64), np.array(X, dtype=np.float64))
    except (TypeError, ValueError) as exc:
        raise ParseError(str(exc)) from exc


def read_instance(source):
    """Return ``(instance, meta)`` from an instance JSON file."""
    with _open(source, "r") as fh:
        doc = _load_json(fh)
    return instance_from_dict(doc), dict(doc.get("meta") or {})


def _num(v):
    return None if v is None else float(v)


def path_to_dict(path):
    kinks = []
    for k in path.kinks:
        coeffs = to_float(k.coeffs)
        active = [int(j) for j in k.active]
        rec = {
            "lambda": float(k.lam),
            "active": active,
            "values": [float(coeffs[j]) for j in active],
            "pattern": list(k.pattern),
            "step": k.step,
        }
        if k.valid_until is not None:
            rec["valid_until"] = float(k.valid_until)
        kinks.append(rec)
    return {
        "kind": path.kind,
        "epsilon": path.epsilon,
        "lambda_max": float(path.lambda_max),
        "p": path.p,
        "precision": path.precision,
        "terminal": path.terminal,
        "kinks": kinks,
    }


def write_path(path, target):
    with _open(target, "w") as fh:
        json.dump(path_to_dict(path), fh)
        fh.write("\n")


def path_from_dict(doc):
    try:
        p = int(doc["p"])
        precision = doc.get("precision")
        kinks = []
        with precision_context(precision):
            for rec in doc["kinks"]:
                active = tuple(int(j) for j in rec["active"])
                values = rec["values"]
                if len(active) != len(values):
                    raise ParseError("kink 'active' and 'values' differ in length")
                w = np.zeros(p)
                w[list(active)] = values
                pattern = rec.get("pattern")
                if pattern is None:
                    pattern = np.sign(w).astype(int).tolist()
                lam, until = rec["lambda"], _num(rec.get("valid_until"))
                if precision is not None:
                    w = to_working(w, precision)
                    lam = to_working(np.array([lam]), precision)[0]
                    if until is not None:
                        until = to_working(np.array([until]), precision)[0]
                kinks.append(
                    Kink(lam, w, active, tuple(int(v) for v in pattern), rec.get("step", "homotopy"), until)
                )
        lams = [float(k.lam) for k in kinks]
        if any(b >= a for a, b in zip(lams, lams[1:])):
            raise ParseError("kinks must have strictly decreasing lambda")
        return RegularizationPath(
            tuple(kinks),
            doc["kind"],
            doc.get("epsilon"),
            float(doc["lambda_max"]),
            p,
            precision,
            bool(doc.get("terminal", True)),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise ParseError(f"malformed path file: {exc!r}") from exc
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc)) from exc


def read_path(source):
    with _open(source, "r") as fh:
        doc = _load_json(fh)
    return path_from_dict(doc)


def _read_csv(source):
    with _open(source, "r") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("empty CSV file", 1)
    header = [h.strip() for h in rows[0]]
    if len(header) < 2:
        raise ParseError("need at least one predictor column and a response column", 1)
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno)
        try:
            data.append([float(cell) for cell in row])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from exc
    if not data:
        raise ParseError("no data rows", 2)
    data = np.array(data)
    iy = header.index("y") if "y" in header else len(header) - 1
    names = [h for i, h in enumerate(header) if i != iy]
    return data[:, iy], np.delete(data, iy, axis=1), names


def normalize_instance(y, X, names=None):
    """Center every column of X and y, then scale each to unit Euclidean norm."""
    y = np.asarray(y, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    Xc = X - X.mean(axis=0)
    norms = np.linalg.norm(Xc, axis=0)
    scale = np.abs(X).max(axis=0)
    for j in range(X.shape[1]):
        if norms[j] <= 1e-12 * max(scale[j], 1.0):
            raise DegenerateColumn(names[j] if names else j)
    yc = y - y.mean()
    ynorm = np.linalg.norm(yc)
    if ynorm <= 1e-12 * max(np.abs(y).max(), 1.0):
        raise DegenerateColumn("y")
    return yc / ynorm, Xc / norms


def ingest(source, fmt="csv", normalize=False):
    """Load a dataset as a :class:`ProblemInstance`.

    CSV files have a header row and the response in the column named ``y``
    (or the last column); JSON files use the instance layout.
    """
    if fmt == "csv":
        y, X, names = _read_csv(source)
    elif fmt == "json":
        with _open(source, "r") as fh:
            doc = _load_json(fh)
        inst = instance_from_dict(doc)
        y, X, names = inst.y, inst.X, None
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if normalize:
        y, X = normalize_instance(y, X, names)
    try:
        return ProblemInstance(y, X)
    except InvalidInstance as exc:
        raise ParseError(str(exc)) from exc


def plot_value(w):
    """``sign(w) |w|^0.1`` (0 stays 0)."""
    return math.copysign(abs(w) ** 0.1, w) if w != 0 else 0.0


def emit_plot_data(path, target):
    """CSV with one row per kink: lambda, then ``sign(w_j)|w_j|^0.1`` per variable."""
    with _open(target, "w") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda"] + [f"w{j + 1}" for j in range(path.p)])
        for k in path.kinks:
            coeffs = to_float(k.coeffs)
            writer.writerow([repr(float(k.lam))] + [repr(plot_value(float(v))) for v in coeffs])
