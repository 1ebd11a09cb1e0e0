"""File formats: JSON for structured artifacts, CSV for scans."""

from __future__ import annotations

import csv
import io as _stdio
import json
import sys
from pathlib import Path

import numpy as np

from .errors import IoFailure, SchemaViolation
from .qcore import MeasuredCounts


def _plain(obj):
    """Convert numpy scalars/arrays and dataclasses into JSON-ready values."""
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"{path} is not valid JSON: {exc.msg}") from None


def write_text(text: str, path) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc.strerror}") from None


def emit_report(report, path) -> None:
    write_text(dumps(report), path)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0].keys())
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in cols])
    return buf.getvalue()


def emit_csv(rows: list[dict], path) -> None:
    write_text(rows_to_csv(rows), path)


def counts_to_dict(counts: MeasuredCounts) -> dict:
    return {
        "dim": counts.dim,
        "bases": list(counts.labels),
        "counts": {lab: t.tolist() for lab, t in zip(counts.labels, counts.counts)},
    }


def counts_from_dict(data: dict) -> MeasuredCounts:
    for key in ("dim", "bases", "counts"):
        if key not in data:
            raise SchemaViolation(f"counts file lacks {key!r}")
    d = data["dim"]
    if not isinstance(d, int) or d < 2:
        raise SchemaViolation("dim must be an integer >= 2")
    labels = [str(x) for x in data["bases"]]
    tables = []
    for lab in labels:
        if lab not in data["counts"]:
            raise SchemaViolation(f"no count table for basis {lab!r}")
        raw = data["counts"][lab]
        if not isinstance(raw, list) or any(not isinstance(r, list) for r in raw):
            raise SchemaViolation(f"count table for {lab!r} must be a matrix")
        if len(raw) != d or any(len(r) != d for r in raw):
            raise SchemaViolation(f"count table for {lab!r} must be {d}x{d}")
        arr = np.asarray(raw, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise SchemaViolation(f"non-finite count in {lab!r}")
        tables.append(arr)
    return MeasuredCounts(d, tuple(labels), tuple(tables))


def load_counts(path) -> MeasuredCounts:
    return counts_from_dict(load_json(path))
