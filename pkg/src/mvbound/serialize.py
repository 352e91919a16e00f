"""Canonical JSON and CSV writers.

Floats are written with 17 significant digits so doubles round-trip exactly;
non-finite floats become ``null``. Keys keep insertion order, output ends
with a single LF.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

OUTPUT_DIR_ENV = "MVBOUND_OUTPUT_DIR"


def _enc(obj, indent: int, level: int) -> str:
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return format(x, ".17g") if math.isfinite(x) else "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [json.dumps(str(k), ensure_ascii=False) + ": " + _enc(v, indent, level + 1) for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        parts = [_enc(v, indent, level + 1) for v in obj]
        # flat lists of scalars stay on one line
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(parts) + "]"
        return "[" + pad + ("," + pad).join(parts) + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _enc(obj, indent, 0) + "\n"


def resolve_output(path) -> Path:
    """Relative output paths are placed under $MVBOUND_OUTPUT_DIR when it is set."""
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def write_json(path, obj) -> Path:
    p = resolve_output(path)
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))
    return p


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format(v, ".17g") if isinstance(v, float) else ("" if v is None else v) for v in row])
    return buf.getvalue()


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    p = resolve_output(path)
    with open(p, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(columns, rows))
    return p
