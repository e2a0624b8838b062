"""Deterministic CSV output: '#' comment header, comma separated, LF endings.

Floats are written with repr() so they round-trip exactly and never depend on
the locale.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from . import __version__


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, float) and not np.isfinite(v):
        return repr(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render_csv(columns, rows, provenance: str, meta: dict | None = None) -> str:
    lines = [f"# cmacr {__version__}", f"# source: {provenance}"]
    for k, v in (meta or {}).items():
        lines.append(f"# {k}: {json.dumps(_jsonable(v), sort_keys=True)}")
    out = "\n".join(lines) + "\n"

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        if len(r) != len(columns):
            raise ValueError("ragged CSV row")
        w.writerow([_cell(v) for v in r])
    return out + buf.getvalue()


def write_csv(path, columns, rows, provenance: str, meta: dict | None = None) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w", newline="", encoding="utf-8") as fh:
        fh.write(render_csv(columns, rows, provenance, meta))
    return p


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    """Header and data rows of a file written by write_csv (comments skipped)."""
    with open(path, encoding="utf-8") as fh:
        rows = list(csv.reader(ln for ln in fh if not ln.startswith("#")))
    return rows[0], rows[1:]


def read_numeric_csv(path) -> tuple[list[str], np.ndarray]:
    head, rows = read_csv(path)
    return head, np.array(rows, dtype=float).reshape(-1, len(head))
