"""JSON reports and CSV tables.

Report layout::

    {operation, generator_label, vertex, parameters, samples, verdicts,
     witnesses, config, metadata}

``metadata`` holds the timestamp and is the only field allowed to differ
between two runs with the same arguments.
"""

from __future__ import annotations

import csv
import json
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

__all__ = ["jsonable", "make_report", "strip_metadata", "write_csv", "write_outputs"]


def jsonable(x):
    """Recursively convert numpy scalars/arrays and complex numbers.

    Complex values become ``[re, im]``; non-finite floats become strings so
    the output stays valid JSON.
    """
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [jsonable(float(x.real)), jsonable(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if np.isfinite(x):
            return x
        return "nan" if np.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def make_report(operation: str, generator_label: str, vertex, parameters: dict, samples,
                verdicts: dict, witnesses, config: dict) -> dict:
    return {
        "operation": operation,
        "generator_label": generator_label,
        "vertex": jsonable(np.asarray(vertex) if vertex is not None else None),
        "parameters": jsonable(parameters),
        "samples": jsonable(samples),
        "verdicts": jsonable(verdicts),
        "witnesses": jsonable(witnesses),
        "config": jsonable(config),
        "metadata": {"timestamp": datetime.now(timezone.utc).isoformat()},
    }


def strip_metadata(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "metadata"}


def write_csv(rows: list[dict], path: Path) -> Path:
    path = Path(path)
    fields = list(rows[0]) if rows else []
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    return path


def write_outputs(report: dict, tables: dict[str, list[dict]], out_dir, fmt: str, stem: str) -> list[Path]:
    """Write ``<stem>.json`` and/or ``<stem>_<table>.csv`` files; return their paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("json", "both"):
        path = out / f"{stem}.json"
        path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        written.append(path)
    if fmt in ("csv", "both"):
        for name, rows in tables.items():
            if rows:
                written.append(write_csv(rows, out / f"{stem}_{name}.csv"))
    return written
