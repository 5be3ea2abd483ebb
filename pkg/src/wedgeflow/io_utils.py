"""Deterministic, atomic output helpers shared by the command-line tools.

Every writer lands files via temp-file-plus-rename in the destination
directory, emits LF line endings and UTF-8 bytes, and formats numbers with
repr-faithful precision, so identical inputs produce byte-identical
outputs.  JSON payloads are sanitized (numpy scalars unwrapped, non-finite
numbers mapped to null) and key-sorted.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np


def sanitize(obj):
    """Make an object JSON-serializable and deterministic.

    Unwraps numpy scalars and arrays, converts tuples to lists, and maps
    non-finite floats to None (JSON has no inf/nan and a certificate that
    reports one means "no data", not a number).
    """
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):  # before int: bool subclasses int
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def atomic_write_text(path, text: str) -> None:
    """Write text to path via a same-directory temp file and atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_json(path, obj) -> None:
    """Serialize obj deterministically (sorted keys, sanitized values)."""
    payload = json.dumps(sanitize(obj), indent=2, sort_keys=True, allow_nan=False)
    atomic_write_text(path, payload + "\n")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_csv(path, header, rows) -> None:
    """Write rows as comma/LF/UTF-8 CSV with 17-significant-digit floats."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def resolve_out_dir(out: str | None) -> Path:
    """Resolve an output directory, honoring the WEDGEFLOW_OUT root override."""
    root = os.environ.get("WEDGEFLOW_OUT")
    p = Path(out) if out else Path(".")
    if root and not p.is_absolute():
        p = Path(root) / p
    p.mkdir(parents=True, exist_ok=True)
    return p
