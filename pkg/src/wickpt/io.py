"""CSV/JSON emission shared by the modules and the CLI."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np


def _fmt(v) -> str:
    return "%.17g" % v


def write_csv(path: str | Path, header: Sequence[str], columns: Iterable[Sequence[float]]) -> Path:
    """Write equal-length columns with one header row and 17 significant digits."""
    cols = [np.asarray(c, dtype=float).ravel() for c in columns]
    if len(cols) != len(header):
        raise ValueError("header and column count differ")
    if len({c.size for c in cols}) > 1:
        raise ValueError("columns differ in length")
    path = Path(path)
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def write_matrix_csv(path: str | Path, row_label: str, row_values, col_values, matrix) -> Path:
    """Matrix CSV: first column holds ``row_values``, header holds ``col_values``."""
    matrix = np.asarray(matrix, dtype=float)
    header = [row_label] + [_fmt(c) for c in col_values]
    lines = [",".join(header)]
    for rv, row in zip(row_values, matrix):
        lines.append(",".join([_fmt(rv)] + [_fmt(v) for v in row]))
    path = Path(path)
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def _jsonable(obj: Any):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path: str | Path, data: dict) -> Path:
    path = Path(path)
    _atomic_write(path, json.dumps(_jsonable(data), indent=2, sort_keys=False) + "\n")
    return path


def sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
