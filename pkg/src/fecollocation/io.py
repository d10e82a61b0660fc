"""CSV/JSON writers for node sets, error curves, spectra and coefficients.

Every CSV starts with a ``# format_version=1`` comment line followed by a
header row. Floats are written with 17 significant digits.
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

FORMAT_VERSION = 1


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    return format(v, ".17g")


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    lines = [f"# format_version={FORMAT_VERSION}", ",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    _atomic_write(Path(path), "\n".join(lines) + "\n")
    return Path(path)


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
    return rows[0], rows[1:]


def write_nodes(path, interior, boundary=()) -> Path:
    rows = [(x, y, "interior") for x, y in np.asarray(interior).reshape(-1, 2)]
    rows += [(x, y, "boundary") for x, y in np.asarray(boundary).reshape(-1, 2)]
    return write_csv(path, ("x", "y", "kind"), rows)


def write_error_curve(path, records: Sequence[tuple[int, float]]) -> Path:
    return write_csv(path, ("N", "max_error"), records)


def write_spectrum(path, singular_values) -> Path:
    s = np.asarray(singular_values, dtype=float)
    norm = s / s[0] if len(s) and s[0] > 0 else s
    return write_csv(path, ("i", "sigma_raw", "sigma_normalized"), zip(range(1, len(s) + 1), s, norm))


def write_coefficients(path, multi_indices, coefficients) -> Path:
    c = np.asarray(coefficients, dtype=complex)
    rows = ((l1, l2, z.real, z.imag) for (l1, l2), z in zip(multi_indices, c))
    return write_csv(path, ("l1", "l2", "re", "im"), rows)


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_json(path, payload: dict) -> Path:
    doc = {"format_version": FORMAT_VERSION, **payload}
    _atomic_write(Path(path), json.dumps(doc, indent=2, default=_json_default, allow_nan=True) + "\n")
    return Path(path)
