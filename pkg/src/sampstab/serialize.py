"""JSON helpers: matrices are row-major nested lists, complex entries [re, im]."""

from __future__ import annotations

import json

import numpy as np


def scalar_to_json(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def matrix_to_json(m: np.ndarray) -> list:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return [[scalar_to_json(z) for z in row] for row in m]


def entry_from_json(e) -> complex:
    """One matrix entry: a plain number or an [re, im] pair."""
    if isinstance(e, (list, tuple)):
        if len(e) != 2 or any(isinstance(x, (list, tuple)) for x in e):
            raise ValueError(f"complex entry must be [re, im], got {e!r}")
        return complex(float(e[0]), float(e[1]))
    return complex(float(e))


def matrix_from_json(obj) -> np.ndarray:
    """Read a row-major nested list; rows are lists of entries."""
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise ValueError("matrix must be a non-empty list of rows")
    rows = [[entry_from_json(e) for e in row] for row in obj]
    if len({len(r) for r in rows}) != 1:
        raise ValueError("matrix rows have unequal lengths")
    return np.array(rows)


def vector_from_json(obj) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ValueError("vector must be a non-empty list")
    return np.array([entry_from_json(e) for e in obj])


def dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
