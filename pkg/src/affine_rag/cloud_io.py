"""Plain-text point cloud files: one point per line, whitespace-separated coordinates."""
from __future__ import annotations

import os

import numpy as np

from .errors import EmptyFile, ParseError


def load_cloud(path: str | os.PathLike) -> np.ndarray:
    """Read a cloud file into a ``(d, n)`` array.

    Blank lines and ``#`` comments are skipped. The first data line fixes
    ``d``; any later line of a different width is a :class:`ParseError`.
    """
    rows = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if width is None:
                width = len(parts)
            elif len(parts) != width:
                raise ParseError(f"expected {width} coordinates, found {len(parts)}", lineno)
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
    if not rows:
        raise EmptyFile(f"{path}: no points")
    return np.array(rows, dtype=float).T


def write_cloud(path: str | os.PathLike, x) -> None:
    """Write a ``(d, n)`` cloud with full float precision (round-trips exactly)."""
    x = np.asarray(x, dtype=float)
    with open(path, "w", newline="\n") as fh:
        for point in x.T:
            fh.write(" ".join(repr(float(v)) for v in point) + "\n")
