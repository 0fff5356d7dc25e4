"""Plain-text 2-D matrix files.

Format: line 1 is ``<rows> <cols>``, then one line per row of
space-separated decimals written with up to 9 significant digits.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import MatrixFormatError


def read_matrix(path) -> np.ndarray:
    """Read a matrix file into a float64 array of shape (rows, cols)."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise MatrixFormatError(f"{path}: header must be '<rows> <cols>'")
        try:
            rows, cols = int(header[0]), int(header[1])
        except ValueError:
            raise MatrixFormatError(f"{path}: non-integer dimension header") from None
        if rows < 0 or cols < 0:
            raise MatrixFormatError(f"{path}: negative dimension in header")
        values = np.empty((rows, cols), dtype=np.float64)
        for r in range(rows):
            line = fh.readline()
            if not line:
                raise MatrixFormatError(f"{path}: expected {rows} rows, found {r}")
            cells = line.split()
            if len(cells) != cols:
                raise MatrixFormatError(
                    f"{path}: row {r} has {len(cells)} cells, expected {cols}"
                )
            for c, cell in enumerate(cells):
                try:
                    values[r, c] = float(cell)
                except ValueError:
                    raise MatrixFormatError(
                        f"{path}: non-numeric cell {cell!r} at row {r}"
                    ) from None
        trailing = fh.read().strip()
        if trailing:
            raise MatrixFormatError(f"{path}: trailing data after {rows} rows")
    if not np.all(np.isfinite(values)):
        raise MatrixFormatError(f"{path}: non-finite value in matrix")
    return values


def write_matrix(matrix: np.ndarray, path) -> None:
    """Write a 2-D array to a matrix file with 9 significant digits."""
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.ndim != 2:
        raise MatrixFormatError(f"matrix must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise MatrixFormatError("refusing to write non-finite values")
    rows, cols = arr.shape
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{rows} {cols}\n")
        for r in range(rows):
            fh.write(" ".join(f"{v:.9g}" for v in arr[r]) + "\n")


def check_finite(matrix: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Validate an in-memory matrix: 2-D with finite entries."""
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.ndim != 2:
        raise MatrixFormatError(f"{what} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise MatrixFormatError(f"{what} contains non-finite values")
    return arr


def is_row_stochastic(matrix: np.ndarray, tol: float = 1e-9) -> bool:
    """True when every row sums to 1 within tol and entries lie in [0, 1]."""
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.size == 0:
        return True
    if np.any(arr < 0.0) or np.any(arr > 1.0 + tol):
        return False
    sums = arr.sum(axis=1)
    return bool(np.all(np.abs(sums - 1.0) <= tol)) and math.isfinite(float(sums[0]))
