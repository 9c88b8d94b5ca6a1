"""Minimal CSR matrix container.

Document-term matrices are sparse (a one-minute segment touches a handful of
vocabulary terms), while the factor matrices stay dense. This container holds
exactly the three CSR arrays the numeric kernels consume; it is not a general
sparse-algebra type.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CsrMatrix:
    """Compressed sparse row matrix with float64 values."""

    data: np.ndarray  # (nnz,) float64
    indices: np.ndarray  # (nnz,) int64 column ids
    indptr: np.ndarray  # (n_rows + 1,) int64
    shape: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "data", np.asarray(self.data, dtype=np.float64))
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.int64))
        object.__setattr__(self, "indptr", np.asarray(self.indptr, dtype=np.int64))
        if self.indptr.shape[0] != self.shape[0] + 1:
            raise ValueError("indptr length does not match row count")
        if self.data.shape != self.indices.shape:
            raise ValueError("data and indices length mismatch")

    @property
    def nnz(self) -> int:
        return int(self.data.shape[0])

    def sum(self) -> float:
        return float(self.data.sum())

    def mean(self) -> float:
        """Mean over all entries, zeros included."""
        n, m = self.shape
        if n == 0 or m == 0:
            return 0.0
        return self.sum() / (n * m)

    def row_nnz(self) -> np.ndarray:
        return np.diff(self.indptr)

    def toarray(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.float64)
        rows = np.repeat(np.arange(self.shape[0]), self.row_nnz())
        out[rows, self.indices] = self.data
        return out

    @classmethod
    def from_rows(
        cls, rows: list[tuple[np.ndarray, np.ndarray]], n_cols: int
    ) -> "CsrMatrix":
        """Build from per-row (column ids, values) pairs; empty rows allowed."""
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        cols: list[np.ndarray] = []
        vals: list[np.ndarray] = []
        for i, (c, v) in enumerate(rows):
            indptr[i + 1] = indptr[i] + len(c)
            cols.append(np.asarray(c, dtype=np.int64))
            vals.append(np.asarray(v, dtype=np.float64))
        indices = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
        data = np.concatenate(vals) if vals else np.zeros(0, dtype=np.float64)
        return cls(data, indices, indptr, (len(rows), n_cols))

    @classmethod
    def from_dense(cls, arr: np.ndarray) -> "CsrMatrix":
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("expected a 2-d array")
        rows = []
        for i in range(arr.shape[0]):
            (cols,) = np.nonzero(arr[i])
            rows.append((cols, arr[i, cols]))
        return cls.from_rows(rows, arr.shape[1])
