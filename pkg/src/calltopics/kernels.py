"""Sparse-dense matrix kernels behind the factorization loop.

All three products touch every nonzero of the document-term matrix once per
iteration, so they dominate training time. Each kernel exists twice: a serial
numba version compiled on first use, and a vectorized numpy version. The numpy
path is used when numba is missing or when CALLTOPICS_DISABLE_NUMBA is set to
a non-empty value. Both paths produce identical results; the benchmark in
benchmarks/bench_kernels.py compares their speed.

The numba kernels are deliberately serial (no prange): reruns must be
bit-reproducible, and parallel reductions reorder float additions.
"""

from __future__ import annotations

import os

import numpy as np

from .sparse import CsrMatrix

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag instead
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def numba_enabled() -> bool:
    return HAS_NUMBA and not os.environ.get("CALLTOPICS_DISABLE_NUMBA")


# ---------------------------------------------------------------------------
# numba path


@njit(cache=True)
def _csr_matmul_nb(data, indices, indptr, n_rows, dense):
    out = np.zeros((n_rows, dense.shape[1]))
    for i in range(n_rows):
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            v = data[p]
            for k in range(dense.shape[1]):
                out[i, k] += v * dense[j, k]
    return out


@njit(cache=True)
def _csr_t_matmul_nb(data, indices, indptr, n_rows, n_cols, dense):
    out = np.zeros((n_cols, dense.shape[1]))
    for i in range(n_rows):
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            v = data[p]
            for k in range(dense.shape[1]):
                out[j, k] += v * dense[i, k]
    return out


@njit(cache=True)
def _csr_inner_nb(data, indices, indptr, n_rows, w, h):
    total = 0.0
    for i in range(n_rows):
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            acc = 0.0
            for k in range(w.shape[1]):
                acc += w[i, k] * h[k, j]
            total += data[p] * acc
    return total


# ---------------------------------------------------------------------------
# numpy path


def _csr_matmul_np(v: CsrMatrix, dense: np.ndarray) -> np.ndarray:
    out = np.zeros((v.shape[0], dense.shape[1]))
    rows = np.repeat(np.arange(v.shape[0]), v.row_nnz())
    np.add.at(out, rows, v.data[:, None] * dense[v.indices])
    return out


def _csr_t_matmul_np(v: CsrMatrix, dense: np.ndarray) -> np.ndarray:
    out = np.zeros((v.shape[1], dense.shape[1]))
    rows = np.repeat(np.arange(v.shape[0]), v.row_nnz())
    np.add.at(out, v.indices, v.data[:, None] * dense[rows])
    return out


def _csr_inner_np(v: CsrMatrix, w: np.ndarray, h: np.ndarray) -> float:
    rows = np.repeat(np.arange(v.shape[0]), v.row_nnz())
    approx = np.einsum("ik,ki->i", w[rows], h[:, v.indices])
    return float(np.dot(v.data, approx))


# ---------------------------------------------------------------------------
# dispatch


def csr_matmul(v: CsrMatrix, dense: np.ndarray) -> np.ndarray:
    """V @ dense, where dense has shape (n_cols, k)."""
    dense = np.ascontiguousarray(dense, dtype=np.float64)
    if numba_enabled():
        return _csr_matmul_nb(v.data, v.indices, v.indptr, v.shape[0], dense)
    return _csr_matmul_np(v, dense)


def csr_t_matmul(v: CsrMatrix, dense: np.ndarray) -> np.ndarray:
    """V.T @ dense, where dense has shape (n_rows, k)."""
    dense = np.ascontiguousarray(dense, dtype=np.float64)
    if numba_enabled():
        return _csr_t_matmul_nb(
            v.data, v.indices, v.indptr, v.shape[0], v.shape[1], dense
        )
    return _csr_t_matmul_np(v, dense)


def csr_inner(v: CsrMatrix, w: np.ndarray, h: np.ndarray) -> float:
    """sum over nonzeros of V_ij * (W @ H)_ij."""
    w = np.ascontiguousarray(w, dtype=np.float64)
    h = np.ascontiguousarray(h, dtype=np.float64)
    if numba_enabled():
        return _csr_inner_nb(v.data, v.indices, v.indptr, v.shape[0], w, h)
    return _csr_inner_np(v, w, h)


def warmup() -> None:
    """Trigger JIT compilation on a tiny input so timed runs measure math."""
    if not numba_enabled():
        return
    tiny = CsrMatrix.from_dense(np.array([[1.0, 0.0], [0.0, 2.0]]))
    d = np.ones((2, 2))
    _csr_matmul_nb(tiny.data, tiny.indices, tiny.indptr, 2, d)
    _csr_t_matmul_nb(tiny.data, tiny.indices, tiny.indptr, 2, 2, d)
    _csr_inner_nb(tiny.data, tiny.indices, tiny.indptr, 2, d, d)
