"""Nonnegative matrix factorization by multiplicative updates.

V (documents x terms, sparse, nonnegative) is approximated as W @ H with
W, H >= 0 by alternately scaling each factor:

    W <- W * (V H^T) / (W H H^T + eps)
    H <- H * (W^T V) / (W^T W H + eps)

Each step is non-increasing in the objective 0.5 * ||V - WH||_F^2 and keeps
both factors nonnegative. Inference on new documents runs the W-update only,
with H frozen, so new rows are expressed in the trained topic basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericalError
from .kernels import csr_inner, csr_matmul, csr_t_matmul
from .rng import philox
from .sparse import CsrMatrix
from .textprep import TfidfMatrix

EPS = 1e-12


@dataclass(frozen=True)
class NmfConfig:
    n_topics: int
    max_iter: int = 200
    tol: float = 1e-4
    seed: int = 0
    init: str = "nndsvda"

    def __post_init__(self):
        if self.n_topics < 1:
            raise ValueError("n_topics must be >= 1")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.tol < 0:
            raise ValueError("tol must be >= 0")
        if self.init not in ("nndsvda", "seeded-random"):
            raise ValueError(f"unknown init '{self.init}'")


@dataclass(frozen=True)
class NmfResult:
    w: np.ndarray  # documents x topics
    h: np.ndarray  # topics x terms
    trace: tuple[float, ...]  # objective before iterating, then per iteration
    row_ids: tuple[str, ...] = ()


def as_csr(v) -> tuple[CsrMatrix, tuple[str, ...]]:
    """Accept a TfidfMatrix, CsrMatrix, or dense array; return (csr, row ids)."""
    if isinstance(v, TfidfMatrix):
        return v.matrix, v.row_ids
    if isinstance(v, CsrMatrix):
        return v, ()
    arr = np.asarray(v, dtype=np.float64)
    if np.any(arr < 0):
        raise DataError("input matrix has negative entries")
    return CsrMatrix.from_dense(arr), ()


def objective(v, w: np.ndarray, h: np.ndarray) -> float:
    """0.5 * ||V - WH||_F^2 without forming WH densely.

    Expanded as 0.5 * (||V||^2 - 2<V, WH> + ||WH||^2); the last term is
    sum((W^T W) * (H H^T)) elementwise, which never leaves factor scale.
    """
    csr, _ = as_csr(v)
    w = np.asarray(w, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    if w.shape[0] != csr.shape[0] or h.shape[1] != csr.shape[1] or w.shape[1] != h.shape[0]:
        raise ValueError(
            f"shapes not conformable: V {csr.shape}, W {w.shape}, H {h.shape}"
        )
    v_sq = float(np.dot(csr.data, csr.data))
    cross = csr_inner(csr, w, h)
    wh_sq = float(np.sum((w.T @ w) * (h @ h.T)))
    return max(0.5 * (v_sq - 2.0 * cross + wh_sq), 0.0)


def update_w(v: CsrMatrix, w: np.ndarray, h: np.ndarray) -> np.ndarray:
    numer = csr_matmul(v, h.T)
    denom = w @ (h @ h.T) + EPS
    return w * numer / denom


def update_h(v: CsrMatrix, w: np.ndarray, h: np.ndarray) -> np.ndarray:
    numer = csr_t_matmul(v, w).T
    denom = (w.T @ w) @ h + EPS
    return h * numer / denom


def init_factors(v, cfg: NmfConfig) -> tuple[np.ndarray, np.ndarray]:
    """Starting factors: deterministic SVD-based or seeded uniform.

    "nndsvda" splits each singular pair into its nonnegative parts and fills
    the zeros with the matrix mean, so multiplicative updates (which cannot
    revive an exact zero) start strictly positive. "seeded-random" draws
    uniform entries scaled by sqrt(mean(V) / n_topics) so W0 @ H0 matches V's
    magnitude on average.
    """
    csr, _ = as_csr(v)
    _check_trainable(csr, cfg)
    if cfg.init == "seeded-random":
        return _random_factors(csr, cfg.n_topics, cfg.seed, "init")
    return _nndsvda(csr, cfg.n_topics)


def _check_trainable(csr: CsrMatrix, cfg: NmfConfig) -> None:
    if csr.nnz == 0:
        raise DataError("cannot factorize an all-zero matrix")
    if cfg.n_topics > min(csr.shape):
        raise DataError(
            f"n_topics={cfg.n_topics} exceeds min(matrix shape)={min(csr.shape)}"
        )


def _random_factors(
    csr: CsrMatrix, t: int, seed: int, stream: str
) -> tuple[np.ndarray, np.ndarray]:
    rng = philox(seed, "nmf", stream)
    scale = np.sqrt(csr.mean() / t)
    w = rng.random((csr.shape[0], t)) * scale
    h = rng.random((t, csr.shape[1])) * scale
    return w, h


def _nndsvda(csr: CsrMatrix, t: int) -> tuple[np.ndarray, np.ndarray]:
    # Dense SVD is fine here: fitting matrices are at most a few thousand rows.
    dense = csr.toarray()
    u, s, vt = np.linalg.svd(dense, full_matrices=False)
    n, m = csr.shape
    w = np.zeros((n, t))
    h = np.zeros((t, m))
    w[:, 0] = np.sqrt(s[0]) * np.abs(u[:, 0])
    h[0] = np.sqrt(s[0]) * np.abs(vt[0])
    for j in range(1, t):
        x, y = u[:, j], vt[j]
        xp, xn = np.maximum(x, 0), np.maximum(-x, 0)
        yp, yn = np.maximum(y, 0), np.maximum(-y, 0)
        mp = np.linalg.norm(xp) * np.linalg.norm(yp)
        mn = np.linalg.norm(xn) * np.linalg.norm(yn)
        if mp >= mn:
            sigma, xu, yu = mp, xp, yp
        else:
            sigma, xu, yu = mn, xn, yn
        if sigma == 0:
            continue  # fully degenerate direction; the mean fill covers it
        w[:, j] = np.sqrt(s[j] * sigma) * xu / np.linalg.norm(xu)
        h[j] = np.sqrt(s[j] * sigma) * yu / np.linalg.norm(yu)
    fill = csr.mean()
    w[w == 0] = fill
    h[h == 0] = fill
    return w, h


def nmf_train(
    v,
    cfg: NmfConfig,
    w0: np.ndarray | None = None,
    h0: np.ndarray | None = None,
) -> NmfResult:
    """Alternate multiplicative updates until max_iter or the improvement,
    relative to the starting objective, falls below tol.

    The trace records the objective at initialization and after every
    iteration; it is non-increasing up to tiny float slack. Explicit w0/h0
    override the configured initialization (handy for fixed-point checks).
    """
    csr, row_ids = as_csr(v)
    _check_trainable(csr, cfg)
    if w0 is None or h0 is None:
        w, h = init_factors(csr, cfg)
    else:
        w = np.array(w0, dtype=np.float64)
        h = np.array(h0, dtype=np.float64)
    trace = [objective(csr, w, h)]
    ref = trace[0] if trace[0] > 0 else 1.0
    for it in range(1, cfg.max_iter + 1):
        w = update_w(csr, w, h)
        h = update_h(csr, w, h)
        obj = objective(csr, w, h)
        if not np.isfinite(obj):
            raise NumericalError(f"objective became non-finite at iteration {it}")
        trace.append(obj)
        if cfg.tol > 0 and (trace[-2] - obj) / ref < cfg.tol:
            break
    if np.any(h.sum(axis=1) == 0):
        dead = [int(i) for i in np.flatnonzero(h.sum(axis=1) == 0)]
        raise NumericalError(f"training produced all-zero topic rows {dead}")
    return NmfResult(w, h, tuple(trace), row_ids)


def nmf_transform(vp, h: np.ndarray, cfg: NmfConfig) -> NmfResult:
    """Infer document-topic rows for new data against a frozen H.

    Only the W-update runs; H is read, never written. W starts from the
    seeded uniform draw, so repeated calls with one config reproduce the
    same W exactly.
    """
    csr, row_ids = as_csr(vp)
    h = np.asarray(h, dtype=np.float64)
    if h.shape[1] != csr.shape[1]:
        raise DataError(
            f"matrix has {csr.shape[1]} terms but the model has {h.shape[1]}"
        )
    w, _ = _random_factors(csr, h.shape[0], cfg.seed, "transform")
    trace = [objective(csr, w, h)]
    ref = trace[0] if trace[0] > 0 else 1.0
    for it in range(1, cfg.max_iter + 1):
        w = update_w(csr, w, h)
        obj = objective(csr, w, h)
        if not np.isfinite(obj):
            raise NumericalError(f"objective became non-finite at iteration {it}")
        trace.append(obj)
        if cfg.tol > 0 and (trace[-2] - obj) / ref < cfg.tol:
            break
    return NmfResult(w, h, tuple(trace), row_ids)
