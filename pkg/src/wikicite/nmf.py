"""Euclidean-loss NMF with Lee-Seung multiplicative updates.

``X ~= W H`` where ``W`` (articles x k) holds hub loadings and ``H``
(k x journals) holds authority loadings. ``X`` stays sparse throughout:
the dense ``W @ H`` product is never formed.

The sparse products run through :mod:`wikicite._kernels` (numba when
available, numpy otherwise).
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .errors import EmptyMatrix, NmfError, RankTooLarge, ShapeMismatch
from .matrix import SparseCountMatrix, load_labels, save_labels

log = logging.getLogger(__name__)

EPS = 1e-12
DEFAULT_ITERATIONS = 50_000


class CsrView(NamedTuple):
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    shape: tuple

    @property
    def nnz(self):
        return len(self.data)


def as_csr(X):
    """CSR arrays for a SparseCountMatrix, scipy sparse matrix or dense array."""
    if isinstance(X, CsrView):
        return X
    if isinstance(X, SparseCountMatrix):
        X = X.tocsr()
    elif not sp.issparse(X):
        X = sp.csr_matrix(np.asarray(X, dtype=np.float64))
    X = sp.csr_matrix(X, dtype=np.float64)
    X.sum_duplicates()
    X.sort_indices()
    return CsrView(X.indptr.astype(np.int64), X.indices.astype(np.int64),
                   np.ascontiguousarray(X.data), X.shape)


@dataclass(eq=False)
class NmfModel:
    k: int
    W: np.ndarray
    H: np.ndarray
    iterations_run: int
    final_error: float
    seed: int
    row_labels: tuple = None
    col_labels: tuple = None

    def __post_init__(self):
        if self.W.shape[1] != self.k or self.H.shape[0] != self.k:
            raise ShapeMismatch(f"factor shapes {self.W.shape}, {self.H.shape} do not fit k={self.k}")


def _check_shapes(csr, W, H):
    n_rows, n_cols = csr.shape
    if W.ndim != 2 or H.ndim != 2 or W.shape[0] != n_rows or H.shape[1] != n_cols \
            or W.shape[1] != H.shape[0]:
        raise ShapeMismatch(f"X{csr.shape} vs W{W.shape} H{H.shape}")


def _ratio(num, den, eps):
    if eps > 0:
        return num / (den + eps)
    # eps == 0: entries with a zero denominator collapse to zero
    return np.divide(num, den, out=np.zeros_like(num), where=den > 0)


def _step(csr, W, H, eps, kern):
    indptr, indices, data, (_, n_cols) = csr
    WtX = kern.csr_rmatmul(indptr, indices, data, W, n_cols).T
    H = H * _ratio(WtX, (W.T @ W) @ H, eps)
    XHt = kern.csr_matmul(indptr, indices, data, np.ascontiguousarray(H.T))
    W = W * _ratio(XHt, W @ (H @ H.T), eps)
    return W, H


def multiplicative_step(X, W, H, eps=EPS, backend=None):
    """One sweep: update ``H`` from ``W``, then ``W`` from the new ``H``.

    Returns new arrays ``(W', H')``; inputs are not modified.
    """
    csr = as_csr(X)
    W = np.asarray(W, dtype=np.float64)
    H = np.asarray(H, dtype=np.float64)
    _check_shapes(csr, W, H)
    return _step(csr, W, H, eps, backend or _kernels.active)


def _error(csr, W, H, kern):
    indptr, indices, data, (n_rows, n_cols) = csr
    resid_nz, wh_nz = kern.csr_residual_terms(indptr, indices, data, W,
                                              np.ascontiguousarray(H.T))
    if csr.nnz == n_rows * n_cols:
        off = 0.0
    else:
        # squared reconstruction over the structural zeros
        off = float(np.sum((W.T @ W) * (H @ H.T))) - wh_nz
    return float(np.sqrt(max(resid_nz + off, 0.0)))


def reconstruction_error(X, W, H, backend=None):
    """Frobenius norm of ``X - W H`` without forming ``W H``.

    Stored entries contribute ``(x - wh)^2`` directly; the remaining cells
    contribute ``trace(W'W HH') - sum_nz wh^2``.
    """
    csr = as_csr(X)
    W = np.asarray(W, dtype=np.float64)
    H = np.asarray(H, dtype=np.float64)
    _check_shapes(csr, W, H)
    return _error(csr, W, H, backend or _kernels.active)


def init_factors(n_rows, n_cols, k, seed):
    """Uniform (0, 1] draws from PCG64(seed): W first, then H."""
    rng = np.random.default_rng(seed)
    W = 1.0 - rng.random((n_rows, k))
    H = 1.0 - rng.random((k, n_cols))
    return W, H


def factorize(X, k, iterations=DEFAULT_ITERATIONS, seed=0, eps=EPS, tol=None,
              check_every=100, backend=None):
    """Fit a rank-``k`` NMF with a fixed number of update sweeps.

    With ``tol`` set, stops early once the relative error improvement over
    ``check_every`` sweeps falls below it. Deterministic for fixed inputs.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if k < 1:
        raise ValueError("k must be >= 1")
    csr = as_csr(X)
    if csr.nnz == 0:
        raise EmptyMatrix("matrix has no stored entries")
    n_rows, n_cols = csr.shape
    if k > min(n_rows, n_cols):
        raise RankTooLarge(f"k={k} exceeds min{csr.shape}")
    kern = backend or _kernels.active
    W, H = init_factors(n_rows, n_cols, k, seed)
    prev = _error(csr, W, H, kern) if tol is not None else None
    done = 0
    while done < iterations:
        W, H = _step(csr, W, H, eps, kern)
        done += 1
        if tol is not None and done % check_every == 0:
            err = _error(csr, W, H, kern)
            if prev - err <= tol * max(prev, np.finfo(float).tiny):
                break
            prev = err
    labels = (X.row_labels, X.col_labels) if isinstance(X, SparseCountMatrix) else (None, None)
    return NmfModel(k, W, H, done, _error(csr, W, H, kern), seed, *labels)


def sweep_model_sizes(X, k_range, iterations=DEFAULT_ITERATIONS, seed=0, jobs=1, **kwargs):
    """One independent :func:`factorize` per k, each seeded with ``seed + k``.

    ``k_range`` is an inclusive ``(k_min, k_max)`` pair or any iterable of
    ints. Results come back ordered by k regardless of ``jobs``.
    """
    if isinstance(k_range, tuple) and len(k_range) == 2:
        ks = list(range(k_range[0], k_range[1] + 1))
    else:
        ks = list(k_range)
    csr = as_csr(X)

    def run(k):
        try:
            model = factorize(csr, k, iterations, seed + k, **kwargs)
        except NmfError as exc:
            exc.k = k
            raise
        if isinstance(X, SparseCountMatrix):
            model.row_labels, model.col_labels = X.row_labels, X.col_labels
        log.info("k=%d error=%.6g", k, model.final_error)
        return model

    if jobs > 1 and len(ks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run, ks))
    return [run(k) for k in ks]


def top_loadings(model, cluster, axis, n, row_labels=None, col_labels=None):
    """Top ``n`` (label, loading) pairs of one cluster, ties by ascending label.

    ``axis="articles"`` ranks hub articles (a column of W),
    ``axis="journals"`` ranks authoritative journals (a row of H).
    """
    if not 0 <= cluster < model.k:
        raise IndexError(f"cluster {cluster} out of range for k={model.k}")
    if axis == "articles":
        values = model.W[:, cluster]
        labels = row_labels if row_labels is not None else model.row_labels
    elif axis == "journals":
        values = model.H[cluster, :]
        labels = col_labels if col_labels is not None else model.col_labels
    else:
        raise ValueError(f"axis must be 'articles' or 'journals', not {axis!r}")
    if labels is None:
        labels = [str(i) for i in range(len(values))]
    ranked = sorted(zip(labels, values.tolist()), key=lambda t: (-t[1], t[0]))
    return ranked[:n]


# -- persistence ---------------------------------------------------------------

def model_dirname(k):
    return f"k{k:02d}"


def _write_f64(path, arr):
    np.ascontiguousarray(arr, dtype="<f8").tofile(path)


def save_model(model, directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    _write_f64(directory / "W.f64", model.W)
    _write_f64(directory / "H.f64", model.H)
    header = {
        "k": model.k,
        "W_shape": list(model.W.shape),
        "H_shape": list(model.H.shape),
        "seed": model.seed,
        "iterations": model.iterations_run,
        "final_error": model.final_error,
        "dtype": "<f8",
    }
    (directory / "model.json").write_text(json.dumps(header, indent=2, sort_keys=True) + "\n",
                                          encoding="utf-8")
    if model.row_labels is not None:
        save_labels(directory, model.row_labels, model.col_labels)


def load_model(directory):
    directory = Path(directory)
    header = json.loads((directory / "model.json").read_text(encoding="utf-8"))
    W = np.fromfile(directory / "W.f64", dtype="<f8").reshape(header["W_shape"])
    H = np.fromfile(directory / "H.f64", dtype="<f8").reshape(header["H_shape"])
    labels = (None, None)
    if (directory / "rows.txt").exists():
        labels = load_labels(directory)
    return NmfModel(header["k"], W.astype(np.float64), H.astype(np.float64),
                    header["iterations"], header["final_error"], header["seed"], *labels)


def save_models(models, directory):
    directory = Path(directory)
    for model in models:
        save_model(model, directory / model_dirname(model.k))


def load_models(directory):
    directory = Path(directory)
    models = [load_model(d) for d in sorted(directory.iterdir())
              if d.is_dir() and (d / "model.json").exists()]
    return sorted(models, key=lambda m: m.k)
