"""Sparse-times-dense kernels behind the multiplicative NMF updates.

Two interchangeable backends share one signature per kernel:

* ``numba`` -- explicit CSR loops compiled with ``@njit``; accumulation is
  row-major (row ``i`` ascending, then stored column order), so results are
  bit-reproducible.
* ``numpy`` -- the same products through ``scipy.sparse``.

The numba backend is used when numba imports and ``WIKICITE_DISABLE_NUMBA``
is unset (or ``0``/``false``). ``BACKEND`` names the active one; both remain
importable as ``numba_backend`` / ``numpy_backend`` for benchmarks and tests.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np
import scipy.sparse as sp

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

ENV_FLAG = "WIKICITE_DISABLE_NUMBA"


def _disabled_by_env():
    return os.environ.get(ENV_FLAG, "").strip().lower() not in ("", "0", "false", "no", "off")


# -- numpy path --------------------------------------------------------------

def _np_csr(indptr, indices, data, n_cols):
    return sp.csr_matrix((data, indices, indptr), shape=(len(indptr) - 1, n_cols))


def np_csr_matmul(indptr, indices, data, B):
    """X @ B for CSR ``X`` (n_rows x n_cols) and dense ``B`` (n_cols x k)."""
    X = _np_csr(indptr, indices, data, B.shape[0])
    return np.ascontiguousarray(X @ B)


def np_csr_rmatmul(indptr, indices, data, A, n_cols):
    """X.T @ A for dense ``A`` (n_rows x k); returns (n_cols x k)."""
    X = _np_csr(indptr, indices, data, n_cols)
    return np.ascontiguousarray(X.T @ A)


def np_csr_residual_terms(indptr, indices, data, W, HT):
    """Sums over stored entries: (sum (x - wh)^2, sum wh^2)."""
    rows = np.repeat(np.arange(len(indptr) - 1), np.diff(indptr))
    wh = np.einsum("ik,ik->i", W[rows], HT[indices])
    return float(np.sum((data - wh) ** 2)), float(np.sum(wh * wh))


numpy_backend = SimpleNamespace(
    name="numpy",
    csr_matmul=np_csr_matmul,
    csr_rmatmul=np_csr_rmatmul,
    csr_residual_terms=np_csr_residual_terms,
)


# -- numba path --------------------------------------------------------------

def _nb_csr_matmul(indptr, indices, data, B):
    n_rows = indptr.shape[0] - 1
    k = B.shape[1]
    out = np.zeros((n_rows, k))
    for i in range(n_rows):
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            x = data[p]
            for c in range(k):
                out[i, c] += x * B[j, c]
    return out


def _nb_csr_rmatmul(indptr, indices, data, A, n_cols):
    n_rows = indptr.shape[0] - 1
    k = A.shape[1]
    out = np.zeros((n_cols, k))
    for i in range(n_rows):
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            x = data[p]
            for c in range(k):
                out[j, c] += x * A[i, c]
    return out


def _nb_csr_residual_terms(indptr, indices, data, W, HT):
    n_rows = indptr.shape[0] - 1
    k = W.shape[1]
    resid = 0.0
    wh_sq = 0.0
    for i in range(n_rows):
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            wh = 0.0
            for c in range(k):
                wh += W[i, c] * HT[j, c]
            d = data[p] - wh
            resid += d * d
            wh_sq += wh * wh
    return resid, wh_sq


if numba is not None:
    _jit = numba.njit(cache=False, nogil=True)
    numba_backend = SimpleNamespace(
        name="numba",
        csr_matmul=_jit(_nb_csr_matmul),
        csr_rmatmul=_jit(_nb_csr_rmatmul),
        csr_residual_terms=_jit(_nb_csr_residual_terms),
    )
else:  # pragma: no cover
    numba_backend = None

active = numpy_backend if numba_backend is None or _disabled_by_env() else numba_backend
BACKEND = active.name
