"""Sparse article x journal count matrix, its statistics and persistence.

On disk a matrix is three UTF-8 files in one directory:

``matrix.txt``
    header ``nrows ncols nnz`` then one ``row col count`` line per stored
    entry (0-based indices, row-major order).
``rows.txt`` / ``cols.txt``
    one label per line, in index order.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .lexicon import JournalLexicon, normalize_journal

log = logging.getLogger(__name__)

MATRIX_FILE = "matrix.txt"
ROWS_FILE = "rows.txt"
COLS_FILE = "cols.txt"


@dataclass(frozen=True, eq=False)
class SparseCountMatrix:
    """Positive integer counts in coordinate form, sorted row-major."""

    row_labels: tuple
    col_labels: tuple
    rows: np.ndarray
    cols: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_entries(cls, row_labels, col_labels, entries):
        """Build from a ``{(row, col): count}`` mapping; zero counts are dropped."""
        items = sorted((rc, c) for rc, c in entries.items() if c)
        rows = np.array([rc[0] for rc, _ in items], dtype=np.int64)
        cols = np.array([rc[1] for rc, _ in items], dtype=np.int64)
        counts = np.array([c for _, c in items], dtype=np.int64)
        return cls(tuple(row_labels), tuple(col_labels), rows, cols, counts)

    @property
    def shape(self):
        return len(self.row_labels), len(self.col_labels)

    @property
    def nnz(self):
        return len(self.counts)

    @property
    def entries(self):
        return {(int(r), int(c)): int(n) for r, c, n in zip(self.rows, self.cols, self.counts)}

    def labelled_entries(self):
        return {(self.row_labels[r], self.col_labels[c]): n for (r, c), n in self.entries.items()}

    def tocsr(self):
        return sp.csr_matrix(
            (self.counts.astype(np.float64), (self.rows, self.cols)), shape=self.shape
        )

    def toarray(self):
        out = np.zeros(self.shape, dtype=np.int64)
        out[self.rows, self.cols] = self.counts
        return out

    def column_sums(self):
        return np.bincount(self.cols, weights=self.counts, minlength=self.shape[1]).astype(np.int64)

    def __eq__(self, other):
        if not isinstance(other, SparseCountMatrix):
            return NotImplemented
        return (self.row_labels == other.row_labels and self.col_labels == other.col_labels
                and np.array_equal(self.rows, other.rows)
                and np.array_equal(self.cols, other.cols)
                and np.array_equal(self.counts, other.counts))


def build_matrix(citations, lexicon=None, diagnostics=None):
    """Count citations per (article, normalized journal).

    Rows and columns are numbered by first appearance. Citations whose
    journal is empty after cleaning are dropped and counted under
    ``diagnostics["empty_journal"]``.
    """
    if lexicon is None:
        lexicon = JournalLexicon()
    if diagnostics is None:
        diagnostics = Counter()
    row_index = {}
    col_index = {}
    counts = Counter()
    for cit in citations:
        journal = normalize_journal(cit.raw_journal, lexicon)
        if not journal.name:
            diagnostics["empty_journal"] += 1
            continue
        diagnostics["matched" if journal.matched else "unmatched"] += 1
        i = row_index.setdefault(cit.article_title, len(row_index))
        j = col_index.setdefault(journal.name, len(col_index))
        counts[i, j] += 1
    return SparseCountMatrix.from_entries(list(row_index), list(col_index), counts)


def matrix_stats(m):
    n_rows, n_cols = m.shape
    cells = n_rows * n_cols
    return {
        "n_rows": n_rows,
        "n_cols": n_cols,
        "nnz": m.nnz,
        "total_count": int(m.counts.sum()),
        "density": m.nnz / cells if cells else 0.0,
    }


def top_cited_journals(m, n):
    if n < 1:
        raise ValueError("n must be >= 1")
    sums = m.column_sums()
    ranked = sorted(zip(m.col_labels, sums.tolist()), key=lambda t: (-t[1], t[0]))
    return ranked[:n]


def exclude_journals(m, names, diagnostics=None):
    """Copy of ``m`` without the named columns and without rows left empty."""
    if diagnostics is None:
        diagnostics = Counter()
    present = set(m.col_labels)
    for name in names:
        if name not in present:
            diagnostics["exclude_missing"] += 1
            log.info("exclude: no column named %r", name)
    drop = set(names) & present
    if not drop:
        return m
    keep_col = np.array([c not in drop for c in m.col_labels], dtype=bool)
    mask = keep_col[m.cols] if m.nnz else np.zeros(0, dtype=bool)
    rows, cols, counts = m.rows[mask], m.cols[mask], m.counts[mask]
    keep_row = np.zeros(m.shape[0], dtype=bool)
    keep_row[rows] = True
    row_map = np.cumsum(keep_row) - 1
    col_map = np.cumsum(keep_col) - 1
    return SparseCountMatrix(
        tuple(l for l, k in zip(m.row_labels, keep_row) if k),
        tuple(l for l, k in zip(m.col_labels, keep_col) if k),
        row_map[rows].astype(np.int64),
        col_map[cols].astype(np.int64),
        counts.copy(),
    )


def _write_labels(path, labels):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for label in labels:
            if "\n" in label or "\r" in label:
                raise ValueError(f"label contains a line break: {label!r}")
            fh.write(label + "\n")


def _read_labels(path):
    with open(path, encoding="utf-8", newline="\n") as fh:
        return tuple(line[:-1] if line.endswith("\n") else line for line in fh)


def save_labels(directory, row_labels, col_labels):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    _write_labels(directory / ROWS_FILE, row_labels)
    _write_labels(directory / COLS_FILE, col_labels)


def load_labels(directory):
    directory = Path(directory)
    return _read_labels(directory / ROWS_FILE), _read_labels(directory / COLS_FILE)


def save_matrix(m, directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    n_rows, n_cols = m.shape
    with open(directory / MATRIX_FILE, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{n_rows} {n_cols} {m.nnz}\n")
        for r, c, n in zip(m.rows.tolist(), m.cols.tolist(), m.counts.tolist()):
            fh.write(f"{r} {c} {n}\n")
    save_labels(directory, m.row_labels, m.col_labels)


def load_matrix(directory):
    directory = Path(directory)
    row_labels, col_labels = load_labels(directory)
    with open(directory / MATRIX_FILE, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError(f"{directory / MATRIX_FILE}: bad header")
        n_rows, n_cols, nnz = map(int, header)
        body = np.loadtxt(fh, dtype=np.int64, ndmin=2) if nnz else np.zeros((0, 3), np.int64)
    if (n_rows, n_cols) != (len(row_labels), len(col_labels)):
        raise ValueError(f"{directory}: label files do not match shape {(n_rows, n_cols)}")
    if body.shape != (nnz, 3):
        raise ValueError(f"{directory / MATRIX_FILE}: expected {nnz} entries")
    if nnz and (body[:, 2] < 1).any():
        raise ValueError(f"{directory / MATRIX_FILE}: non-positive count")
    return SparseCountMatrix(row_labels, col_labels, body[:, 0].copy(),
                             body[:, 1].copy(), body[:, 2].copy())
