"""k-hop pattern counting over a window's transaction graph.

For each transaction the pattern at order k is the pair (m, n): m is the
number of distinct input addresses, n the number of distinct addresses
reachable in exactly k transaction hops along spend edges (the order-k
frontier).  Counts are tallied into a 20x20 grid per order; sizes above 20
are clamped into the last row/column, and transactions whose frontier is
empty at that order contribute to no cell.

Two independent routes produce the grid:

* :func:`occurrence_matrix` - sparse boolean linear algebra.  With P the
  address->tx input matrix and Q the tx->address output matrix, the order-k
  reach matrix is (QP)^(k-1) Q under the boolean semiring; n is the row
  population count.  The per-transaction row selector is an identity here,
  so rows are keyed directly by transaction index.
* :func:`occurrence_matrix_oracle` - explicit per-transaction frontier
  expansion with python sets, kept deliberately free of the matrix code.

Boolean products are used instead of integer path counts: the tally only
asks whether a reach entry is positive, and path counts blow up
combinatorially.  :func:`transition_matrix_counts` provides the
integer-count variant for small graphs so tests can confirm the two agree
after thresholding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from . import kernels
from .errors import DimensionMismatch, OrderOutOfRange
from .txgraph import TransactionGraph

CLAMP = 20
GRID_CELLS = CLAMP * CLAMP


class SubgraphShape(NamedTuple):
    m: int
    n: int


@dataclass
class SparseBoolMatrix:
    """Boolean sparse matrix in canonical CSR form (sorted, unique columns)."""

    n_rows: int
    n_cols: int
    indptr: np.ndarray
    indices: np.ndarray

    @classmethod
    def from_pairs(
        cls, n_rows: int, n_cols: int, rows, cols
    ) -> "SparseBoolMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if rows.size:
            if rows.min() < 0 or rows.max() >= n_rows:
                raise ValueError("row index out of bounds")
            if cols.min() < 0 or cols.max() >= n_cols:
                raise ValueError("column index out of bounds")
            keys = np.unique(rows * np.int64(max(n_cols, 1)) + cols)
            rows = keys // max(n_cols, 1)
            cols = keys % max(n_cols, 1)
        indptr = np.zeros(n_rows + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n_rows), out=indptr[1:])
        return cls(n_rows, n_cols, indptr, cols)

    @classmethod
    def from_entries(
        cls, n_rows: int, n_cols: int, entries: Iterable[tuple[int, int]]
    ) -> "SparseBoolMatrix":
        pairs = list(entries)
        return cls.from_pairs(
            n_rows, n_cols, [r for r, _ in pairs], [c for _, c in pairs]
        )

    @property
    def nnz(self) -> int:
        return int(self.indptr[-1])

    def row(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def row_counts(self) -> np.ndarray:
        return np.diff(self.indptr)

    def entries(self) -> set[tuple[int, int]]:
        rows = np.repeat(np.arange(self.n_rows), self.row_counts())
        return set(zip(rows.tolist(), self.indices.tolist()))

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n_rows, self.n_cols), dtype=bool)
        rows = np.repeat(np.arange(self.n_rows), self.row_counts())
        dense[rows, self.indices] = True
        return dense

    def transpose(self) -> "SparseBoolMatrix":
        rows = np.repeat(np.arange(self.n_rows, dtype=np.int64), self.row_counts())
        return SparseBoolMatrix.from_pairs(
            self.n_cols, self.n_rows, self.indices, rows
        )

    def matmul(self, other: "SparseBoolMatrix") -> "SparseBoolMatrix":
        if self.n_cols != other.n_rows:
            raise DimensionMismatch(
                f"{self.n_rows}x{self.n_cols} @ {other.n_rows}x{other.n_cols}"
            )
        indptr, indices = kernels.spgemm_bool(
            self.indptr, self.indices, other.indptr, other.indices,
            self.n_rows, other.n_cols,
        )
        return SparseBoolMatrix(self.n_rows, other.n_cols, indptr, indices)

    def __matmul__(self, other: "SparseBoolMatrix") -> "SparseBoolMatrix":
        return self.matmul(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseBoolMatrix):
            return NotImplemented
        return (
            self.n_rows == other.n_rows
            and self.n_cols == other.n_cols
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )


@dataclass
class OccurrenceMatrix:
    """20x20 grid of pattern counts at one order; cell (m, n) is 1-based."""

    order: int
    counts: np.ndarray

    def cell(self, m: int, n: int) -> int:
        return int(self.counts[m - 1, n - 1])

    def to_flat(self) -> np.ndarray:
        return self.counts.reshape(-1)

    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, OccurrenceMatrix):
            return NotImplemented
        return self.order == other.order and np.array_equal(self.counts, other.counts)


def build_P(graph: TransactionGraph) -> SparseBoolMatrix:
    """|A| x |T| input matrix: (a, t) set iff address a funds transaction t."""
    rows = graph.in_indices
    cols = np.repeat(
        np.arange(graph.n_transactions, dtype=np.int64), graph.input_set_sizes
    )
    return SparseBoolMatrix.from_pairs(
        graph.n_addresses, graph.n_transactions, rows, cols
    )


def build_Q(graph: TransactionGraph) -> SparseBoolMatrix:
    """|T| x |A| output matrix: (t, a) set iff transaction t pays address a."""
    return SparseBoolMatrix(
        graph.n_transactions,
        graph.n_addresses,
        graph.out_indptr,
        graph.out_indices,
    )


def transition_matrix(
    P: SparseBoolMatrix, Q: SparseBoolMatrix, k: int
) -> SparseBoolMatrix:
    """|T| x |A| boolean reach matrix (QP)^(k-1) Q; row t is the exact
    k-hop frontier of transaction t.  k=1 returns Q itself."""
    if k < 1:
        raise OrderOutOfRange(f"order must be >= 1, got {k}")
    m = Q
    if k > 1:
        hop = Q @ P
        for _ in range(k - 1):
            m = hop @ m
    return m


def transition_matrix_counts(
    P: SparseBoolMatrix, Q: SparseBoolMatrix, k: int, max_cells: int = 4_000_000
) -> np.ndarray:
    """Integer-count variant of the reach matrix (dense, small graphs only).

    Entry (t, a) is the number of distinct k-hop paths from t to a.  Used to
    check that boolean products agree with thresholded path counts."""
    if k < 1:
        raise OrderOutOfRange(f"order must be >= 1, got {k}")
    if Q.n_rows * Q.n_cols > max_cells or Q.n_rows * Q.n_rows > max_cells:
        raise ValueError("graph too large for dense integer-count mode")
    qd = Q.to_dense().astype(np.int64)
    pd = P.to_dense().astype(np.int64)
    m = qd
    hop = qd @ pd
    for _ in range(k - 1):
        m = hop @ m
    return m


def _tally(m_sizes: np.ndarray, n_sizes: np.ndarray) -> np.ndarray:
    """Clamp (m, n) pairs at 20 and count them; n == 0 contributes nothing."""
    grid = np.zeros((CLAMP, CLAMP), dtype=np.int64)
    mask = n_sizes > 0
    if mask.any():
        mi = np.minimum(m_sizes[mask], CLAMP) - 1
        ni = np.minimum(n_sizes[mask], CLAMP) - 1
        flat = np.bincount(mi * CLAMP + ni, minlength=GRID_CELLS)
        grid += flat.reshape(CLAMP, CLAMP)
    return grid


def occurrence_matrix(graph: TransactionGraph, k: int) -> OccurrenceMatrix:
    """Order-k pattern counts via the sparse boolean matrix route."""
    return occurrence_matrices(graph, k)[k - 1]


def occurrence_matrices(graph: TransactionGraph, max_order: int) -> list[OccurrenceMatrix]:
    """All of OC^1..OC^max_order, sharing one spend-hop product."""
    if max_order < 1:
        raise OrderOutOfRange(f"order must be >= 1, got {max_order}")
    p = build_P(graph)
    q = build_Q(graph)
    m_sizes = graph.input_set_sizes
    out = []
    reach = q
    hop = None
    for k in range(1, max_order + 1):
        if k > 1:
            if hop is None:
                hop = q @ p
            reach = hop @ reach
        out.append(OccurrenceMatrix(k, _tally(m_sizes, reach.row_counts())))
    return out


def _spender_lists(graph: TransactionGraph) -> dict[int, list[int]]:
    spenders: dict[int, list[int]] = {}
    for t in range(graph.n_transactions):
        for a in graph.input_ids(t):
            spenders.setdefault(int(a), []).append(t)
    return spenders


def subgraph_shape(graph: TransactionGraph, k: int, t: int) -> SubgraphShape:
    """(m, n) for one transaction by explicit frontier expansion (unclamped)."""
    if k < 1:
        raise OrderOutOfRange(f"order must be >= 1, got {k}")
    spenders = _spender_lists(graph)
    return _shape_by_walk(graph, spenders, k, t)


def _shape_by_walk(
    graph: TransactionGraph, spenders: dict[int, list[int]], k: int, t: int
) -> SubgraphShape:
    # Exact-depth walk semantics: level d holds every transaction reachable
    # by some length-d spend walk, so revisits are allowed (cycles from
    # address reuse stay consistent with matrix powering).
    level = {t}
    for _ in range(k - 1):
        nxt: set[int] = set()
        for u in level:
            for a in graph.output_ids(u):
                nxt.update(spenders.get(int(a), ()))
        level = nxt
        if not level:
            break
    frontier: set[int] = set()
    for u in level:
        frontier.update(int(a) for a in graph.output_ids(u))
    return SubgraphShape(m=len(graph.input_ids(t)), n=len(frontier))


def occurrence_matrix_oracle(graph: TransactionGraph, k: int) -> OccurrenceMatrix:
    """Order-k pattern counts by per-transaction traversal; same clamping
    and empty-frontier rule as the matrix route, independent code path."""
    if k < 1:
        raise OrderOutOfRange(f"order must be >= 1, got {k}")
    spenders = _spender_lists(graph)
    grid = np.zeros((CLAMP, CLAMP), dtype=np.int64)
    for t in range(graph.n_transactions):
        m, n = _shape_by_walk(graph, spenders, k, t)
        if n > 0:
            grid[min(m, CLAMP) - 1, min(n, CLAMP) - 1] += 1
    return OccurrenceMatrix(k, grid)


def feature_vector(graph: TransactionGraph, max_order: int) -> np.ndarray:
    """Concatenated row-major flattenings of OC^1..OC^max_order (400 per order)."""
    mats = occurrence_matrices(graph, max_order)
    return np.concatenate([m.to_flat() for m in mats])
