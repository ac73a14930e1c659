"""Sparse undirected graphs and the matrix operators derived from them.

A graph lives in compressed sparse row form and is the single source of
structure for everything downstream: Laplacians, the incidence matrix,
Dirichlet energy, and the hop aggregators used for precomputed
convolutions. Containers are frozen dataclasses whose numpy buffers are
marked read-only, so instances can be shared freely across threads.

Conventions:
    - both (i, j, w) and (j, i, w) are stored for every undirected edge
    - column indices are sorted within each row, no duplicate entries
    - weights are nonnegative float64
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

# A graph signal is a plain dense array: one row per vertex, one column per
# channel. 1-D arrays are accepted wherever a single channel suffices.
GraphSignal = np.ndarray


class IsolatedVertexError(ValueError):
    """A normalized operator needs strictly positive degrees and a vertex has none."""


class DensityBudgetError(RuntimeError):
    """An adjacency power grew past its allowed number of nonzeros."""


class LaplacianKind(Enum):
    """Which Laplacian-style operator to build from the adjacency structure.

    COMBINATORIAL        D - A
    SYMMETRIC_NORMALIZED I - D^{-1/2} A D^{-1/2}
    RENORMALIZED         D'^{-1/2} A' D'^{-1/2} with A' = A + I and D' its degrees
    """

    COMBINATORIAL = "combinatorial"
    SYMMETRIC_NORMALIZED = "symmetric_normalized"
    RENORMALIZED = "renormalized"


def _freeze(*arrays: np.ndarray) -> None:
    for a in arrays:
        a.flags.writeable = False


def _canonical_csr(mat) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (row_offsets, col_indices, values) in canonical CSR form.

    Canonical means: duplicates summed, explicit zeros dropped, column
    indices sorted within each row.
    """
    mat = sp.csr_matrix(mat)
    mat.sum_duplicates()
    mat.eliminate_zeros()
    mat.sort_indices()
    return (
        mat.indptr.astype(np.int64),
        mat.indices.astype(np.int64),
        np.array(mat.data, dtype=np.float64),
    )


def _wrap_csr(n: int, row_offsets, col_indices, values) -> sp.csr_matrix:
    """Wrap canonical CSR buffers without copying or re-sorting them."""
    mat = sp.csr_matrix((values, col_indices, row_offsets), shape=(n, n), copy=False)
    mat.has_sorted_indices = True
    mat.has_canonical_format = True
    return mat


def _entry_rows(row_offsets: np.ndarray) -> np.ndarray:
    """Row index of every stored entry, aligned with col_indices/values."""
    n = row_offsets.size - 1
    return np.repeat(np.arange(n, dtype=np.int64), np.diff(row_offsets))


@dataclass(frozen=True)
class SparseGraph:
    """Undirected weighted graph in canonical CSR form."""

    n_vertices: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray
    has_self_loops: bool

    def to_csr(self) -> sp.csr_matrix:
        """Adjacency matrix as a scipy CSR matrix (buffers shared, not copied)."""
        return _wrap_csr(self.n_vertices, self.row_offsets, self.col_indices, self.values)

    @property
    def n_edges(self) -> int:
        """Number of undirected edges; a self-loop counts once."""
        rows = _entry_rows(self.row_offsets)
        loops = int(np.count_nonzero(rows == self.col_indices))
        return loops + (self.values.size - loops) // 2


@dataclass(frozen=True)
class SparseSymMatrix:
    """Symmetric sparse matrix in canonical CSR form (Laplacians, aggregators)."""

    n: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray

    def to_csr(self) -> sp.csr_matrix:
        return _wrap_csr(self.n, self.row_offsets, self.col_indices, self.values)

    def to_dense(self) -> np.ndarray:
        return self.to_csr().toarray()


@dataclass(frozen=True)
class IncidenceMatrix:
    """Signed vertex-by-edge gradient matrix with a fixed orientation.

    Column e carries +magnitude[e] at tail[e] and -magnitude[e] at head[e],
    where magnitude is the square root of the edge weight and the
    orientation is tail < head in vertex order.
    """

    n_vertices: int
    n_edges: int
    tail: np.ndarray
    head: np.ndarray
    magnitude: np.ndarray

    def to_csr(self) -> sp.csr_matrix:
        rows = np.concatenate([self.tail, self.head])
        cols = np.tile(np.arange(self.n_edges, dtype=np.int64), 2)
        data = np.concatenate([self.magnitude, -self.magnitude])
        return sp.coo_matrix(
            (data, (rows, cols)), shape=(self.n_vertices, self.n_edges)
        ).tocsr()

    def to_dense(self) -> np.ndarray:
        return self.to_csr().toarray()


def _sym_from_scipy(n: int, mat) -> SparseSymMatrix:
    row_offsets, col_indices, values = _canonical_csr(mat)
    _freeze(row_offsets, col_indices, values)
    return SparseSymMatrix(n, row_offsets, col_indices, values)


def build_graph(
    edges: Iterable[Tuple[int, int, float]],
    n: int,
    add_self_loops: bool = False,
) -> SparseGraph:
    """Assemble an undirected graph from (u, v, weight) triples.

    The edge list is interpreted as undirected: an edge given in both
    orientations is the same edge (weights must then agree up to the
    elementwise maximum), while repeated entries in the same orientation
    have their weights summed. With add_self_loops, unit weight is added
    to every diagonal entry.
    """
    if n < 1:
        raise ValueError("graph needs at least one vertex")
    edge_list = list(edges)
    if edge_list:
        u = np.fromiter((e[0] for e in edge_list), dtype=np.int64, count=len(edge_list))
        v = np.fromiter((e[1] for e in edge_list), dtype=np.int64, count=len(edge_list))
        w = np.fromiter((e[2] for e in edge_list), dtype=np.float64, count=len(edge_list))
        if u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n:
            raise ValueError(f"edge endpoint out of range [0, {n})")
        if not np.all(np.isfinite(w)):
            raise ValueError("edge weights must be finite")
        if w.min() < 0:
            raise ValueError("edge weights must be nonnegative")
        directed = sp.coo_matrix((w, (u, v)), shape=(n, n)).tocsr()
        directed.sum_duplicates()
        adj = directed.maximum(directed.T)
    else:
        adj = sp.csr_matrix((n, n), dtype=np.float64)
    if add_self_loops:
        adj = adj + sp.identity(n, format="csr")
    row_offsets, col_indices, values = _canonical_csr(adj)
    rows = _entry_rows(row_offsets)
    has_loops = bool(np.any(rows == col_indices))
    _freeze(row_offsets, col_indices, values)
    return SparseGraph(n, row_offsets, col_indices, values, has_loops)


def degree_vector(g: SparseGraph) -> np.ndarray:
    """Weighted degree of every vertex (row sums of the adjacency matrix)."""
    return np.asarray(g.to_csr().sum(axis=1)).ravel()


def _scale_symmetric(mat: sp.csr_matrix, scale: np.ndarray) -> sp.csr_matrix:
    """Compute diag(scale) @ mat @ diag(scale) with exactly symmetric output.

    The per-entry factor is evaluated as (scale[i] * scale[j]) * a_ij so the
    (i, j) and (j, i) results are bitwise identical.
    """
    coo = mat.tocoo()
    data = (scale[coo.row] * scale[coo.col]) * coo.data
    return sp.csr_matrix((data, (coo.row, coo.col)), shape=mat.shape)


def laplacian(g: SparseGraph, kind: LaplacianKind) -> SparseSymMatrix:
    """Build the requested Laplacian-style operator for the graph.

    The normalized kinds require strictly positive degrees; vertices with no
    incident weight raise IsolatedVertexError instead of being silently
    zeroed (silent zeros would break the spectral range guarantees).
    """
    n = g.n_vertices
    adj = g.to_csr()
    if kind is LaplacianKind.COMBINATORIAL:
        deg = degree_vector(g)
        return _sym_from_scipy(n, sp.diags(deg, format="csr") - adj)
    if kind is LaplacianKind.SYMMETRIC_NORMALIZED:
        deg = degree_vector(g)
        bad = np.flatnonzero(deg <= 0)
        if bad.size:
            raise IsolatedVertexError(
                f"vertices {bad[:8].tolist()} have zero degree; "
                "the symmetric normalized Laplacian is undefined"
            )
        scaled = _scale_symmetric(adj, 1.0 / np.sqrt(deg))
        return _sym_from_scipy(n, sp.identity(n, format="csr") - scaled)
    if kind is LaplacianKind.RENORMALIZED:
        adj_loop = (adj + sp.identity(n, format="csr")).tocsr()
        deg = np.asarray(adj_loop.sum(axis=1)).ravel()
        return _sym_from_scipy(n, _scale_symmetric(adj_loop, 1.0 / np.sqrt(deg)))
    raise ValueError(f"unknown Laplacian kind: {kind!r}")


def incidence_matrix(g: SparseGraph) -> IncidenceMatrix:
    """Signed gradient matrix K with K @ K.T equal to the combinatorial Laplacian.

    Each undirected edge {u, v} with weight a contributes one column holding
    +sqrt(a) at min(u, v) and -sqrt(a) at max(u, v). Self-loops have zero
    gradient and produce no column.
    """
    rows = _entry_rows(g.row_offsets)
    upper = rows < g.col_indices
    tail = rows[upper]
    head = g.col_indices[upper]
    magnitude = np.sqrt(g.values[upper])
    _freeze(tail, head, magnitude)
    return IncidenceMatrix(g.n_vertices, int(tail.size), tail, head, magnitude)


def dirichlet_energy(g: SparseGraph, phi: GraphSignal) -> float:
    """Smoothness of a vertex function: half the weighted sum of squared
    differences across every ordered edge, equal to phi^T L phi for the
    combinatorial Laplacian."""
    phi = np.asarray(phi, dtype=np.float64)
    if phi.ndim == 2 and phi.shape[1] == 1:
        phi = phi[:, 0]
    if phi.shape != (g.n_vertices,):
        raise ValueError(f"expected a signal of length {g.n_vertices}, got {phi.shape}")
    rows = _entry_rows(g.row_offsets)
    diff = phi[rows] - phi[g.col_indices]
    return 0.5 * float(np.dot(g.values, diff * diff))


def sign_aggregator(
    g: SparseGraph,
    k: int,
    binarize: bool = False,
    nnz_budget: Optional[int] = None,
) -> SparseSymMatrix:
    """Symmetrically normalized k-hop aggregation matrix.

    Order 0 is the identity. For k >= 1 the k-th adjacency power (entries
    count k-step walks) gets a unit diagonal added and is normalized by the
    inverse square root of its row sums. With binarize, power entries are
    collapsed to 0/1 reachability before the diagonal is added.

    Powers are formed by repeated sparse products. If the running number of
    nonzeros exceeds nnz_budget (default 10 * n_edges * k), the computation
    aborts with DensityBudgetError; small-diameter graphs densify fast.
    """
    if k < 0:
        raise ValueError("aggregator order must be nonnegative")
    n = g.n_vertices
    if k == 0:
        return _sym_from_scipy(n, sp.identity(n, format="csr"))
    if nnz_budget is None:
        nnz_budget = 10 * g.n_edges * k
    adj = g.to_csr()
    power = adj.copy()
    for step in range(1, k):
        power = (power @ adj).tocsr()
        power.sum_duplicates()
        if power.nnz > nnz_budget:
            raise DensityBudgetError(
                f"adjacency power {step + 1} has {power.nnz} nonzeros, "
                f"budget is {nnz_budget}; raise nnz_budget to proceed"
            )
    if power.nnz > nnz_budget:
        raise DensityBudgetError(
            f"adjacency power {k} has {power.nnz} nonzeros, budget is {nnz_budget}"
        )
    if binarize:
        power = power.copy()
        power.data = np.ones_like(power.data)
    with_loop = (power + sp.identity(n, format="csr")).tocsr()
    deg = np.asarray(with_loop.sum(axis=1)).ravel()
    return _sym_from_scipy(n, _scale_symmetric(with_loop, 1.0 / np.sqrt(deg)))


def connected_components(g: SparseGraph) -> Tuple[int, np.ndarray]:
    """Breadth-first component labeling in vertex order.

    Returns (component count, per-vertex labels). Labels are assigned in
    order of each component's lowest-index vertex, so the result is
    deterministic for a given graph.
    """
    n = g.n_vertices
    labels = np.full(n, -1, dtype=np.int64)
    offsets, cols = g.row_offsets, g.col_indices
    count = 0
    for start in range(n):
        if labels[start] >= 0:
            continue
        labels[start] = count
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in cols[offsets[u] : offsets[u + 1]]:
                if labels[v] < 0:
                    labels[v] = count
                    queue.append(int(v))
        count += 1
    _freeze(labels)
    return count, labels


def read_edge_list(
    path,
    n: Optional[int] = None,
    add_self_loops: bool = False,
) -> SparseGraph:
    """Read a graph from an edge-list text file.

    One `u v [weight]` triple per line, whitespace-separated, 0-based
    indices; weight defaults to 1.0 and `#` starts a comment. The vertex
    count is inferred as max index + 1 unless given explicitly.
    """
    edges: list[Tuple[int, int, float]] = []
    max_idx = -1
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ValueError(
                    f"{path}:{lineno}: expected 'u v [weight]', got {raw.rstrip()!r}"
                )
            try:
                u, v = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            edges.append((u, v, w))
            max_idx = max(max_idx, u, v)
    if n is None:
        if max_idx < 0:
            raise ValueError(f"{path}: no edges and no explicit vertex count")
        n = max_idx + 1
    return build_graph(edges, n, add_self_loops=add_self_loops)
