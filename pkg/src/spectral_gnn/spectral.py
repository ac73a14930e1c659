"""Eigendecomposition of symmetric graph operators and what it enables:
the graph Fourier transform pair, low-pass truncation, Fiedler-vector
bipartition, and cut conductance.

Dense matrices up to _DENSE_LIMIT vertices go through LAPACK's symmetric
solver; partial decompositions of larger operators use Lanczos iteration
with full reorthogonalization. Either way the basis carries a fixed sign
convention (first nonzero entry of each eigenvector positive), so repeated
runs produce bitwise-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .graphs import (
    GraphSignal,
    LaplacianKind,
    SparseGraph,
    SparseSymMatrix,
    _entry_rows,
    _freeze,
    connected_components,
    degree_vector,
    laplacian,
)

_DENSE_LIMIT = 2048
_RESIDUAL_TOL = 1e-8
_SIGN_TOL = 1e-12


class EigensolverError(RuntimeError):
    """The iterative eigensolver failed to reach the residual tolerance."""


class DisconnectedGraphError(ValueError):
    """An operation needs a connected graph and got one with several components."""


@dataclass(frozen=True)
class SpectralBasis:
    """Ascending eigenvalues with column-orthonormal eigenvectors.

    May be partial (d <= n columns). The sign convention pins each column's
    first entry larger than _SIGN_TOL in magnitude to be positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source_kind: Optional[LaplacianKind] = None

    @property
    def n(self) -> int:
        return self.eigenvectors.shape[0]

    @property
    def d(self) -> int:
        return self.eigenvectors.shape[1]


@dataclass(frozen=True)
class Partition:
    """Per-vertex cluster labels."""

    labels: np.ndarray

    def cluster(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.labels == label)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    vectors = np.array(vectors)
    for col in range(vectors.shape[1]):
        nonzero = np.flatnonzero(np.abs(vectors[:, col]) > _SIGN_TOL)
        if nonzero.size and vectors[nonzero[0], col] < 0:
            vectors[:, col] = -vectors[:, col]
    return vectors


def _check_residuals(mat, eigenvalues, eigenvectors) -> None:
    resid = mat @ eigenvectors - eigenvectors * eigenvalues
    norms = np.linalg.norm(resid, axis=0)
    limits = _RESIDUAL_TOL * np.maximum(1.0, np.abs(eigenvalues))
    worst = int(np.argmax(norms - limits))
    if norms[worst] > limits[worst]:
        raise EigensolverError(
            f"eigenpair {worst} has residual {norms[worst]:.3e}, "
            f"tolerance {limits[worst]:.3e}"
        )


def _lanczos_smallest(mat, d: int) -> Tuple[np.ndarray, np.ndarray]:
    """Smallest-d eigenpairs by Lanczos with full reorthogonalization.

    The starting vector comes from a fixed-seed generator, so the Krylov
    basis (and therefore the result) is deterministic for a given matrix.
    """
    n = mat.shape[0]
    rng = np.random.default_rng(0x5EEDBA5E)
    basis = np.zeros((n, min(n, max(6 * d, 96))))

    def fresh_vector(cols: int) -> np.ndarray:
        for _ in range(50):
            vec = rng.standard_normal(n)
            for _ in range(2):
                vec -= basis[:, :cols] @ (basis[:, :cols].T @ vec)
            norm = np.linalg.norm(vec)
            if norm > 1e-10:
                return vec / norm
        raise EigensolverError("could not find a vector outside the Krylov space")

    alphas: list[float] = []
    betas: list[float] = []
    q = fresh_vector(0)
    basis[:, 0] = q
    size = 1
    q_prev = np.zeros(n)
    beta = 0.0
    while True:
        u = mat @ q
        alpha = float(q @ u)
        alphas.append(alpha)
        if size >= basis.shape[1]:
            if basis.shape[1] >= n:
                break
            grown = np.zeros((n, min(n, basis.shape[1] * 2)))
            grown[:, : basis.shape[1]] = basis
            basis = grown
        r = u - alpha * q - beta * q_prev
        for _ in range(2):  # full reorthogonalization, twice for safety
            r -= basis[:, :size] @ (basis[:, :size].T @ r)
        beta = float(np.linalg.norm(r))
        if size == n:
            break
        if beta < 1e-13:
            # invariant subspace found; restart with a fresh direction
            q_prev = q
            q = fresh_vector(size)
            beta = 0.0
        else:
            q_prev = q
            q = r / beta
        betas.append(beta)
        basis[:, size] = q
        size += 1

        converged = size >= max(2 * d, d + 10) or size == n
        if converged or size % 32 == 0:
            tri = np.diag(alphas) + np.diag(betas[: size - 1], 1) + np.diag(betas[: size - 1], -1)
            vals, vecs = np.linalg.eigh(tri[:size, :size])
            candidates = basis[:, :size] @ vecs[:, :d]
            resid = mat @ candidates - candidates * vals[:d]
            limits = _RESIDUAL_TOL * np.maximum(1.0, np.abs(vals[:d]))
            if np.all(np.linalg.norm(resid, axis=0) <= limits):
                return vals[:d].copy(), candidates
            if size == n:
                break
    tri = np.diag(alphas[:size]) + np.diag(betas[: size - 1], 1) + np.diag(betas[: size - 1], -1)
    vals, vecs = np.linalg.eigh(tri)
    candidates = basis[:, :size] @ vecs[:, :d]
    resid = mat @ candidates - candidates * vals[:d]
    worst = float(np.linalg.norm(resid, axis=0).max())
    raise EigensolverError(
        f"Lanczos did not converge to {d} eigenpairs of a {n}x{n} matrix "
        f"(worst residual {worst:.3e})"
    )


def eigendecompose(
    m: SparseSymMatrix,
    d: Optional[int] = None,
    source_kind: Optional[LaplacianKind] = None,
) -> SpectralBasis:
    """First d eigenpairs of a symmetric matrix in ascending eigenvalue order.

    Omitting d gives the full decomposition. Every returned pair satisfies
    ||M u - lambda u|| <= 1e-8 * max(1, |lambda|); a violation raises
    EigensolverError rather than returning a silently bad basis.
    """
    n = m.n
    if d is None:
        d = n
    if not 1 <= d <= n:
        raise ValueError(f"need 1 <= d <= {n}, got {d}")
    mat = m.to_csr()
    if d == n or n <= _DENSE_LIMIT:
        vals, vecs = np.linalg.eigh(mat.toarray())
        vals, vecs = vals[:d].copy(), vecs[:, :d]
    else:
        vals, vecs = _lanczos_smallest(mat, d)
    vecs = _fix_signs(vecs)
    _check_residuals(mat, vals, vecs)
    _freeze(vals, vecs)
    return SpectralBasis(vals, vecs, source_kind)


def gft(basis: SpectralBasis, x: GraphSignal) -> np.ndarray:
    """Project a vertex signal onto the eigenbasis (coefficients U^T x)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != basis.n:
        raise ValueError(f"signal has {x.shape[0]} rows, basis expects {basis.n}")
    return basis.eigenvectors.T @ x


def igft(basis: SpectralBasis, xhat: np.ndarray) -> np.ndarray:
    """Reconstruct a vertex signal from spectral coefficients (U xhat)."""
    xhat = np.asarray(xhat, dtype=np.float64)
    if xhat.shape[0] != basis.d:
        raise ValueError(f"coefficients have {xhat.shape[0]} rows, basis holds {basis.d}")
    return basis.eigenvectors @ xhat


def lowpass_truncate(basis: SpectralBasis, d: int) -> SpectralBasis:
    """Keep only the d smallest-eigenvalue pairs of a basis."""
    if not 1 <= d <= basis.d:
        raise ValueError(f"need 1 <= d <= {basis.d}, got {d}")
    vals = basis.eigenvalues[:d].copy()
    vecs = basis.eigenvectors[:, :d].copy()
    _freeze(vals, vecs)
    return SpectralBasis(vals, vecs, basis.source_kind)


def fiedler_vector(g: SparseGraph) -> np.ndarray:
    """Unit-norm eigenvector of the second-smallest combinatorial Laplacian
    eigenvalue. Requires a connected graph; otherwise the second eigenvalue
    is still 0 and the induced partition is degenerate."""
    count, _ = connected_components(g)
    if count != 1:
        raise DisconnectedGraphError(f"graph has {count} components, need exactly 1")
    if g.n_vertices < 2:
        raise ValueError("need at least two vertices")
    lap = laplacian(g, LaplacianKind.COMBINATORIAL)
    basis = eigendecompose(lap, d=2, source_kind=LaplacianKind.COMBINATORIAL)
    return basis.eigenvectors[:, 1].copy()


def spectral_bipartition(g: SparseGraph) -> Partition:
    """Two-way split by the sign of the Fiedler vector.

    Entries within _SIGN_TOL of zero count as nonpositive and land in
    cluster 0, which keeps the labeling deterministic on symmetric graphs.
    """
    vec = fiedler_vector(g)
    labels = (vec > _SIGN_TOL).astype(np.int64)
    _freeze(labels)
    return Partition(labels)


def conductance(g: SparseGraph, part: Partition, a: int, b: int) -> float:
    """Cut weight between clusters a and b over the smaller cluster volume.

    vol(S) is the total weighted degree of S. A zero-volume cluster has no
    endpoints at all, so the cut is empty and the conductance is 0.
    """
    in_a = part.labels == a
    in_b = part.labels == b
    if not in_a.any() or not in_b.any():
        raise ValueError(f"clusters {a} and {b} must both be nonempty")
    rows = _entry_rows(g.row_offsets)
    crossing = in_a[rows] & in_b[g.col_indices]
    cut = float(g.values[crossing].sum())
    deg = degree_vector(g)
    vol_a = float(deg[in_a].sum())
    vol_b = float(deg[in_b].sum())
    if vol_a == 0.0 and vol_b == 0.0:
        raise ValueError("both clusters have zero volume")
    smaller = min(vol_a, vol_b)
    if smaller == 0.0:
        return 0.0
    return cut / smaller
