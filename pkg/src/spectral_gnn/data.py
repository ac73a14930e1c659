"""Dataset ingestion and synthetic graph generators.

The Cora loader reads the standard two-file raw distribution: a `.content`
table of `paper_id <TAB> binary features <TAB> class_label` rows and a
`.cites` table of `cited <TAB> citing` pairs. Vertex order is pinned to
first appearance in the content file; the canonical split depends on it,
so the ordering is part of the format contract.

The synthetic generators exist to give tests graphs whose spectra and
partitions are known in closed form or cheap to brute-force.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from .container import load_container, save_container
from .graphs import SparseGraph, build_graph


class CoraFormatError(ValueError):
    """Raised for malformed content/cites rows."""


@dataclass(frozen=True)
class Split:
    """Disjoint train/validation/test vertex index sets."""

    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    @classmethod
    def empty(cls) -> "Split":
        nothing = np.empty(0, dtype=np.int64)
        return cls(nothing, nothing.copy(), nothing.copy())


@dataclass(frozen=True)
class Dataset:
    """A graph with per-vertex features, integer labels, and a split."""

    graph: SparseGraph
    features: np.ndarray
    labels: np.ndarray
    split: Split
    class_names: List[str]

    @property
    def n_vertices(self) -> int:
        return self.graph.n_vertices

    @property
    def n_classes(self) -> int:
        return len(self.class_names)


def load_cora(content_path, cites_path) -> Dataset:
    """Load the raw Cora citation network.

    Citation edges are symmetrized into an undirected unit-weight graph.
    Duplicate citation pairs collapse to weight 1, self-citations are
    dropped, and cites rows mentioning unknown paper ids are skipped with a
    single count warning. The returned split is empty; see planetoid_split.
    """
    ids: Dict[str, int] = {}
    feature_rows: List[np.ndarray] = []
    label_names: List[str] = []
    n_features: Optional[int] = None
    with open(content_path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) < 3:
                raise CoraFormatError(
                    f"{content_path}:{lineno}: expected id, features, label; "
                    f"got {len(cols)} columns"
                )
            if n_features is None:
                n_features = len(cols) - 2
            elif len(cols) - 2 != n_features:
                raise CoraFormatError(
                    f"{content_path}:{lineno}: expected {n_features} feature "
                    f"columns, got {len(cols) - 2}"
                )
            paper_id, label = cols[0], cols[-1].strip()
            if paper_id in ids:
                raise CoraFormatError(f"{content_path}:{lineno}: duplicate id {paper_id}")
            if not label:
                raise CoraFormatError(f"{content_path}:{lineno}: unknown class label")
            ids[paper_id] = len(ids)
            try:
                feature_rows.append(np.asarray(cols[1:-1], dtype=np.float64))
            except ValueError:
                raise CoraFormatError(
                    f"{content_path}:{lineno}: non-numeric feature value"
                ) from None
            label_names.append(label)
    if not ids:
        raise CoraFormatError(f"{content_path}: empty content file")

    class_names = sorted(set(label_names))
    class_index = {name: i for i, name in enumerate(class_names)}
    labels = np.asarray([class_index[name] for name in label_names], dtype=np.int64)
    features = np.vstack(feature_rows)

    pairs = set()
    dropped = 0
    with open(cites_path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            cols = line.split()
            if len(cols) != 2:
                raise CoraFormatError(
                    f"{cites_path}:{lineno}: expected 'cited citing', got {raw.rstrip()!r}"
                )
            cited, citing = cols
            if cited not in ids or citing not in ids:
                dropped += 1
                continue
            u, v = ids[cited], ids[citing]
            if u == v:
                continue
            pairs.add((min(u, v), max(u, v)))
    if dropped:
        warnings.warn(f"dropped {dropped} citation rows with unknown paper ids")

    edges = [(u, v, 1.0) for u, v in sorted(pairs)]
    graph = build_graph(edges, len(ids))
    features.flags.writeable = False
    labels.flags.writeable = False
    return Dataset(graph, features, labels, Split.empty(), class_names)


def planetoid_split(ds: Dataset) -> Dataset:
    """Attach the canonical semi-supervised split to a dataset.

    Training takes the first 20 vertices of each class in vertex order;
    validation is the first 500 remaining vertices and test the last 1000,
    both in vertex order. Disjoint by construction and fully deterministic.
    """
    n = ds.n_vertices
    if n < 1640:
        raise ValueError(f"need at least 1640 vertices for the canonical split, got {n}")
    train_parts = []
    for cls in range(ds.n_classes):
        members = np.flatnonzero(ds.labels == cls)
        if members.size < 20:
            raise ValueError(
                f"class {ds.class_names[cls]!r} has only {members.size} vertices, "
                "need 20 training candidates"
            )
        train_parts.append(members[:20])
    train = np.sort(np.concatenate(train_parts))
    rest = np.setdiff1d(np.arange(n, dtype=np.int64), train, assume_unique=False)
    val = rest[:500]
    test = rest[-1000:]
    return replace(ds, split=Split(train, val, test))


def row_normalize_features(features: np.ndarray) -> np.ndarray:
    """Divide each nonzero row by its L1 norm; zero rows pass through."""
    features = np.asarray(features, dtype=np.float64)
    if np.any(features < 0):
        raise ValueError("row normalization expects nonnegative features")
    norms = features.sum(axis=1, keepdims=True)
    safe = np.where(norms > 0, norms, 1.0)
    return features / safe


def save_dataset_cache(path, ds: Dataset) -> None:
    """Write a dataset to the binary container format (bit-exact round trip)."""
    tensors = {
        "features": ds.features,
        "labels": ds.labels.astype(np.float64),
        "split_train": ds.split.train.astype(np.float64),
        "split_val": ds.split.val.astype(np.float64),
        "split_test": ds.split.test.astype(np.float64),
        "graph_row_offsets": ds.graph.row_offsets.astype(np.float64),
        "graph_col_indices": ds.graph.col_indices.astype(np.float64),
        "graph_values": ds.graph.values,
    }
    meta = {
        "kind": "dataset",
        "n_vertices": ds.n_vertices,
        "class_names": list(ds.class_names),
        "has_self_loops": ds.graph.has_self_loops,
    }
    save_container(path, tensors, meta)


def load_dataset_cache(path) -> Dataset:
    tensors, meta = load_container(path)
    if meta.get("kind") != "dataset":
        raise ValueError(f"{path}: container does not hold a dataset")
    n = int(meta["n_vertices"])
    graph = SparseGraph(
        n_vertices=n,
        row_offsets=tensors["graph_row_offsets"].astype(np.int64),
        col_indices=tensors["graph_col_indices"].astype(np.int64),
        values=tensors["graph_values"],
        has_self_loops=bool(meta["has_self_loops"]),
    )
    split = Split(
        train=tensors["split_train"].astype(np.int64),
        val=tensors["split_val"].astype(np.int64),
        test=tensors["split_test"].astype(np.int64),
    )
    return Dataset(
        graph=graph,
        features=tensors["features"],
        labels=tensors["labels"].astype(np.int64),
        split=split,
        class_names=list(meta["class_names"]),
    )


def path_graph(n: int) -> SparseGraph:
    """Path on n >= 2 vertices: edges (i, i+1)."""
    if n < 2:
        raise ValueError("path needs at least 2 vertices")
    return build_graph([(i, i + 1, 1.0) for i in range(n - 1)], n)


def ring_graph(n: int) -> SparseGraph:
    """Cycle on n >= 3 vertices."""
    if n < 3:
        raise ValueError("ring needs at least 3 vertices")
    edges = [(i, (i + 1) % n, 1.0) for i in range(n)]
    return build_graph(edges, n)


def grid2d_graph(rows: int, cols: int) -> SparseGraph:
    """Rows-by-cols lattice with 4-neighbor connectivity, row-major vertex ids."""
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise ValueError("grid needs at least 2 vertices")
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1, 1.0))
            if r + 1 < rows:
                edges.append((v, v + cols, 1.0))
    return build_graph(edges, rows * cols)


def star_graph(n: int) -> SparseGraph:
    """Star on n >= 2 vertices with the hub at index 0."""
    if n < 2:
        raise ValueError("star needs at least 2 vertices")
    return build_graph([(0, i, 1.0) for i in range(1, n)], n)


def two_cliques_graph(k: int) -> SparseGraph:
    """Two k-cliques (vertices 0..k-1 and k..2k-1) joined by one bridge edge."""
    if k < 2:
        raise ValueError("cliques need at least 2 vertices each")
    edges = []
    for base in (0, k):
        for i in range(k):
            for j in range(i + 1, k):
                edges.append((base + i, base + j, 1.0))
    edges.append((k - 1, k, 1.0))
    return build_graph(edges, 2 * k)


_SYNTH_KINDS = {
    "path": (path_graph, ("n",)),
    "ring": (ring_graph, ("n",)),
    "grid2d": (grid2d_graph, ("rows", "cols")),
    "star": (star_graph, ("n",)),
    "two_cliques": (two_cliques_graph, ("k",)),
}


def synth_graph(kind: str, **params) -> SparseGraph:
    """Build one of the named deterministic test topologies by keyword size."""
    if kind not in _SYNTH_KINDS:
        raise ValueError(f"unknown graph kind {kind!r}; choose from {sorted(_SYNTH_KINDS)}")
    factory, names = _SYNTH_KINDS[kind]
    missing = [name for name in names if name not in params]
    extra = [name for name in params if name not in names]
    if missing or extra:
        raise ValueError(f"{kind} takes parameters {names}, got {sorted(params)}")
    return factory(*(params[name] for name in names))


def random_tree(n: int, rng: np.random.Generator) -> SparseGraph:
    """Uniform-attachment random tree on n >= 1 vertices."""
    if n < 1:
        raise ValueError("tree needs at least one vertex")
    edges = [(int(rng.integers(0, i)), i, 1.0) for i in range(1, n)]
    return build_graph(edges, n)


def random_connected_graph(
    n: int,
    rng: np.random.Generator,
    extra_edge_prob: float = 0.15,
    weighted: bool = False,
) -> SparseGraph:
    """Random connected graph: a random tree plus Bernoulli extra edges.

    With weighted=True, edge weights are drawn uniformly from (0.5, 1.5);
    otherwise all weights are 1.
    """
    if n < 1:
        raise ValueError("graph needs at least one vertex")
    edges = [(int(rng.integers(0, i)), i) for i in range(1, n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < extra_edge_prob:
                edges.append((i, j))
    seen = sorted(set(edges))
    if weighted:
        weights = rng.uniform(0.5, 1.5, size=len(seen))
    else:
        weights = np.ones(len(seen))
    return build_graph([(u, v, float(w)) for (u, v), w in zip(seen, weights)], n)
