"""Spectral graph learning toolkit.

Laplacian operators and the graph Fourier transform, spectral clustering,
spline and Chebyshev spectral filters, and two trainable node-classification
models (a full-batch graph convolutional network and a precomputed-aggregation
minibatch model) with a seeded benchmark harness and CLI.
"""

from .graphs import (
    DensityBudgetError,
    GraphSignal,
    IncidenceMatrix,
    IsolatedVertexError,
    LaplacianKind,
    SparseGraph,
    SparseSymMatrix,
    build_graph,
    connected_components,
    degree_vector,
    dirichlet_energy,
    incidence_matrix,
    laplacian,
    read_edge_list,
    sign_aggregator,
)

__version__ = "0.1.0"
