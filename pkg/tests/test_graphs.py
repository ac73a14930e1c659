import numpy as np
import pytest

from spectral_gnn.data import (
    path_graph,
    random_connected_graph,
    ring_graph,
    star_graph,
    two_cliques_graph,
)
from spectral_gnn.graphs import (
    DensityBudgetError,
    IsolatedVertexError,
    LaplacianKind,
    build_graph,
    connected_components,
    degree_vector,
    dirichlet_energy,
    incidence_matrix,
    laplacian,
    read_edge_list,
    sign_aggregator,
)


def k3():
    return build_graph([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], 3)


class TestBuildGraph:
    def test_single_edge_path(self):
        g = build_graph([(0, 1, 1.0)], 2)
        np.testing.assert_array_equal(degree_vector(g), [1.0, 1.0])
        assert g.n_edges == 1
        assert not g.has_self_loops

    def test_both_orientations_are_one_edge(self):
        once = build_graph([(0, 1, 1.0)], 2)
        twice = build_graph([(0, 1, 1.0), (1, 0, 1.0)], 2)
        np.testing.assert_array_equal(once.values, twice.values)
        np.testing.assert_array_equal(once.col_indices, twice.col_indices)
        np.testing.assert_array_equal(once.row_offsets, twice.row_offsets)

    def test_triangle_degrees(self):
        np.testing.assert_array_equal(degree_vector(k3()), [2.0, 2.0, 2.0])

    def test_same_orientation_duplicates_sum(self):
        g = build_graph([(0, 1, 1.0), (0, 1, 2.0)], 2)
        np.testing.assert_array_equal(g.values, [3.0, 3.0])

    def test_symmetry_invariant(self):
        g = build_graph([(0, 2, 0.5), (1, 2, 2.0)], 3)
        dense = g.to_csr().toarray()
        np.testing.assert_array_equal(dense, dense.T)

    def test_sorted_unique_columns(self):
        g = build_graph([(2, 0, 1.0), (0, 1, 1.0), (2, 1, 1.0)], 3)
        for row in range(3):
            cols = g.col_indices[g.row_offsets[row] : g.row_offsets[row + 1]]
            assert np.all(np.diff(cols) > 0)

    def test_self_loop_flagging(self):
        g = build_graph([(0, 0, 2.0), (0, 1, 1.0)], 2)
        assert g.has_self_loops
        np.testing.assert_array_equal(degree_vector(g), [3.0, 1.0])

    def test_add_self_loops(self):
        g = build_graph([(0, 1, 1.0)], 2, add_self_loops=True)
        np.testing.assert_array_equal(g.to_csr().toarray(), [[1, 1], [1, 1]])

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            build_graph([(0, 2, 1.0)], 2)
        with pytest.raises(ValueError):
            build_graph([(0, 1, -1.0)], 2)
        with pytest.raises(ValueError):
            build_graph([], 0)
        with pytest.raises(ValueError):
            build_graph([(0, 1, float("nan"))], 2)

    def test_zero_weight_edges_dropped(self):
        g = build_graph([(0, 1, 0.0), (1, 2, 1.0)], 3)
        assert g.values.size == 2
        np.testing.assert_array_equal(degree_vector(g), [0.0, 1.0, 1.0])

    def test_buffers_are_read_only(self):
        g = build_graph([(0, 1, 1.0)], 2)
        with pytest.raises(ValueError):
            g.values[0] = 5.0


class TestDegreeVector:
    def test_star_degrees(self):
        np.testing.assert_array_equal(degree_vector(star_graph(4)), [3.0, 1.0, 1.0, 1.0])

    def test_weighted(self):
        g = build_graph([(0, 1, 0.25), (1, 2, 0.75)], 3)
        np.testing.assert_allclose(degree_vector(g), [0.25, 1.0, 0.75])


class TestLaplacian:
    def test_path_combinatorial(self):
        lap = laplacian(path_graph(2), LaplacianKind.COMBINATORIAL)
        np.testing.assert_array_equal(lap.to_dense(), [[1, -1], [-1, 1]])

    def test_triangle_sym_normalized_spectrum(self):
        # closed form: I - A/2 on K3, adjacency eigenvalues are {2, -1, -1}
        lap = laplacian(k3(), LaplacianKind.SYMMETRIC_NORMALIZED)
        vals = np.linalg.eigvalsh(lap.to_dense())
        np.testing.assert_allclose(vals, [0.0, 1.5, 1.5], atol=1e-12)

    def test_path_renormalized_is_half_everywhere(self):
        lap = laplacian(path_graph(2), LaplacianKind.RENORMALIZED)
        np.testing.assert_allclose(lap.to_dense(), [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)

    def test_isolated_vertex_rejected_for_normalized(self):
        g = build_graph([(0, 1, 1.0)], 3)
        with pytest.raises(IsolatedVertexError):
            laplacian(g, LaplacianKind.SYMMETRIC_NORMALIZED)
        # renormalized adds self-loops, so the isolated vertex is fine
        lap = laplacian(g, LaplacianKind.RENORMALIZED)
        assert lap.to_dense()[2, 2] == 1.0

    def test_combinatorial_row_sums_vanish(self):
        rng = np.random.default_rng(7)
        g = random_connected_graph(23, rng, weighted=True)
        lap = laplacian(g, LaplacianKind.COMBINATORIAL)
        np.testing.assert_allclose(lap.to_dense().sum(axis=1), 0.0, atol=1e-12)


class TestIncidence:
    def test_path_column(self):
        inc = incidence_matrix(path_graph(2))
        np.testing.assert_array_equal(inc.to_dense(), [[1.0], [-1.0]])
        prod = inc.to_csr() @ inc.to_csr().T
        np.testing.assert_array_equal(prod.toarray(), [[1, -1], [-1, 1]])

    def test_triangle_product_equals_laplacian(self):
        g = k3()
        inc = incidence_matrix(g)
        assert inc.n_edges == 3
        prod = (inc.to_csr() @ inc.to_csr().T).toarray()
        lap = laplacian(g, LaplacianKind.COMBINATORIAL).to_dense()
        np.testing.assert_allclose(prod, lap, atol=1e-12)

    def test_weighted_edge_uses_sqrt(self):
        inc = incidence_matrix(build_graph([(0, 1, 4.0)], 2))
        np.testing.assert_array_equal(inc.to_dense(), [[2.0], [-2.0]])

    def test_self_loops_excluded(self):
        g = build_graph([(0, 0, 3.0), (0, 1, 1.0)], 2)
        inc = incidence_matrix(g)
        assert inc.n_edges == 1


class TestDirichletEnergy:
    def test_constant_signal_has_zero_energy(self):
        g = two_cliques_graph(3)
        assert dirichlet_energy(g, np.full(6, 2.5)) == 0.0

    def test_path_alternating(self):
        assert dirichlet_energy(path_graph(2), np.array([1.0, -1.0])) == 4.0

    def test_matches_quadratic_form(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            g = random_connected_graph(int(rng.integers(2, 30)), rng, weighted=True)
            phi = rng.standard_normal(g.n_vertices)
            lap = laplacian(g, LaplacianKind.COMBINATORIAL).to_dense()
            np.testing.assert_allclose(
                dirichlet_energy(g, phi), phi @ lap @ phi, rtol=1e-10, atol=1e-10
            )

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            dirichlet_energy(path_graph(3), np.zeros(2))


class TestSignAggregator:
    def test_order_zero_is_identity(self):
        agg = sign_aggregator(two_cliques_graph(3), 0)
        np.testing.assert_array_equal(agg.to_dense(), np.eye(6))

    def test_order_one_matches_renormalized(self):
        g = random_connected_graph(17, np.random.default_rng(3))
        agg = sign_aggregator(g, 1)
        lap = laplacian(g, LaplacianKind.RENORMALIZED)
        np.testing.assert_array_equal(agg.to_dense(), lap.to_dense())

    def test_path_order_two_is_identity(self):
        # A^2 of a single edge is I, so (A^2 + I) normalizes back to I
        agg = sign_aggregator(path_graph(2), 2)
        np.testing.assert_allclose(agg.to_dense(), np.eye(2), atol=1e-15)

    def test_symmetric(self):
        g = random_connected_graph(15, np.random.default_rng(5))
        dense = sign_aggregator(g, 3, nnz_budget=15 * 15).to_dense()
        np.testing.assert_array_equal(dense, dense.T)

    def test_density_budget_enforced(self):
        # the square of a star is nearly dense: leaves pair up through the hub
        g = star_graph(60)
        with pytest.raises(DensityBudgetError):
            sign_aggregator(g, 2)
        agg = sign_aggregator(g, 2, nnz_budget=60 * 60)
        assert agg.n == 60

    def test_binarize_collapses_walk_counts(self):
        # on a 5-ring, A^2 has 2-walk multiplicity 2 on the diagonal, so the
        # binarized aggregator differs from the raw-count one
        g = ring_graph(5)
        raw = sign_aggregator(g, 2).to_dense()
        flat = sign_aggregator(g, 2, binarize=True).to_dense()
        assert not np.allclose(raw, flat)
        np.testing.assert_array_equal(flat, flat.T)

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            sign_aggregator(path_graph(2), -1)


class TestConnectedComponents:
    def test_triangle(self):
        count, labels = connected_components(k3())
        assert count == 1
        np.testing.assert_array_equal(labels, [0, 0, 0])

    def test_two_disjoint_edges(self):
        g = build_graph([(0, 1, 1.0), (2, 3, 1.0)], 4)
        count, labels = connected_components(g)
        assert count == 2
        np.testing.assert_array_equal(labels, [0, 0, 1, 1])

    def test_edgeless(self):
        count, labels = connected_components(build_graph([], 3))
        assert count == 3
        np.testing.assert_array_equal(labels, [0, 1, 2])


class TestEdgeListFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "edges.txt"
        path.write_text("# a comment\n0 1\n1 2 2.5  # trailing note\n\n")
        g = read_edge_list(path)
        assert g.n_vertices == 3
        np.testing.assert_allclose(degree_vector(g), [1.0, 3.5, 2.5])

    def test_explicit_vertex_count(self, tmp_path):
        path = tmp_path / "edges.txt"
        path.write_text("0 1\n")
        assert read_edge_list(path, n=5).n_vertices == 5

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "edges.txt"
        path.write_text("0 1 2 3\n")
        with pytest.raises(ValueError, match="expected"):
            read_edge_list(path)

    def test_empty_file_without_count(self, tmp_path):
        path = tmp_path / "edges.txt"
        path.write_text("# nothing\n")
        with pytest.raises(ValueError):
            read_edge_list(path)


class TestOperatorProperties:
    """Randomized structural invariants shared by every Laplacian kind."""

    def test_random_graph_suite(self):
        rng = np.random.default_rng(2024)
        for _ in range(30):
            n = int(rng.integers(2, 51))
            g = random_connected_graph(n, rng, weighted=bool(rng.integers(0, 2)))

            comb = laplacian(g, LaplacianKind.COMBINATORIAL).to_dense()
            np.testing.assert_allclose(comb.sum(axis=1), 0.0, atol=1e-12)

            inc = incidence_matrix(g)
            prod = (inc.to_csr() @ inc.to_csr().T).toarray()
            np.testing.assert_allclose(prod, comb, atol=1e-10)

            sym = laplacian(g, LaplacianKind.SYMMETRIC_NORMALIZED).to_dense()
            renorm = laplacian(g, LaplacianKind.RENORMALIZED).to_dense()
            for mat in (comb, sym, renorm):
                np.testing.assert_array_equal(mat, mat.T)
            assert np.linalg.eigvalsh(comb).min() >= -1e-9
            assert np.linalg.eigvalsh(sym).min() >= -1e-9

            # the first-order propagation operator I + D^{-1/2} A D^{-1/2}
            # stays inside [0, 2]
            shifted = 2.0 * np.eye(n) - sym
            vals = np.linalg.eigvalsh(shifted)
            assert vals.min() >= -1e-9
            assert vals.max() <= 2.0 + 1e-9

    def test_zero_laplacian_eigenvalue_counts_components(self):
        rng = np.random.default_rng(99)
        for _ in range(10):
            parts = int(rng.integers(1, 4))
            blocks = []
            offset = 0
            edges = []
            for _ in range(parts):
                size = int(rng.integers(1, 8))
                sub = random_connected_graph(size, rng)
                rows = np.repeat(np.arange(size), np.diff(sub.row_offsets))
                for u, v, w in zip(rows, sub.col_indices, sub.values):
                    if u < v:
                        edges.append((int(u) + offset, int(v) + offset, float(w)))
                offset += size
                blocks.append(size)
            g = build_graph(edges, offset)
            count, _ = connected_components(g)
            assert count == parts
            lap = laplacian(g, LaplacianKind.COMBINATORIAL).to_dense()
            vals = np.linalg.eigvalsh(lap)
            assert int(np.sum(vals < 1e-8)) == parts
