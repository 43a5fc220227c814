# tests/test_laplacian.py
import numpy as np
import pytest
import torch

from hypergraph.base import build_hypergraph
from laplacians.base import LaplacianPattern, SideEffectWeights, SparseSymMatrix
from laplacians.baseline import BaselineLaplacianBuilder, baseline_smoothing_laplacian
from laplacians.central import (
    CentralLaplacianBuilder,
    build_incidence,
    central_laplacian_closed_form,
    central_laplacian_oracle,
    simple_laplacian,
)
from laplacians.normalize import normalized_adjacency, propagate, propagation_operator
from laplacians.operators import OperatorBuilder

SINGLE_EDGE_L = np.array([
    [0.25, 0.25, -0.5],
    [0.25, 0.25, -0.5],
    [-0.5, -0.5, 1.0],
])


def _graph(num_drugs, num_side_effects, triples):
    return build_hypergraph(num_drugs, num_side_effects, triples, np.zeros((num_drugs, 1)))


def _random_weights(rng, K, S):
    return SideEffectWeights(rng.uniform(0.0, 2.0, size=(K, S)))


def _direct_smoothness(g, x, w_row):
    e = g.edge_array
    xs = x[g.num_drugs + e[:, 2]]
    return float(np.sum(w_row[e[:, 2]] * ((x[e[:, 0]] + x[e[:, 1]]) / 2 - xs) ** 2))


# ── Incidence ─────────────────────────────────────────────────────────

def test_incidence_single_edge():
    H = build_incidence(_graph(2, 1, [(0, 1, 0)]))
    np.testing.assert_array_equal(H.matrix.toarray(), [[0.5], [0.5], [-1.0]])


def test_incidence_empty_graph():
    H = build_incidence(_graph(3, 2, []))
    assert H.matrix.shape == (5, 0)


def test_incidence_columns_are_independent():
    g = _graph(3, 2, [(0, 1, 0), (0, 2, 1)])
    dense = build_incidence(g).matrix.toarray()
    np.testing.assert_array_equal(dense[0], [0.5, 0.5])
    np.testing.assert_allclose(dense.sum(axis=0), 0.0)
    assert (np.count_nonzero(dense, axis=0) == 3).all()


# ── Oracle ────────────────────────────────────────────────────────────

def test_oracle_single_edge():
    H = build_incidence(_graph(2, 1, [(0, 1, 0)]))
    np.testing.assert_allclose(central_laplacian_oracle(H, np.array([1.0])).to_dense(), SINGLE_EDGE_L)
    assert not central_laplacian_oracle(H, np.array([0.0])).to_dense().any()


def test_oracle_sums_edge_products():
    H = build_incidence(_graph(2, 2, [(0, 1, 0), (0, 1, 1)]))
    L = central_laplacian_oracle(H, np.array([1.0, 2.0]))
    assert L.get(0, 1) == pytest.approx(0.75)
    assert L.get(1, 0) == pytest.approx(0.75)


def test_oracle_rejects_negative_weight():
    H = build_incidence(_graph(2, 1, [(0, 1, 0)]))
    with pytest.raises(ValueError, match="negative weight"):
        central_laplacian_oracle(H, np.array([-1.0]))


def test_weights_reject_negative_entries():
    with pytest.raises(ValueError, match="negative weight"):
        SideEffectWeights(np.array([[1.0, -0.1]]))


# ── Closed form ───────────────────────────────────────────────────────

def test_closed_form_single_edge():
    g = _graph(2, 1, [(0, 1, 0)])
    L = central_laplacian_closed_form(g, SideEffectWeights.ones(1, 1), 0)
    np.testing.assert_allclose(L.to_dense(), SINGLE_EDGE_L)


def test_closed_form_drug_diagonal_counts_side_effect_pairs():
    g = _graph(3, 1, [(0, 1, 0), (0, 2, 0)])
    L = central_laplacian_closed_form(g, SideEffectWeights.ones(1, 1), 0)
    assert L.get(0, 0) == pytest.approx(0.5)


def test_closed_form_side_effect_diagonal_counts_edges():
    g = _graph(4, 1, [(0, 1, 0), (2, 3, 0)])
    L = central_laplacian_closed_form(g, SideEffectWeights.ones(1, 1), 0)
    assert L.get(4, 4) == pytest.approx(2.0)


def test_closed_form_rejects_dimension_out_of_range():
    g = _graph(2, 1, [(0, 1, 0)])
    with pytest.raises(ValueError, match="out of range"):
        central_laplacian_closed_form(g, SideEffectWeights.ones(2, 1), 2)


def test_closed_form_matches_oracle_on_random_graphs(random_graph):
    rng = np.random.default_rng(0)
    builder = CentralLaplacianBuilder()
    worst = 0.0
    for seed in range(100):
        g = random_graph(seed)
        weights = _random_weights(rng, 3, g.num_side_effects)
        H = build_incidence(g)
        for k in range(weights.K):
            closed = builder.build(g, weights, k).to_dense()
            oracle = central_laplacian_oracle(H, weights.edge_weights(g, k)).to_dense()
            worst = max(worst, float(np.abs(closed - oracle).max(initial=0.0)))
    assert worst <= 1e-10


def test_quadratic_form_matches_direct_smoothness(random_graph):
    rng = np.random.default_rng(1)
    for seed in range(100):
        g = random_graph(seed + 1000, min_drugs=3)
        if not g.edges:
            continue
        weights = _random_weights(rng, 1, g.num_side_effects)
        x = rng.normal(size=g.num_nodes)
        direct = _direct_smoothness(g, x, weights.values[0])
        closed = central_laplacian_closed_form(g, weights, 0).quadratic_form(x)
        oracle = central_laplacian_oracle(build_incidence(g), weights.edge_weights(g, 0)).quadratic_form(x)
        assert closed == pytest.approx(direct, rel=1e-9, abs=1e-12)
        assert oracle == pytest.approx(direct, rel=1e-9, abs=1e-12)


def test_laplacian_is_positive_semidefinite(random_graph):
    rng = np.random.default_rng(2)
    for seed in range(30):
        g = random_graph(seed)
        L = central_laplacian_closed_form(g, _random_weights(rng, 1, g.num_side_effects), 0)
        for _ in range(10):
            assert L.quadratic_form(rng.normal(size=g.num_nodes)) >= -1e-9


def test_stored_entries_are_bounded_by_six_per_edge(random_graph):
    for seed in range(20):
        g = random_graph(seed)
        for builder in (CentralLaplacianBuilder(), BaselineLaplacianBuilder()):
            L = builder.build(g, SideEffectWeights.ones(1, g.num_side_effects), 0)
            pattern = builder.cached_pattern(g)
            assert builder.build_metrics.writes == pattern.writes == 6 * len(g.edges)
            assert L.nnz <= pattern.num_slots <= 6 * len(g.edges)
            # Each slot keeps at most one coefficient per weight column it touches.
            assert pattern.contributions.nnz <= 6 * len(g.edges)


def test_shared_slots_are_accumulated_not_duplicated():
    # Three side effects on one drug pair share all three drug slots.
    g = _graph(2, 3, [(0, 1, 0), (0, 1, 1), (0, 1, 2)])
    pattern = CentralLaplacianBuilder().cached_pattern(g)
    assert pattern.num_slots == 3 + 3 * 3
    L = central_laplacian_closed_form(g, SideEffectWeights.ones(1, 3), 0)
    assert L.get(0, 1) == pytest.approx(0.75)
    assert L.get(0, 0) == pytest.approx(0.75)


def test_pattern_is_reused_across_dimensions(random_graph):
    g = random_graph(5)
    builder = CentralLaplacianBuilder()
    first = builder.cached_pattern(g)
    assert builder.cached_pattern(g) is first
    assert isinstance(first, LaplacianPattern)


# ── Unweighted variants ───────────────────────────────────────────────

def test_simple_laplacian_single_edge_and_empty():
    np.testing.assert_allclose(simple_laplacian(_graph(2, 1, [(0, 1, 0)])).to_dense(), SINGLE_EDGE_L)
    assert not simple_laplacian(_graph(3, 2, [])).to_dense().any()


def test_simple_laplacian_equals_unit_weights(random_graph):
    for seed in range(50):
        g = random_graph(seed + 500)
        closed = central_laplacian_closed_form(g, SideEffectWeights.ones(2, g.num_side_effects), 1)
        np.testing.assert_allclose(simple_laplacian(g).to_dense(), closed.to_dense(), atol=1e-12)


def test_baseline_laplacian_quadratic_form():
    g = _graph(2, 1, [(0, 1, 0)])
    L = baseline_smoothing_laplacian(g)
    assert L.quadratic_form(np.ones(3)) == pytest.approx(0.0)
    assert L.quadratic_form(np.array([1.0, 0.0, 0.0])) == pytest.approx(2.0)
    np.testing.assert_allclose(L.diagonal(), [2.0, 2.0, 2.0])


def test_baseline_laplacian_matches_pairwise_sum(random_graph):
    rng = np.random.default_rng(3)
    builder = BaselineLaplacianBuilder()
    for seed in range(20):
        g = random_graph(seed)
        x = rng.normal(size=g.num_nodes)
        e = g.edge_array
        u, v, s = x[e[:, 0]], x[e[:, 1]], x[g.num_drugs + e[:, 2]]
        direct = float(np.sum((u - v) ** 2 + (u - s) ** 2 + (v - s) ** 2))
        assert builder.build(g).quadratic_form(x) == pytest.approx(direct, rel=1e-9, abs=1e-12)


# ── Normalization ─────────────────────────────────────────────────────

def test_normalized_adjacency_single_edge():
    A = normalized_adjacency(SparseSymMatrix.from_dense(SINGLE_EDGE_L))
    np.testing.assert_allclose(A.to_dense(), [[1, -1, 1], [-1, 1, 1], [1, 1, 1]], atol=1e-12)


def test_normalized_adjacency_of_identity_is_identity():
    A = normalized_adjacency(SparseSymMatrix.from_dense(np.eye(3)))
    np.testing.assert_allclose(A.to_dense(), np.eye(3))


def test_isolated_node_keeps_only_a_self_loop():
    g = _graph(3, 1, [(0, 1, 0)])  # drug 2 is isolated
    A = normalized_adjacency(simple_laplacian(g)).to_dense()
    np.testing.assert_allclose(A[2], [0, 0, 1, 0])
    np.testing.assert_allclose(A[:, 2], [0, 0, 1, 0])


def test_propagation_operator_examples():
    np.testing.assert_allclose(propagation_operator(SparseSymMatrix.from_dense(np.eye(3))).to_dense(), np.eye(3))
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_allclose(propagation_operator(SparseSymMatrix.from_dense(swap)).to_dense(), swap)

    P = propagation_operator(normalized_adjacency(SparseSymMatrix.from_dense(SINGLE_EDGE_L))).to_dense()
    np.testing.assert_allclose(P, P.T)
    assert np.abs(P).max() <= 1.0 + 1e-12
    np.testing.assert_allclose(P, np.array([[1, -1, 1], [-1, 1, 1], [1, 1, 1]]) / 3, atol=1e-12)


def test_normalization_preserves_symmetry(random_graph):
    rng = np.random.default_rng(4)
    for seed in range(20):
        g = random_graph(seed)
        L = central_laplacian_closed_form(g, _random_weights(rng, 1, g.num_side_effects), 0)
        A = normalized_adjacency(L).to_dense()
        P = propagation_operator(normalized_adjacency(L)).to_dense()
        np.testing.assert_array_equal(A, A.T)
        np.testing.assert_array_equal(P, P.T)


def test_propagate_applies_operator_to_every_dimension():
    P = propagation_operator(normalized_adjacency(SparseSymMatrix.from_dense(SINGLE_EDGE_L)))
    X = np.array([[1.0, 2.0, 3.0], [0.0, -1.0, 1.0]])
    np.testing.assert_allclose(propagate(P, X), X @ P.to_dense())


def test_coordinate_lines_are_sorted_upper_triangle():
    lines = SparseSymMatrix.from_dense(SINGLE_EDGE_L).coordinate_lines()
    coords = [tuple(map(int, line.split()[:2])) for line in lines]
    assert coords == sorted(coords)
    assert all(r <= c for r, c in coords)
    assert lines[0] == "0 0 0.25"


# ── Differentiable operators ──────────────────────────────────────────

def test_torch_operator_matches_sparse_chain(random_graph):
    rng = np.random.default_rng(5)
    builder = CentralLaplacianBuilder()
    for seed in range(20):
        g = random_graph(seed)
        weights = _random_weights(rng, 3, g.num_side_effects)
        ops = OperatorBuilder(builder.cached_pattern(g)).build(torch.as_tensor(weights.values))
        for k in range(weights.K):
            expected = propagation_operator(normalized_adjacency(builder.build(g, weights, k))).to_dense()
            np.testing.assert_allclose(ops.dense(k), expected, atol=1e-12)


def test_torch_operator_apply_matches_dense(random_graph):
    g = random_graph(7)
    pattern = CentralLaplacianBuilder().cached_pattern(g)
    W = torch.rand(2, g.num_side_effects, dtype=torch.float64, generator=torch.Generator().manual_seed(0))
    ops = OperatorBuilder(pattern).build(W)
    X = torch.randn(2, g.num_nodes, dtype=torch.float64, generator=torch.Generator().manual_seed(1))
    out = ops.apply(X).numpy()
    for k in range(2):
        np.testing.assert_allclose(out[k], ops.dense(k) @ X[k].numpy(), atol=1e-12)


def test_empty_graph_operator_is_identity():
    g = _graph(3, 2, [])
    ops = OperatorBuilder(CentralLaplacianBuilder().cached_pattern(g)).build(torch.ones(2, 2, dtype=torch.float64))
    np.testing.assert_allclose(ops.dense(0), np.eye(5))
