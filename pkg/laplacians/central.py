# laplacians/central.py
import numpy as np
import scipy.sparse as sp

from hypergraph.base import DdiHypergraph
from laplacians.base import (
    BaseLaplacianBuilder,
    IncidenceMatrix,
    LaplacianPattern,
    SideEffectWeights,
    SparseSymMatrix,
)


def build_incidence(g: DdiHypergraph) -> IncidenceMatrix:
    """One column per edge in lexicographic order with entries (1/2, 1/2, -1)."""
    edges = g.edge_array
    m = len(edges)
    rows = np.concatenate([edges[:, 0], edges[:, 1], g.num_drugs + edges[:, 2]])
    cols = np.tile(np.arange(m), 3)
    values = np.concatenate([np.full(m, 0.5), np.full(m, 0.5), np.full(m, -1.0)])
    H = sp.csc_matrix((values, (rows, cols)), shape=(g.num_nodes, m))
    return IncidenceMatrix(matrix=H, num_drugs=g.num_drugs)


def central_laplacian_oracle(H: IncidenceMatrix, w_k: np.ndarray) -> SparseSymMatrix:
    """Dense triple product H diag(w) H^T."""
    w_k = np.asarray(w_k, dtype=np.float64)
    if w_k.shape != (H.num_edges,):
        raise ValueError(f"dimension mismatch: {w_k.shape[0] if w_k.ndim else 0} weights for {H.num_edges} edges")
    if (w_k < 0).any():
        raise ValueError("negative weight: hyperedge weights must be >= 0")
    dense = H.matrix.toarray()
    return SparseSymMatrix.from_dense((dense * w_k) @ dense.T)


class CentralLaplacianBuilder(BaseLaplacianBuilder):
    """
    Closed-form central-smoothing Laplacian L_k = H W_k H^T.

    A single pass over E accumulates six contributions per hyperedge
    (u, v, t):
        L[u][v]   += 1/4 W[k][t]
        L[u][t]   -= 1/2 W[k][t],   L[v][t] -= 1/2 W[k][t]
        L[u][u]   += 1/4 W[k][t],   L[v][v] += 1/4 W[k][t]
        L[t][t]   += W[k][t]
    Summing them per slot yields the counters n_d, m_d and q of the four
    cases. The counters do not depend on W, so the pattern is built once
    per graph and every L_k is a sparse product with W[k].
    """

    weighted = True

    def __init__(self, name: str = "CentralLaplacian"):
        super().__init__(name=name)

    def pattern(self, g: DdiHypergraph) -> LaplacianPattern:
        edges = g.edge_array
        u, v = edges[:, 0], edges[:, 1]
        t = edges[:, 2]
        s = g.num_drugs + t
        rows = np.concatenate([u, u, v, u, v, s])
        cols = np.concatenate([v, s, s, u, v, s])
        columns = np.tile(t, 6)
        m = len(edges)
        coefs = np.concatenate([
            np.full(m, 0.25),   # drug-drug
            np.full(m, -0.5),   # drug u - side effect
            np.full(m, -0.5),   # drug v - side effect
            np.full(m, 0.25),   # drug u diagonal
            np.full(m, 0.25),   # drug v diagonal
            np.full(m, 1.0),    # side-effect diagonal
        ])
        return LaplacianPattern.from_contributions(
            g.num_nodes, rows, cols, columns, coefs, num_columns=g.num_side_effects
        )


class SimpleLaplacianBuilder(CentralLaplacianBuilder):
    """Unweighted variant (W fixed to ones): H H^T, identical for every k."""

    weighted = False

    def __init__(self, name: str = "SimpleLaplacian"):
        super().__init__(name=name)


def central_laplacian_closed_form(g: DdiHypergraph, weights: SideEffectWeights, k: int) -> SparseSymMatrix:
    return CentralLaplacianBuilder().build(g, weights, k)


def simple_laplacian(g: DdiHypergraph) -> SparseSymMatrix:
    return SimpleLaplacianBuilder().build(g)
