# laplacians/baseline.py
import numpy as np

from hypergraph.base import DdiHypergraph
from laplacians.base import BaseLaplacianBuilder, LaplacianPattern, SparseSymMatrix


class BaselineLaplacianBuilder(BaseLaplacianBuilder):
    """
    Plain smoothing Laplacian: every hyperedge pulls all three of its nodes
    together, so x^T L x = sum over edges and node pairs (p, q) of
    (x_p - x_q)^2. Each pair adds +1 to both diagonals and -1 off the
    diagonal; hyperedge weights are fixed to 1.
    """

    weighted = False

    def __init__(self, name: str = "BaselineLaplacian"):
        super().__init__(name=name)

    def pattern(self, g: DdiHypergraph) -> LaplacianPattern:
        edges = g.edge_array
        u, v = edges[:, 0], edges[:, 1]
        s = g.num_drugs + edges[:, 2]
        m = len(edges)
        rows = np.concatenate([u, v, s, u, u, v])
        cols = np.concatenate([u, v, s, v, s, s])
        coefs = np.concatenate([np.full(3 * m, 2.0), np.full(3 * m, -1.0)])
        return LaplacianPattern.from_contributions(
            g.num_nodes, rows, cols, np.zeros(6 * m, dtype=np.int64), coefs, num_columns=1
        )


def baseline_smoothing_laplacian(g: DdiHypergraph) -> SparseSymMatrix:
    return BaselineLaplacianBuilder().build(g)
