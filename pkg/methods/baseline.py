# methods/baseline.py
import torch

from laplacians.baseline import BaselineLaplacianBuilder
from laplacians.operators import PropagationOperator
from methods.base import BaseMethod
from model.network import NodeEmbedding, pairwise_smoothness, pairwise_table


class BaselineMethod(BaseMethod):
    """
    Plain hypergraph smoothing: all three nodes of a hyperedge are pulled
    together. Propagation uses the clique-expansion Laplacian, and a
    triple scores high when its three embeddings are close to each other.
    W plays no part.
    """

    learns_weights = False

    def __init__(self, eps: float = 1e-8):
        super().__init__(name="Baseline", laplacian=BaselineLaplacianBuilder(), eps=eps)
        self._shared: PropagationOperator | None = None

    def setup(self, g) -> None:
        if self._graph is not g:
            self._shared = None
        super().setup(g)

    def operator(self, weights: torch.Tensor) -> PropagationOperator:
        if self._operators is None:
            raise RuntimeError(f"[{self.name}] Call setup() before forward()")
        if self._shared is None:
            self._shared = self._operators.build_unweighted()
        return self._shared

    def smoothness(self, triples: torch.Tensor, X: NodeEmbedding, weights: torch.Tensor) -> torch.Tensor:
        return pairwise_smoothness(triples, X, self.graph.num_drugs)

    def smoothness_table(self, pairs: torch.Tensor, X: NodeEmbedding, weights: torch.Tensor) -> torch.Tensor:
        return pairwise_table(pairs, X, self.graph.num_drugs)
