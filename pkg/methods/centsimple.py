# methods/centsimple.py
import torch

from laplacians.central import SimpleLaplacianBuilder
from laplacians.operators import PropagationOperator
from methods.base import BaseMethod
from model.network import NodeEmbedding, ssa, ssa_table


class CentSimpleMethod(BaseMethod):
    """Central smoothing with W fixed to ones: one Laplacian H H^T for every dimension."""

    learns_weights = False

    def __init__(self, eps: float = 1e-8):
        super().__init__(name="CentSimple", laplacian=SimpleLaplacianBuilder(), eps=eps)
        self._shared: PropagationOperator | None = None

    def setup(self, g) -> None:
        if self._graph is not g:
            self._shared = None
        super().setup(g)

    def effective_weights(self, weights: torch.Tensor) -> torch.Tensor:
        return torch.ones_like(weights)

    def operator(self, weights: torch.Tensor) -> PropagationOperator:
        if self._operators is None:
            raise RuntimeError(f"[{self.name}] Call setup() before forward()")
        if self._shared is None:
            self._shared = self._operators.build_unweighted()
        return self._shared

    def smoothness(self, triples: torch.Tensor, X: NodeEmbedding, weights: torch.Tensor) -> torch.Tensor:
        return ssa(triples, X, weights, self.graph.num_drugs)

    def smoothness_table(self, pairs: torch.Tensor, X: NodeEmbedding, weights: torch.Tensor) -> torch.Tensor:
        return ssa_table(pairs, X, weights, self.graph.num_drugs)
