# methods/centsmoothie.py
import torch

from laplacians.central import CentralLaplacianBuilder
from methods.base import BaseMethod
from model.network import NodeEmbedding, ssa, ssa_table


class CentSmoothieMethod(BaseMethod):
    """
    Central-smoothing network with learnt side-effect weights.

    Each dimension k propagates with its own Laplacian L_k built from
    W[k]; a triple scores high when the side-effect embedding sits at
    the W-weighted midpoint of its two drugs.
    """

    learns_weights = True

    def __init__(self, eps: float = 1e-8):
        super().__init__(name="CentSmoothie", laplacian=CentralLaplacianBuilder(), eps=eps)

    def smoothness(self, triples: torch.Tensor, X: NodeEmbedding, weights: torch.Tensor) -> torch.Tensor:
        return ssa(triples, X, weights, self.graph.num_drugs)

    def smoothness_table(self, pairs: torch.Tensor, X: NodeEmbedding, weights: torch.Tensor) -> torch.Tensor:
        return ssa_table(pairs, X, weights, self.graph.num_drugs)
