# methods/base.py
from abc import ABC, abstractmethod
import time

import numpy as np
import torch

from hypergraph.base import DdiHypergraph
from laplacians.base import BaseLaplacianBuilder
from laplacians.operators import OperatorBuilder, PropagationOperator
from model.network import NodeEmbedding, TripleBatch, forward, score_from_smoothness, triple_tensor
from model.params import ModelParams
from utils.profiler import BuildMetrics, MemoryTracker


class BaseMethod(ABC):
    """
    Abstract base class for the compared hypergraph networks.

    A method fixes which Laplacian drives propagation, whether the
    side-effect weights W are learnt, and how a triple is scored from
    the final embedding. Call setup() with a graph before forward().
    """

    learns_weights: bool = False

    def __init__(self, name: str, laplacian: BaseLaplacianBuilder, eps: float = 1e-8):
        self.name = name
        self.laplacian = laplacian
        self.eps = eps
        self.setup_metrics: BuildMetrics = BuildMetrics()
        self._graph: DdiHypergraph | None = None
        self._operators: OperatorBuilder | None = None

    def setup_and_time(self, g: DdiHypergraph) -> BuildMetrics:
        """Build the Laplacian pattern for g, recording time and memory."""
        with MemoryTracker() as mem:
            start = time.perf_counter()
            self.setup(g)
            self.setup_metrics.total_ms = (time.perf_counter() - start) * 1000
        self.setup_metrics.memory_peak_mb = mem.peak_mb
        print(
            f"[{self.name}] Setup complete — "
            f"{self.setup_metrics.total_ms:.0f}ms | "
            f"{self.setup_metrics.nnz} pattern slots"
        )
        return self.setup_metrics

    def setup(self, g: DdiHypergraph) -> None:
        if self._graph is g:
            return
        pattern = self.laplacian.cached_pattern(g)
        self._operators = OperatorBuilder(pattern, eps=self.eps)
        self._graph = g
        self.setup_metrics.writes = pattern.writes
        self.setup_metrics.nnz = pattern.num_slots

    @property
    def graph(self) -> DdiHypergraph:
        if self._graph is None:
            raise RuntimeError(f"[{self.name}] Call setup() before forward()")
        return self._graph

    def effective_weights(self, weights: torch.Tensor) -> torch.Tensor:
        """Weights as used by propagation and scoring."""
        return weights

    def operator(self, weights: torch.Tensor) -> PropagationOperator:
        if self._operators is None:
            raise RuntimeError(f"[{self.name}] Call setup() before forward()")
        return self._operators.build(self.effective_weights(weights))

    def forward(self, params: ModelParams, g: DdiHypergraph | None = None, pre_activations: list | None = None) -> NodeEmbedding:
        if g is not None:
            self.setup(g)
        return forward(params, self.graph, self.operator, pre_activations=pre_activations)

    @abstractmethod
    def smoothness(self, triples: torch.Tensor, X: NodeEmbedding, weights: torch.Tensor) -> torch.Tensor:
        """Per-triple smoothness; the score is 1 / (1 + smoothness)."""
        pass

    @abstractmethod
    def smoothness_table(self, pairs: torch.Tensor, X: NodeEmbedding, weights: torch.Tensor) -> torch.Tensor:
        """Smoothness of every (drug pair, side effect) combination, pairs x |V_S|."""
        pass

    def score(self, triples, X: NodeEmbedding, weights: torch.Tensor) -> torch.Tensor:
        return score_from_smoothness(self.smoothness(triple_tensor(triples), X, self.effective_weights(weights)))

    def batch_smoothness(self, batch: TripleBatch, X: NodeEmbedding, weights: torch.Tensor) -> torch.Tensor:
        """
        Per-triple smoothness of a grouped batch.

        When the pairs x side-effects table is no larger than the K values
        gathered per triple, the table is built and indexed; otherwise
        each triple is scored on its own.
        """
        W = self.effective_weights(weights)
        if batch.num_pairs * self.graph.num_side_effects <= len(batch) * X.shape[0]:
            return batch.gather(self.smoothness_table(batch.pairs, X, W))
        return self.smoothness(batch.triples, X, W)

    def batch_scores(self, batch: TripleBatch, X: NodeEmbedding, weights: torch.Tensor) -> torch.Tensor:
        return score_from_smoothness(self.batch_smoothness(batch, X, weights))

    def predict_scores(self, params: ModelParams, g: DdiHypergraph, triples, batch_size: int = 200_000) -> np.ndarray:
        """Scores of arbitrary triples under a trained model, without gradients."""
        with torch.no_grad():
            X = self.forward(params, g)
            idx = triple_tensor(triples)
            parts = [
                self.score(idx[start:start + batch_size], X, params.weights)
                for start in range(0, len(idx), batch_size)
            ]
        if not parts:
            return np.zeros(0)
        return torch.cat(parts).numpy()

    def __repr__(self):
        return f"{self.__class__.__name__}(name={self.name})"
