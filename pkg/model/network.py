# model/network.py
from dataclasses import dataclass
from typing import Callable

import numpy as np
import torch

from hypergraph.base import DdiHypergraph, Triple
from laplacians.operators import PropagationOperator
from model.params import DTYPE, ModelParams

# K x |V| tensor, one column per node in flat order (drugs first).
NodeEmbedding = torch.Tensor

OperatorFactory = Callable[[torch.Tensor], PropagationOperator]


class DivergenceError(RuntimeError):
    """Raised when a forward pass, gradient or loss stops being finite."""


def triple_tensor(triples) -> torch.Tensor:
    """T x 3 long tensor from a Triple, an iterable of Triples or an int array."""
    if isinstance(triples, torch.Tensor):
        return triples.to(torch.long).reshape(-1, 3)
    if isinstance(triples, Triple):
        triples = [triples.as_tuple()]
    elif not isinstance(triples, np.ndarray):
        triples = [t.as_tuple() if isinstance(t, Triple) else tuple(t) for t in triples]
    return torch.as_tensor(np.asarray(triples, dtype=np.int64).reshape(-1, 3), dtype=torch.long)


@dataclass(frozen=True)
class TripleBatch:
    """
    Triples grouped by drug pair. ``pairs`` holds every distinct (u, v)
    once; triple i sits at row ``pair_index[i]``, column
    ``side_effects[i]`` of a pairs x |V_S| smoothness table.
    """
    triples: torch.Tensor
    pairs: torch.Tensor
    pair_index: torch.Tensor
    side_effects: torch.Tensor

    @classmethod
    def from_triples(cls, triples, num_drugs: int) -> "TripleBatch":
        idx = triple_tensor(triples)
        array = idx.numpy()
        unique, inverse = np.unique(array[:, 0] * num_drugs + array[:, 1], return_inverse=True)
        pairs = np.stack(np.divmod(unique, num_drugs), axis=1).reshape(-1, 2)
        return cls(
            triples=idx,
            pairs=torch.as_tensor(pairs, dtype=torch.long),
            pair_index=torch.as_tensor(inverse.reshape(-1), dtype=torch.long),
            side_effects=idx[:, 2].clone(),
        )

    def __len__(self) -> int:
        return len(self.triples)

    @property
    def num_pairs(self) -> int:
        return len(self.pairs)

    def gather(self, table: torch.Tensor) -> torch.Tensor:
        """One entry of a pairs x |V_S| table per triple."""
        return table[self.pair_index, self.side_effects]


def input_transform(params: ModelParams, g: DdiHypergraph) -> NodeEmbedding:
    """
    X^(0): drug columns from the two-layer ReLU network over drug features,
    side-effect columns straight from the embedding table.

    Drug features are stored nodes-as-rows (|V_D| x K_0); the result is
    transposed to the K x |V| layout at this boundary.
    """
    if g.feature_dim != params.feature_dim:
        raise ValueError(
            f"dimension mismatch: features have width {g.feature_dim}, params expect {params.feature_dim}"
        )
    if g.num_side_effects != params.num_side_effects:
        raise ValueError(
            f"dimension mismatch: graph has {g.num_side_effects} side effects, params expect {params.num_side_effects}"
        )
    features = torch.as_tensor(np.asarray(g.drug_features), dtype=DTYPE)
    hidden = torch.relu(features @ params.drug_w1 + params.drug_b1)
    drugs = torch.relu(hidden @ params.drug_w2 + params.drug_b2)
    return torch.cat([drugs.T, params.se_embedding.T], dim=1)


def forward(
    params: ModelParams,
    g: DdiHypergraph,
    operator_factory: OperatorFactory,
    pre_activations: list | None = None,
) -> NodeEmbedding:
    """
    Stacked propagation layers: X^(l+1) = ReLU(Theta^(l)^T P X^(l)).

    The operators are built once from params.weights and shared by every
    layer. Pass a list as ``pre_activations`` to collect each layer's
    input to ReLU.
    """
    X = input_transform(params, g)
    if not torch.isfinite(X).all():
        raise DivergenceError("non-finite values in the input transform (layer 0)")
    operator = operator_factory(params.weights)
    for layer, theta in enumerate(params.layer_mixers, start=1):
        mixed = theta.T @ operator.apply(X)
        if pre_activations is not None:
            pre_activations.append(mixed)
        X = torch.relu(mixed)
        if not torch.isfinite(X).all():
            raise DivergenceError(f"non-finite values after propagation layer {layer}")
    return X


def ssa(triples, X: NodeEmbedding, W: torch.Tensor, num_drugs: int) -> torch.Tensor:
    """sum_k W[k][t] ((X[k][u] + X[k][v]) / 2 - X[k][t])^2 for every triple."""
    idx = triple_tensor(triples)
    u, v, t = idx[:, 0], idx[:, 1], idx[:, 2]
    deviation = (X[:, u] + X[:, v]) / 2 - X[:, num_drugs + t]
    return (W[:, t] * deviation.square()).sum(dim=0)


def pairwise_smoothness(triples, X: NodeEmbedding, num_drugs: int) -> torch.Tensor:
    """sum_k over the three node pairs of a triple of (X[k][p] - X[k][q])^2."""
    idx = triple_tensor(triples)
    xu, xv, xt = X[:, idx[:, 0]], X[:, idx[:, 1]], X[:, num_drugs + idx[:, 2]]
    return ((xu - xv).square() + (xu - xt).square() + (xv - xt).square()).sum(dim=0)


def ssa_table(pairs: torch.Tensor, X: NodeEmbedding, W: torch.Tensor, num_drugs: int) -> torch.Tensor:
    """
    ssa of every (drug pair, side effect) combination, pairs x |V_S|.

    Expands sum_k W[k][t] (m_k - x_k)^2 into m^2 W - 2 m (W x) + W x^2,
    so the work is two matrix products instead of a K-vector per triple.
    """
    mid = (X[:, pairs[:, 0]] + X[:, pairs[:, 1]]) / 2
    xs = X[:, num_drugs:]
    return mid.square().T @ W - 2 * (mid.T @ (W * xs)) + (W * xs.square()).sum(dim=0)


def pairwise_table(pairs: torch.Tensor, X: NodeEmbedding, num_drugs: int) -> torch.Tensor:
    """pairwise_smoothness of every (drug pair, side effect) combination, pairs x |V_S|."""
    xu, xv = X[:, pairs[:, 0]], X[:, pairs[:, 1]]
    xs = X[:, num_drugs:]
    per_pair = ((xu - xv).square() + xu.square() + xv.square()).sum(dim=0)
    return per_pair[:, None] + 2 * xs.square().sum(dim=0) - 2 * ((xu + xv).T @ xs)


def score_from_smoothness(smoothness: torch.Tensor) -> torch.Tensor:
    return 1.0 / (1.0 + smoothness)


def score(triples, X: NodeEmbedding, W: torch.Tensor, num_drugs: int) -> torch.Tensor:
    """p = 1 / (1 + ssa), in (0, 1]."""
    return score_from_smoothness(ssa(triples, X, W, num_drugs))


def classify(triples, X: NodeEmbedding, W: torch.Tensor, num_drugs: int, h: float = 0.5) -> torch.Tensor:
    """True where the score is strictly greater than the threshold h."""
    if not 0 < h < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {h}")
    return score(triples, X, W, num_drugs) > h
