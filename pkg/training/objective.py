# training/objective.py
from dataclasses import dataclass

import numpy as np
import torch

from hypergraph.base import DdiHypergraph
from methods.base import BaseMethod
from methods.centsmoothie import CentSmoothieMethod
from model.network import DivergenceError, TripleBatch
from model.params import ModelParams


@dataclass
class Gradients:
    """One gradient tensor per parameter group, keyed like ModelParams.groups()."""
    groups: dict[str, torch.Tensor]

    def __getitem__(self, name: str) -> torch.Tensor:
        return self.groups[name]

    def max_abs(self) -> float:
        return max((float(g.abs().max()) for g in self.groups.values() if g.numel()), default=0.0)

    def dot(self, before: ModelParams, after: ModelParams) -> float:
        """<grad, after - before> summed over every group."""
        old = before.groups()
        return float(sum((self.groups[name] * (new - old[name])).sum() for name, new in after.groups().items()))


def loss_from_scores(positive_scores: torch.Tensor, negative_scores: torch.Tensor, lam: float) -> torch.Tensor:
    """sum over E of (1 - p)^2 plus lam times sum over Ω of p^2."""
    positive_scores = torch.as_tensor(positive_scores, dtype=torch.float64)
    negative_scores = torch.as_tensor(negative_scores, dtype=torch.float64)
    return (1.0 - positive_scores).square().sum() + lam * negative_scores.square().sum()


def as_batch(triples, num_drugs: int) -> TripleBatch:
    return triples if isinstance(triples, TripleBatch) else TripleBatch.from_triples(triples, num_drugs)


def objective(params: ModelParams, method: BaseMethod, positives, negatives, lam: float) -> torch.Tensor:
    """Differentiable loss of a method already set up on its training graph."""
    X = method.forward(params)
    num_drugs = method.graph.num_drugs
    return loss_from_scores(
        method.batch_scores(as_batch(positives, num_drugs), X, params.weights),
        method.batch_scores(as_batch(negatives, num_drugs), X, params.weights),
        lam,
    )


def _prepare(g: DdiHypergraph, omega, method: BaseMethod | None) -> tuple[BaseMethod, TripleBatch, TripleBatch]:
    method = method or CentSmoothieMethod()
    method.setup(g)
    negatives = np.asarray(omega, dtype=np.int64).reshape(-1, 3)
    if len(negatives) and g.contains_keys(g.triple_keys(negatives)).any():
        raise ValueError("negative set intersects the known edge set")
    return method, as_batch(g.edge_array, g.num_drugs), as_batch(negatives, g.num_drugs)


def loss(params: ModelParams, g: DdiHypergraph, omega, lam: float, method: BaseMethod | None = None) -> float:
    method, positives, negatives = _prepare(g, omega, method)
    with torch.no_grad():
        return float(objective(params, method, positives, negatives, lam))


def loss_and_gradients(
    params: ModelParams,
    method: BaseMethod,
    positives,
    negatives,
    lam: float,
) -> tuple[float, Gradients]:
    """Reverse-mode gradients of the loss w.r.t. every parameter group."""
    leaf = params.map(lambda _, t: t.detach().clone().requires_grad_(True))
    named = leaf.groups()
    value = objective(leaf, method, positives, negatives, lam)
    if not torch.isfinite(value):
        raise DivergenceError(f"non-finite loss {float(value)}")
    grads = torch.autograd.grad(value, list(named.values()), allow_unused=True)
    out = {}
    for (name, tensor), grad in zip(named.items(), grads):
        grad = torch.zeros_like(tensor) if grad is None else grad.detach()
        if not torch.isfinite(grad).all():
            raise DivergenceError(f"non-finite gradient in parameter group {name}")
        out[name] = grad
    if not method.learns_weights:
        out["weights"] = torch.zeros_like(named["weights"])
    return float(value), Gradients(out)


def gradients(params: ModelParams, g: DdiHypergraph, omega, lam: float, method: BaseMethod | None = None) -> Gradients:
    method, positives, negatives = _prepare(g, omega, method)
    return loss_and_gradients(params, method, positives, negatives, lam)[1]
