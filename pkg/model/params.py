# model/params.py
from dataclasses import dataclass, field, replace
import math

import torch

DTYPE = torch.float64

# Parameter groups in serialization / gradient order; layer mixers follow.
BASE_GROUPS = ("drug_w1", "drug_b1", "drug_w2", "drug_b2", "se_embedding", "weights")


@dataclass
class ModelParams:
    """
    All trainable tensors of the network.

    drug_w1: K_0 x K, drug_b1: K      first drug-transform layer
    drug_w2: K x K,   drug_b2: K      second drug-transform layer
    se_embedding: |V_S| x K           side-effect table (one-hot inputs)
    layer_mixers: N tensors K x K     Theta per propagation layer
    weights: K x |V_S|                non-negative side-effect weights W
    """
    drug_w1: torch.Tensor
    drug_b1: torch.Tensor
    drug_w2: torch.Tensor
    drug_b2: torch.Tensor
    se_embedding: torch.Tensor
    layer_mixers: list[torch.Tensor] = field(default_factory=list)
    weights: torch.Tensor = None

    @property
    def K(self) -> int:
        return self.drug_w2.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.drug_w1.shape[0]

    @property
    def num_layers(self) -> int:
        return len(self.layer_mixers)

    @property
    def num_side_effects(self) -> int:
        return self.se_embedding.shape[0]

    def groups(self) -> dict[str, torch.Tensor]:
        """Named tensors in a fixed order (theta_0, theta_1, ... after the base groups)."""
        named = {name: getattr(self, name) for name in BASE_GROUPS}
        for i, theta in enumerate(self.layer_mixers):
            named[f"theta_{i}"] = theta
        return named

    @classmethod
    def from_groups(cls, named: dict[str, torch.Tensor]) -> "ModelParams":
        num_layers = sum(1 for name in named if name.startswith("theta_"))
        return cls(
            **{name: named[name] for name in BASE_GROUPS},
            layer_mixers=[named[f"theta_{i}"] for i in range(num_layers)],
        )

    def map(self, fn) -> "ModelParams":
        return ModelParams.from_groups({name: fn(name, t) for name, t in self.groups().items()})

    def detach(self) -> "ModelParams":
        return self.map(lambda _, t: t.detach().clone())

    def with_weights(self, weights: torch.Tensor) -> "ModelParams":
        return replace(self, weights=weights)

    def validate(self, feature_dim: int | None = None, num_side_effects: int | None = None) -> None:
        K = self.K
        expected = {
            "drug_w1": (self.feature_dim, K),
            "drug_b1": (K,),
            "drug_w2": (K, K),
            "drug_b2": (K,),
            "se_embedding": (self.num_side_effects, K),
            "weights": (K, self.num_side_effects),
        }
        for name, shape in expected.items():
            actual = tuple(getattr(self, name).shape)
            if actual != shape:
                raise ValueError(f"dimension mismatch: {name} has shape {actual}, expected {shape}")
        if self.num_layers < 1:
            raise ValueError("at least one propagation layer is required")
        for i, theta in enumerate(self.layer_mixers):
            if tuple(theta.shape) != (K, K):
                raise ValueError(f"dimension mismatch: theta_{i} has shape {tuple(theta.shape)}, expected {(K, K)}")
        if feature_dim is not None and feature_dim != self.feature_dim:
            raise ValueError(f"dimension mismatch: features have width {feature_dim}, params expect {self.feature_dim}")
        if num_side_effects is not None and num_side_effects != self.num_side_effects:
            raise ValueError(
                f"dimension mismatch: graph has {num_side_effects} side effects, params expect {self.num_side_effects}"
            )


def init_params(feature_dim: int, K: int, num_side_effects: int, num_layers: int, seed: int = 0) -> ModelParams:
    """Uniform(-1/sqrt(K), 1/sqrt(K)) for every map and the table; W starts at all ones."""
    generator = torch.Generator().manual_seed(int(seed))
    bound = 1.0 / math.sqrt(K)

    def uniform(*shape):
        return (torch.rand(*shape, generator=generator, dtype=DTYPE) * 2 - 1) * bound

    return ModelParams(
        drug_w1=uniform(feature_dim, K),
        drug_b1=uniform(K),
        drug_w2=uniform(K, K),
        drug_b2=uniform(K),
        se_embedding=uniform(num_side_effects, K),
        layer_mixers=[uniform(K, K) for _ in range(num_layers)],
        weights=torch.ones(K, num_side_effects, dtype=DTYPE),
    )
