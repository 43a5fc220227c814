# hypergraph/base.py
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable

import numpy as np


class NodeKind(Enum):
    DRUG = "drug"
    SIDE_EFFECT = "side_effect"


@dataclass(frozen=True)
class NodeId:
    kind: NodeKind
    index: int

    def flat_index(self, num_drugs: int) -> int:
        """Drugs occupy [0, |V_D|), side effects follow at |V_D| + index."""
        if self.kind is NodeKind.DRUG:
            return self.index
        return num_drugs + self.index


@dataclass(frozen=True, order=True)
class Triple:
    """A hyperedge (drug u, drug v, side effect t), always stored with u < v."""
    u: int
    v: int
    t: int

    def __post_init__(self):
        if self.u == self.v:
            raise ValueError(f"self-pair: drug {self.u} cannot interact with itself")
        if self.u > self.v:
            u, v = self.v, self.u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.u, self.v, self.t)


def canonicalize(
    u: int,
    v: int,
    t: int,
    num_drugs: int | None = None,
    num_side_effects: int | None = None,
) -> Triple:
    """Return the canonical (min, max, t) form; bounds are checked when given."""
    u, v, t = int(u), int(v), int(t)
    if u == v:
        raise ValueError(f"self-pair: ({u}, {v}, {t})")
    if min(u, v, t) < 0:
        raise ValueError(f"index out of range: ({u}, {v}, {t})")
    if num_drugs is not None and max(u, v) >= num_drugs:
        raise ValueError(f"drug index out of range: ({u}, {v}, {t}) with {num_drugs} drugs")
    if num_side_effects is not None and t >= num_side_effects:
        raise ValueError(f"side-effect index out of range: ({u}, {v}, {t}) with {num_side_effects} side effects")
    return Triple(u, v, t)


def pair_index(u: np.ndarray | int, v: np.ndarray | int, num_drugs: int):
    """Row-major position of the unordered pair u < v among all drug pairs."""
    return u * (2 * num_drugs - u - 1) // 2 + (v - u - 1)


@dataclass(frozen=True)
class DdiHypergraph:
    """
    Drug-drug-side-effect hypergraph.

    Edges are deduplicated canonical triples in lexicographic order, so
    every matrix assembled from them is deterministic. Instances are
    immutable; derived arrays are cached on first access.
    """
    num_drugs: int
    num_side_effects: int
    edges: tuple[Triple, ...]
    drug_features: np.ndarray
    drug_names: tuple[str, ...] = field(default=())
    side_effect_names: tuple[str, ...] = field(default=())

    @property
    def num_nodes(self) -> int:
        return self.num_drugs + self.num_side_effects

    @property
    def feature_dim(self) -> int:
        return int(self.drug_features.shape[1])

    @property
    def num_pairs(self) -> int:
        return self.num_drugs * (self.num_drugs - 1) // 2

    @property
    def complement_size(self) -> int:
        """|Ē| = |V_D|(|V_D|-1)/2 * |V_S| - |E|."""
        return self.num_pairs * self.num_side_effects - len(self.edges)

    @cached_property
    def edge_array(self) -> np.ndarray:
        """|E| x 3 int64 array of (u, v, t) rows in edge order."""
        if not self.edges:
            return np.zeros((0, 3), dtype=np.int64)
        return np.array([e.as_tuple() for e in self.edges], dtype=np.int64)

    @cached_property
    def edge_keys(self) -> np.ndarray:
        """Sorted dense integer keys pair_index(u, v) * |V_S| + t of every edge."""
        return self.triple_keys(self.edge_array)

    @cached_property
    def _pair_table(self) -> tuple[np.ndarray, np.ndarray]:
        return np.triu_indices(self.num_drugs, k=1)

    @cached_property
    def _edge_set(self) -> frozenset[Triple]:
        return frozenset(self.edges)

    def triple_keys(self, triples: np.ndarray) -> np.ndarray:
        triples = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
        return pair_index(triples[:, 0], triples[:, 1], self.num_drugs) * self.num_side_effects + triples[:, 2]

    def decode_keys(self, keys: np.ndarray) -> np.ndarray:
        """Inverse of triple_keys: rows of canonical (u, v, t)."""
        keys = np.asarray(keys, dtype=np.int64)
        pairs, t = np.divmod(keys, self.num_side_effects)
        rows, cols = self._pair_table
        return np.stack([rows[pairs], cols[pairs], t], axis=1).astype(np.int64)

    def contains(self, triple: Triple) -> bool:
        return triple in self._edge_set

    def contains_keys(self, keys: np.ndarray) -> np.ndarray:
        """Vectorised membership test over dense keys."""
        return np.isin(keys, self.edge_keys, assume_unique=False)

    def side_effect_counts(self) -> np.ndarray:
        """Number of positive triples per side effect (q(t))."""
        return np.bincount(self.edge_array[:, 2], minlength=self.num_side_effects)

    def with_edges(self, triples: np.ndarray | Iterable) -> "DdiHypergraph":
        """Same nodes and features, different edge set (e.g. one training fold)."""
        return build_hypergraph(
            self.num_drugs,
            self.num_side_effects,
            triples,
            self.drug_features,
            drug_names=self.drug_names,
            side_effect_names=self.side_effect_names,
        )

    def drug_name(self, index: int) -> str:
        return self.drug_names[index] if self.drug_names else f"D{index}"

    def side_effect_name(self, index: int) -> str:
        return self.side_effect_names[index] if self.side_effect_names else f"S{index}"

    def __repr__(self):
        return (
            f"DdiHypergraph(drugs={self.num_drugs}, side_effects={self.num_side_effects}, "
            f"edges={len(self.edges)}, feature_dim={self.feature_dim})"
        )


def build_hypergraph(
    num_drugs: int,
    num_side_effects: int,
    raw_triples: Iterable,
    drug_features,
    drug_names: Iterable[str] = (),
    side_effect_names: Iterable[str] = (),
) -> DdiHypergraph:
    """Validate, canonicalize and deduplicate raw (u, v, t) triples."""
    features = np.asarray(drug_features, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] != num_drugs:
        raise ValueError(
            f"dimension mismatch: drug_features has shape {features.shape}, expected ({num_drugs}, K_0)"
        )
    drug_names = tuple(drug_names)
    side_effect_names = tuple(side_effect_names)
    if drug_names and len(drug_names) != num_drugs:
        raise ValueError(f"dimension mismatch: {len(drug_names)} drug names for {num_drugs} drugs")
    if side_effect_names and len(side_effect_names) != num_side_effects:
        raise ValueError(
            f"dimension mismatch: {len(side_effect_names)} side-effect names for {num_side_effects} side effects"
        )

    raw = _as_triple_array(raw_triples)
    bad = (raw[:, 0] == raw[:, 1])
    if bad.any():
        u, v, t = raw[np.argmax(bad)]
        raise ValueError(f"self-pair: ({u}, {v}, {t})")
    out_of_range = (
        (raw.min(axis=1, initial=0) < 0)
        | (raw[:, :2].max(axis=1, initial=0) >= num_drugs)
        | (raw[:, 2] >= num_side_effects)
    )
    if out_of_range.any():
        u, v, t = raw[np.argmax(out_of_range)]
        raise ValueError(
            f"index out of range: ({u}, {v}, {t}) with {num_drugs} drugs, {num_side_effects} side effects"
        )

    canonical = np.stack(
        [np.minimum(raw[:, 0], raw[:, 1]), np.maximum(raw[:, 0], raw[:, 1]), raw[:, 2]], axis=1
    )
    # Dense keys sort in lexicographic (u, v, t) order.
    keys = np.unique(pair_index(canonical[:, 0], canonical[:, 1], num_drugs) * num_side_effects + canonical[:, 2])

    features = features.copy()
    features.setflags(write=False)
    graph = DdiHypergraph(
        num_drugs=num_drugs,
        num_side_effects=num_side_effects,
        edges=(),
        drug_features=features,
        drug_names=drug_names,
        side_effect_names=side_effect_names,
    )
    edge_array = graph.decode_keys(keys) if len(keys) else np.zeros((0, 3), dtype=np.int64)
    edge_array.setflags(write=False)
    object.__setattr__(graph, "edges", tuple(Triple(int(u), int(v), int(t)) for u, v, t in edge_array))
    graph.__dict__["edge_array"] = edge_array
    graph.__dict__["edge_keys"] = keys
    return graph


def _as_triple_array(raw_triples) -> np.ndarray:
    if isinstance(raw_triples, np.ndarray):
        return raw_triples.astype(np.int64).reshape(-1, 3)
    rows = [t.as_tuple() if isinstance(t, Triple) else tuple(t) for t in raw_triples]
    if not rows:
        return np.zeros((0, 3), dtype=np.int64)
    return np.asarray(rows, dtype=np.int64).reshape(-1, 3)


def negative_complement_contains(g: DdiHypergraph, triple: Triple) -> bool:
    """True iff the triple is a non-edge (member of Ē)."""
    canonical = canonicalize(triple.u, triple.v, triple.t, g.num_drugs, g.num_side_effects)
    return not g.contains(canonical)
