# model/inference.py
import numpy as np
import pandas as pd
import torch

from hypergraph.base import DdiHypergraph
from methods.base import BaseMethod
from model.network import NodeEmbedding
from model.params import ModelParams

_BATCH = 200_000


def resolve_drug(g: DdiHypergraph, name: str) -> int:
    names = [g.drug_name(i) for i in range(g.num_drugs)]
    try:
        return names.index(name)
    except ValueError:
        raise ValueError(f"unknown drug {name!r}") from None


def resolve_side_effect(g: DdiHypergraph, name: str) -> int:
    names = [g.side_effect_name(t) for t in range(g.num_side_effects)]
    try:
        return names.index(name)
    except ValueError:
        raise ValueError(f"unknown side effect {name!r}") from None


def _candidates(g: DdiHypergraph, t: int, pair: tuple[int, int] | None) -> np.ndarray:
    """Unknown (u, v, t) triples for one side effect, optionally one drug pair only."""
    if pair is not None:
        u, v = sorted(pair)
        if u == v:
            raise ValueError(f"self-pair: drug {g.drug_name(u)!r} paired with itself")
        keys = g.triple_keys(np.array([[u, v, t]]))
    else:
        keys = np.arange(g.num_pairs, dtype=np.int64) * g.num_side_effects + t
    keys = keys[~g.contains_keys(keys)]
    return g.decode_keys(keys)


def rank_unknown(
    method: BaseMethod,
    params: ModelParams,
    g: DdiHypergraph,
    side_effects: list[int] | None = None,
    pair: tuple[int, int] | None = None,
    top_k: int = 10,
    threshold: float | None = None,
) -> pd.DataFrame:
    """
    Score every unknown triple of the requested side effects and keep the
    ``top_k`` best per side effect (all when top_k is 0). With a threshold h
    only scores strictly above h are kept.
    """
    if threshold is not None and not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    side_effects = list(range(g.num_side_effects)) if side_effects is None else side_effects
    with torch.no_grad():
        X = method.forward(params, g)
        frames = []
        for t in side_effects:
            triples = _candidates(g, t, pair)
            if len(triples) == 0:
                continue
            scores = torch.cat([
                method.score(triples[i:i + _BATCH], X, params.weights)
                for i in range(0, len(triples), _BATCH)
            ]).numpy()
            # Stable sort keeps lexicographic triple order among equal scores.
            order = np.argsort(-scores, kind="stable")
            if top_k:
                order = order[:top_k]
            chosen, chosen_scores = triples[order], scores[order]
            if threshold is not None:
                keep = chosen_scores > threshold
                chosen, chosen_scores = chosen[keep], chosen_scores[keep]
            frames.append(pd.DataFrame({
                "drugA": [g.drug_name(u) for u in chosen[:, 0]],
                "drugB": [g.drug_name(v) for v in chosen[:, 1]],
                "sideEffect": g.side_effect_name(t),
                "score": chosen_scores,
                "rank": np.arange(1, len(chosen) + 1),
            }))
    if not frames:
        return pd.DataFrame(columns=["drugA", "drugB", "sideEffect", "score", "rank"])
    return pd.concat(frames, ignore_index=True)


def side_effect_neighbors(X: NodeEmbedding, g: DdiHypergraph, t: int, k: int = 10) -> pd.DataFrame:
    """Side effects whose embedding columns are nearest (Euclidean) to side effect t."""
    table = X[:, g.num_drugs:].detach().numpy().T
    distances = np.linalg.norm(table - table[t], axis=1)
    others = np.array([s for s in np.argsort(distances, kind="stable") if s != t], dtype=np.int64)[:k]
    return pd.DataFrame({
        "sideEffect": g.side_effect_name(t),
        "neighbor": [g.side_effect_name(s) for s in others],
        "distance": distances[others],
        "rank": np.arange(1, len(others) + 1),
    })


def embedding_frame(X: NodeEmbedding, g: DdiHypergraph, dims: np.ndarray | None = None) -> pd.DataFrame:
    """One row per node (drugs, then side effects), one column per embedding dimension."""
    values = X.detach().numpy().T
    dims = np.arange(values.shape[1]) if dims is None else np.asarray(dims, dtype=np.int64)
    names = [g.drug_name(i) for i in range(g.num_drugs)] + [g.side_effect_name(t) for t in range(g.num_side_effects)]
    kinds = ["drug"] * g.num_drugs + ["side_effect"] * g.num_side_effects
    frame = pd.DataFrame(values[:, dims], columns=[f"k{d}" for d in dims])
    frame.insert(0, "kind", kinds)
    frame.insert(0, "node", names)
    return frame


def weight_frame(weights: torch.Tensor, g: DdiHypergraph) -> pd.DataFrame:
    """W transposed: one row per side effect, one column per dimension."""
    values = weights.detach().numpy().T
    frame = pd.DataFrame(values, columns=[f"k{d}" for d in range(values.shape[1])])
    frame.insert(0, "sideEffect", [g.side_effect_name(t) for t in range(g.num_side_effects)])
    return frame


def active_dimensions(weights: torch.Tensor, t: int) -> np.ndarray:
    """Dimensions k with W[k][t] > 0: the subspace side effect t is scored in."""
    return np.flatnonzero(weights[:, t].detach().numpy() > 0)
