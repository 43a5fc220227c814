# evaluation/splits.py
from dataclasses import dataclass

import numpy as np

from hypergraph.base import DdiHypergraph

# Below this available/needed ratio the candidates for a side effect are enumerated.
_DENSE_RATIO = 4


@dataclass(frozen=True)
class FoldSplit:
    """fold_of[i] is the test fold of edge i (row i of g.edge_array)."""
    fold_of: np.ndarray
    num_folds: int

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != fold)

    def test_positives(self, g: DdiHypergraph, fold: int) -> np.ndarray:
        return g.edge_array[self.test_indices(fold)]

    def train_graph(self, g: DdiHypergraph, fold: int) -> DdiHypergraph:
        return g.with_edges(g.edge_array[self.train_indices(fold)])

    def fold_counts(self, g: DdiHypergraph) -> np.ndarray:
        """num_side_effects x F matrix of test-positive counts."""
        counts = np.zeros((g.num_side_effects, self.num_folds), dtype=np.int64)
        np.add.at(counts, (g.edge_array[:, 2], self.fold_of), 1)
        return counts


def stratified_folds(g: DdiHypergraph, F: int, seed: int) -> FoldSplit:
    """
    Per side effect, shuffle its triples and deal them round-robin into
    F folds. Dealing continues from where the previous side effect
    stopped, so total fold sizes also stay within one of each other.
    """
    if F < 2:
        raise ValueError(f"need at least 2 folds, got {F}")
    if F > len(g.edges):
        raise ValueError(f"{F} folds requested for only {len(g.edges)} edges")
    rng = np.random.default_rng(seed)
    labels = g.edge_array[:, 2]
    fold_of = np.empty(len(g.edges), dtype=np.int64)
    offset = 0
    for t in range(g.num_side_effects):
        ids = rng.permutation(np.flatnonzero(labels == t))
        fold_of[ids] = (offset + np.arange(len(ids))) % F
        offset = (offset + len(ids)) % F
    return FoldSplit(fold_of, F)


def eval_negatives(
    g: DdiHypergraph,
    test_positives: np.ndarray,
    seed: int,
    exclude_keys: np.ndarray | None = None,
    ratio: int = 1,
) -> np.ndarray:
    """
    For each side effect t, ``ratio`` non-edges labelled t per test positive
    labelled t, avoiding E and ``exclude_keys`` (negatives already handed to
    other folds). Returns sorted canonical (u, v, t) rows.
    """
    test_positives = np.asarray(test_positives, dtype=np.int64).reshape(-1, 3)
    if len(test_positives) == 0:
        raise ValueError("no test positives to match with negatives")
    S = g.num_side_effects
    forbidden = g.edge_keys
    if exclude_keys is not None and len(exclude_keys):
        forbidden = np.union1d(forbidden, exclude_keys)
    taken = np.bincount(forbidden % S, minlength=S)
    needed = np.bincount(test_positives[:, 2], minlength=S) * ratio

    rng = np.random.default_rng(seed)
    chosen = []
    for t in np.flatnonzero(needed):
        need = int(needed[t])
        available = g.num_pairs - int(taken[t])
        if need > available:
            raise ValueError(
                f"insufficient negatives for side effect {t} ({g.side_effect_name(t)}): "
                f"need {need}, only {available} available"
            )
        chosen.append(_sample_for_side_effect(g, int(t), need, available, forbidden, rng))
    return g.decode_keys(np.sort(np.concatenate(chosen)))


def _sample_for_side_effect(g, t, need, available, forbidden, rng) -> np.ndarray:
    S = g.num_side_effects
    if available <= _DENSE_RATIO * need:
        candidates = np.arange(g.num_pairs, dtype=np.int64) * S + t
        candidates = candidates[~np.isin(candidates, forbidden)]
        return rng.choice(candidates, size=need, replace=False)
    acceptance = available / g.num_pairs
    chosen = np.zeros(0, dtype=np.int64)
    while len(chosen) < need:
        draw = rng.integers(0, g.num_pairs, size=int((need - len(chosen)) / acceptance * 1.2) + 16) * S + t
        draw = draw[~np.isin(draw, forbidden)]
        combined = np.concatenate([chosen, draw])
        _, first = np.unique(combined, return_index=True)
        chosen = combined[np.sort(first)][:need]
    return chosen
