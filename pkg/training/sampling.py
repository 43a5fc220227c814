# training/sampling.py
import numpy as np

from hypergraph.base import DdiHypergraph

# Below this complement/count ratio the complement is enumerated explicitly.
_DENSE_RATIO = 4


def sample_negatives(g: DdiHypergraph, count: int, seed: int) -> np.ndarray:
    """
    Uniform sample without replacement of ``count`` non-edges (Ω ⊂ Ē).

    Returns a count x 3 array of canonical (u, v, t) rows in lexicographic
    order. Sparse graphs use rejection sampling over dense triple keys;
    nearly-full graphs enumerate Ē directly.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    if count > g.complement_size:
        raise ValueError(
            f"insufficient negatives: requested {count}, only {g.complement_size} non-edges exist"
        )
    if count == 0:
        return np.zeros((0, 3), dtype=np.int64)

    rng = np.random.default_rng(seed)
    total = g.num_pairs * g.num_side_effects
    if g.complement_size <= _DENSE_RATIO * count:
        complement = np.setdiff1d(np.arange(total, dtype=np.int64), g.edge_keys, assume_unique=True)
        chosen = rng.choice(complement, size=count, replace=False)
    else:
        chosen = _rejection_sample(g, count, total, rng)
    return g.decode_keys(np.sort(chosen))


def _rejection_sample(g: DdiHypergraph, count: int, total: int, rng: np.random.Generator) -> np.ndarray:
    acceptance = g.complement_size / total
    chosen = np.zeros(0, dtype=np.int64)
    while len(chosen) < count:
        need = count - len(chosen)
        draw = rng.integers(0, total, size=int(need / acceptance * 1.2) + 16, dtype=np.int64)
        draw = draw[~g.contains_keys(draw)]
        combined = np.concatenate([chosen, draw])
        # Keep first occurrences in draw order so the sample stays uniform.
        _, first = np.unique(combined, return_index=True)
        chosen = combined[np.sort(first)][:count]
    return chosen
