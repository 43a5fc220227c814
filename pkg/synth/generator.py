# synth/generator.py
"""
Synthetic DDI data with a planted group structure.

Features are split into n groups of a coordinates. Each drug owns 1..m
groups; its feature vector is the 0/1 group template plus Gaussian noise.
Every unordered pair of distinct groups (g, h) is one side effect, and a
drug pair (i, j) causes it whenever one drug owns g and the other owns h.
"""
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed

from config import SynthConfig
from hypergraph.base import DdiHypergraph, build_hypergraph
from ingest.formats import FEATURES_FILE, LEDGER_FILE, TRIPLES_FILE, write_features, write_ledger, write_triples
from utils.seeding import derive_seed


@dataclass(frozen=True)
class GroupAssignment:
    """Per-drug sampled groups G_i and binary templates b_i (D x a*n)."""
    groups: tuple[tuple[int, ...], ...]
    templates: np.ndarray
    a: int

    @property
    def membership(self) -> np.ndarray:
        """D x n boolean matrix, True where drug i owns group g."""
        n = self.templates.shape[1] // self.a
        out = np.zeros((len(self.groups), n), dtype=bool)
        for i, grp in enumerate(self.groups):
            out[i, list(grp)] = True
        return out


def side_effect_pairs(n: int) -> list[tuple[int, int]]:
    """Group pairs g < h in lexicographic order; position = side-effect index."""
    return list(combinations(range(n), 2))


def side_effect_names(n: int) -> tuple[str, ...]:
    return tuple(f"S_{g}_{h}" for g, h in side_effect_pairs(n))


def drug_names(D: int) -> tuple[str, ...]:
    width = max(3, len(str(D - 1)))
    return tuple(f"D{i:0{width}d}" for i in range(D))


def assign_groups(config: SynthConfig, rng: np.random.Generator) -> GroupAssignment:
    groups = []
    templates = np.zeros((config.D, config.a * config.n), dtype=np.float64)
    for i in range(config.D):
        count = int(rng.integers(1, config.m + 1))
        chosen = tuple(sorted(int(x) for x in rng.choice(config.n, size=count, replace=False)))
        groups.append(chosen)
        for g in chosen:
            templates[i, g * config.a:(g + 1) * config.a] = 1.0
    return GroupAssignment(tuple(groups), templates, config.a)


def derive_triples(assignment: GroupAssignment, n: int) -> np.ndarray:
    """All (i, j, t) with i < j such that one drug owns g and the other owns h, (g, h) = pair t."""
    M = assignment.membership
    parts = []
    for t, (g, h) in enumerate(side_effect_pairs(n)):
        cross = np.outer(M[:, g], M[:, h])
        linked = np.triu(cross | cross.T, k=1)
        i, j = np.nonzero(linked)
        parts.append(np.stack([i, j, np.full_like(i, t)], axis=1))
    if not parts:
        return np.zeros((0, 3), dtype=np.int64)
    return np.concatenate(parts).astype(np.int64)


def generate(config: SynthConfig) -> tuple[DdiHypergraph, GroupAssignment]:
    config.validate()
    rng = np.random.default_rng(config.seed)
    assignment = assign_groups(config, rng)
    features = assignment.templates + rng.normal(0.0, config.sigma, size=assignment.templates.shape)
    g = build_hypergraph(
        config.D,
        config.n * (config.n - 1) // 2,
        derive_triples(assignment, config.n),
        features,
        drug_names=drug_names(config.D),
        side_effect_names=side_effect_names(config.n),
    )
    return g, assignment


def _generate_for_m(base: SynthConfig, m: int) -> tuple[DdiHypergraph, GroupAssignment]:
    config = SynthConfig(**{**base.__dict__, "m": m, "seed": derive_seed(base.seed, m)})
    return generate(config)


def sweep(base: SynthConfig, m_values, jobs: int = 1) -> list[tuple[int, DdiHypergraph, GroupAssignment]]:
    """One dataset per m; the seed for m is derived from (base seed, m)."""
    m_values = list(m_values)
    for m in m_values:
        if not 1 <= m <= base.n:
            raise ValueError(f"m must satisfy 1 <= m <= n, got m={m}, n={base.n}")
    results = Parallel(n_jobs=jobs)(delayed(_generate_for_m)(base, m) for m in m_values)
    return [(m, g, assignment) for m, (g, assignment) in zip(m_values, results)]


def write_dataset(directory, g: DdiHypergraph, assignment: GroupAssignment | None = None, header: str | None = None) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_triples(directory / TRIPLES_FILE, g, header)
    write_features(directory / FEATURES_FILE, g, header)
    if assignment is not None:
        write_ledger(directory / LEDGER_FILE, [g.drug_name(i) for i in range(g.num_drugs)], assignment.groups, header)
    return directory
