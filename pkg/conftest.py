# conftest.py
# Puts the project root on sys.path so tests import packages the way the scripts do.
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: acceptance-scale run, enabled with CSH_RUN_SLOW=1")


def pytest_collection_modifyitems(config, items):
    if os.getenv("CSH_RUN_SLOW") == "1":
        return
    skip = pytest.mark.skip(reason="set CSH_RUN_SLOW=1 to run acceptance-scale tests")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def random_graph():
    """Factory for seeded random hypergraphs with Gaussian drug features."""
    import numpy as np

    from hypergraph.base import build_hypergraph

    def make(seed: int, max_drugs: int = 20, max_side_effects: int = 10, max_edges: int = 100, feature_dim: int = 4, min_drugs: int = 2):
        rng = np.random.default_rng(seed)
        D = int(rng.integers(min_drugs, max_drugs + 1))
        S = int(rng.integers(1, max_side_effects + 1))
        total = D * (D - 1) // 2 * S
        count = int(rng.integers(0, min(max_edges, total) + 1))
        keys = rng.choice(total, size=count, replace=False)
        pairs = np.array(np.triu_indices(D, k=1)).T
        triples = np.column_stack([pairs[keys // S], keys % S])
        # Random orientation exercises canonicalization.
        flip = rng.random(len(triples)) < 0.5
        triples[flip, 0], triples[flip, 1] = triples[flip, 1], triples[flip, 0].copy()
        return build_hypergraph(D, S, triples, rng.normal(size=(D, feature_dim)))

    return make
