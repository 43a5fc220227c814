# benchmark/grid.py
from dataclasses import dataclass, field, replace

from config import GRID_EMBEDDING_SIZES, GRID_LAYERS, RunConfig
from evaluation.cross_validation import cross_validate
from hypergraph.base import DdiHypergraph


@dataclass
class GridEntry:
    num_layers: int
    embedding_size: int
    mean_auc: float
    mean_aupr: float

    def to_dict(self) -> dict:
        return {
            "num_layers": self.num_layers,
            "embedding_size": self.embedding_size,
            "mean_auc": self.mean_auc,
            "mean_aupr": self.mean_aupr,
        }


@dataclass
class GridResult:
    entries: list[GridEntry] = field(default_factory=list)

    @property
    def best(self) -> GridEntry:
        """Highest mean AUC; ties go to fewer layers, then the smaller embedding."""
        if not self.entries:
            raise ValueError("empty grid")
        return min(self.entries, key=lambda e: (-e.mean_auc, e.num_layers, e.embedding_size))

    def to_dict(self) -> dict:
        return {"entries": [e.to_dict() for e in self.entries], "best": self.best.to_dict()}


def grid_search(
    g: DdiHypergraph,
    config: RunConfig,
    layers=GRID_LAYERS,
    embedding_sizes=GRID_EMBEDDING_SIZES,
) -> GridResult:
    """Cross-validate every (N, K) pair and keep the mean metrics."""
    result = GridResult()
    for N in layers:
        for K in embedding_sizes:
            print(f"\n[Grid] N={N} K={K}")
            trial = replace(config, train=replace(config.train, num_layers=N, embedding_size=K))
            report = cross_validate(g, trial)
            result.entries.append(GridEntry(N, K, report.mean_auc, report.mean_aupr))
    best = result.best
    print(f"[Grid] best: N={best.num_layers} K={best.embedding_size} mean AUC={best.mean_auc:.4f}")
    return result
