# laplacians/base.py
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
import time

import numpy as np
import scipy.sparse as sp

from hypergraph.base import DdiHypergraph
from utils.profiler import BuildMetrics, MemoryTracker


@dataclass(frozen=True)
class SparseSymMatrix:
    """
    Symmetric |V| x |V| matrix stored as its upper triangle plus diagonal.

    Construction sums duplicate coordinates and folds (j, i) onto (i, j),
    so symmetry holds by construction. ``csr`` expands to the full
    compressed-row form used by propagation.
    """
    upper: sp.csr_matrix

    @classmethod
    def from_entries(cls, n: int, rows, cols, values) -> "SparseSymMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        lo = np.minimum(rows, cols)
        hi = np.maximum(rows, cols)
        upper = sp.coo_matrix((values, (lo, hi)), shape=(n, n)).tocsr()
        upper.sum_duplicates()
        upper.sort_indices()
        return cls(upper)

    @classmethod
    def from_dense(cls, dense: np.ndarray, tol: float = 0.0) -> "SparseSymMatrix":
        dense = np.asarray(dense, dtype=np.float64)
        upper = np.triu(dense)
        rows, cols = np.nonzero(np.abs(upper) > tol)
        return cls.from_entries(dense.shape[0], rows, cols, upper[rows, cols])

    @property
    def n(self) -> int:
        return self.upper.shape[0]

    @property
    def nnz(self) -> int:
        return int(self.upper.nnz)

    def get(self, i: int, j: int) -> float:
        lo, hi = (i, j) if i <= j else (j, i)
        return float(self.upper[lo, hi])

    def diagonal(self) -> np.ndarray:
        return self.upper.diagonal()

    def csr(self) -> sp.csr_matrix:
        full = self.upper + self.upper.T - sp.diags(self.upper.diagonal())
        full = sp.csr_matrix(full)
        full.sum_duplicates()
        full.sort_indices()
        return full

    def to_dense(self) -> np.ndarray:
        return self.csr().toarray()

    def quadratic_form(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=np.float64)
        return float(x @ (self.csr() @ x))

    def coordinate_lines(self) -> list[str]:
        """``row col value`` lines with row <= col, sorted by (row, col)."""
        coo = self.upper.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return [f"{coo.row[i]} {coo.col[i]} {float(coo.data[i])!r}" for i in order if coo.data[i] != 0.0]


@dataclass(frozen=True)
class IncidenceMatrix:
    """Oriented |V| x |E| incidence: 1/2 at both drug rows, -1 at the side-effect row."""
    matrix: sp.csc_matrix
    num_drugs: int

    @property
    def num_edges(self) -> int:
        return self.matrix.shape[1]


@dataclass
class SideEffectWeights:
    """K x |V_S| non-negative relevance of side effect t on dimension k."""
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError(f"dimension mismatch: weights must be K x |V_S|, got shape {self.values.shape}")
        if (self.values < 0).any():
            raise ValueError("negative weight: side-effect weights must be >= 0")

    @classmethod
    def ones(cls, K: int, num_side_effects: int) -> "SideEffectWeights":
        return cls(np.ones((K, num_side_effects)))

    @property
    def K(self) -> int:
        return self.values.shape[0]

    def edge_weights(self, g: DdiHypergraph, k: int) -> np.ndarray:
        """w_k(e) = W[k][t] for every edge e = (u, v, t), in edge order."""
        if not 0 <= k < self.K:
            raise ValueError(f"dimension out of range: k={k}, K={self.K}")
        return self.values[k, g.edge_array[:, 2]]


@dataclass(frozen=True)
class LaplacianPattern:
    """
    Fixed sparsity pattern of a per-dimension Laplacian.

    ``contributions`` maps a weight row to stored values: for weight row
    w (length |V_S|, or 1 for unweighted builders) the upper-triangle
    values are ``contributions @ w``. Entry (slot, t) holds the counter
    that multiplies W[k][t] at that slot: 1/4 per shared triple for
    drug pairs, -1/2 n_d for drug/side-effect slots, 1/4 m_d on drug
    diagonals and q on side-effect diagonals.
    """
    n: int
    rows: np.ndarray
    cols: np.ndarray
    contributions: sp.csr_matrix
    writes: int = 0

    @property
    def num_slots(self) -> int:
        return len(self.rows)

    def values(self, weight_row: np.ndarray) -> np.ndarray:
        return self.contributions @ np.asarray(weight_row, dtype=np.float64)

    def matrix(self, weight_row: np.ndarray) -> SparseSymMatrix:
        return SparseSymMatrix.from_entries(self.n, self.rows, self.cols, self.values(weight_row))

    @classmethod
    def from_contributions(cls, n: int, rows, cols, columns, coefs, num_columns: int) -> "LaplacianPattern":
        """Group per-hyperedge contributions (row, col, weight column, coefficient) into slots."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        lo = np.minimum(rows, cols)
        hi = np.maximum(rows, cols)
        slot_keys, slot_of = np.unique(lo * n + hi, return_inverse=True)
        contributions = sp.coo_matrix(
            (np.asarray(coefs, dtype=np.float64), (slot_of, np.asarray(columns, dtype=np.int64))),
            shape=(len(slot_keys), num_columns),
        ).tocsr()
        contributions.sum_duplicates()
        slot_rows, slot_cols = np.divmod(slot_keys, n)
        return cls(n=n, rows=slot_rows, cols=slot_cols, contributions=contributions, writes=len(rows))


class BaseLaplacianBuilder(ABC):
    """
    Abstract base class for all Laplacian builders.
    Every builder must implement pattern(); build() then evaluates it for
    one weight dimension.
    """

    weighted: bool = True

    def __init__(self, name: str):
        self.name = name
        self.build_metrics: BuildMetrics = BuildMetrics()
        self._cached: tuple[DdiHypergraph, LaplacianPattern] | None = None

    def build_and_time(self, g: DdiHypergraph, weights: SideEffectWeights | None = None, k: int = 0) -> SparseSymMatrix:
        """Build one Laplacian, recording time, writes and memory."""
        with MemoryTracker() as mem:
            start = time.perf_counter()
            L = self.build(g, weights, k)
            self.build_metrics.total_ms = (time.perf_counter() - start) * 1000
        self.build_metrics.memory_peak_mb = mem.peak_mb
        self.build_metrics.nnz = L.nnz
        print(
            f"[{self.name}] Built L_{k} — "
            f"{self.build_metrics.total_ms:.0f}ms | "
            f"{self.build_metrics.writes} writes | {L.nnz} stored entries"
        )
        return L

    def cached_pattern(self, g: DdiHypergraph) -> LaplacianPattern:
        if self._cached is None or self._cached[0] is not g:
            self._cached = (g, self.pattern(g))
        return self._cached[1]

    def build(self, g: DdiHypergraph, weights: SideEffectWeights | None = None, k: int = 0) -> SparseSymMatrix:
        pattern = self.cached_pattern(g)
        self.build_metrics.writes = pattern.writes
        if not self.weighted:
            return pattern.matrix(np.ones(pattern.contributions.shape[1]))
        if weights is None:
            raise ValueError(f"[{self.name}] weights are required")
        if not 0 <= k < weights.K:
            raise ValueError(f"dimension out of range: k={k}, K={weights.K}")
        if weights.values.shape[1] != g.num_side_effects:
            raise ValueError(
                f"dimension mismatch: weights cover {weights.values.shape[1]} side effects, graph has {g.num_side_effects}"
            )
        return pattern.matrix(weights.values[k])

    @abstractmethod
    def pattern(self, g: DdiHypergraph) -> LaplacianPattern:
        """Accumulate the per-hyperedge contributions in one pass over E."""
        pass

    def __repr__(self):
        return f"{self.__class__.__name__}(name={self.name})"
