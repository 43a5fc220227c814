# laplacians/normalize.py
import numpy as np
import scipy.sparse as sp

from laplacians.base import SparseSymMatrix

DEFAULT_EPS = 1e-8


def normalized_adjacency(L: SparseSymMatrix, eps: float = DEFAULT_EPS) -> SparseSymMatrix:
    """
    A~ = 2I - d^-1/2 L d^-1/2 with d = diag(L) floored at eps.

    The normalized diagonal L_ii / d_i is 1 for every node with a
    non-zero degree, so A~ carries a unit self-loop everywhere; isolated
    nodes (zero row) get the same self-loop and nothing else.
    """
    upper = L.upper.tocoo()
    d = np.maximum(L.diagonal(), eps)
    off = upper.row != upper.col
    rows, cols = upper.row[off], upper.col[off]
    values = -upper.data[off] / np.sqrt(d[rows] * d[cols])
    n = L.n
    diag = np.arange(n)
    return SparseSymMatrix.from_entries(
        n,
        np.concatenate([diag, rows]),
        np.concatenate([diag, cols]),
        np.concatenate([np.ones(n), values]),
    )


def propagation_operator(A: SparseSymMatrix, eps: float = DEFAULT_EPS) -> SparseSymMatrix:
    """D~^-1/2 A~ D~^-1/2 where D~_ii is the absolute row sum of A~, floored at eps."""
    full = A.csr()
    degree = np.maximum(np.asarray(abs(full).sum(axis=1)).ravel(), eps)
    scale = sp.diags(1.0 / np.sqrt(degree))
    upper = sp.triu(scale @ A.upper @ scale).tocsr()
    return SparseSymMatrix(upper)


def propagate(P: SparseSymMatrix, X: np.ndarray) -> np.ndarray:
    """Apply the symmetric operator to every row of a K x |V| embedding."""
    return np.asarray((P.csr() @ np.asarray(X, dtype=np.float64).T).T)
