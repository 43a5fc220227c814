# laplacians/operators.py
from dataclasses import dataclass

import numpy as np
import torch

from laplacians.base import LaplacianPattern

DTYPE = torch.float64


@dataclass(frozen=True)
class PropagationOperator:
    """
    Per-dimension symmetric operators P_k on a shared sparsity pattern.

    ``diag`` is K x |V| (or 1 x |V| when every dimension shares one
    operator); ``off`` holds the strictly-upper entries at (rows, cols).
    """
    rows: torch.Tensor
    cols: torch.Tensor
    diag: torch.Tensor
    off: torch.Tensor

    def apply(self, X: torch.Tensor) -> torch.Tensor:
        """x~_k = P_k x_k for every row k of the K x |V| embedding."""
        out = self.diag * X
        out = out.index_add(1, self.rows, self.off * X[:, self.cols])
        out = out.index_add(1, self.cols, self.off * X[:, self.rows])
        return out

    def dense(self, k: int = 0) -> np.ndarray:
        """P_k as a dense array (for inspection and tests)."""
        n = self.diag.shape[1]
        d = self.diag[min(k, self.diag.shape[0] - 1)].detach().numpy()
        off = self.off[min(k, self.off.shape[0] - 1)].detach().numpy()
        P = np.diag(d)
        r, c = self.rows.numpy(), self.cols.numpy()
        np.add.at(P, (r, c), off)
        np.add.at(P, (c, r), off)
        return P


class OperatorBuilder:
    """
    Differentiable L_k -> A~_k -> P_k on a fixed Laplacian pattern.

    The stored Laplacian values are linear in the weight rows, so the
    whole chain is a handful of gathers and scatters over the pattern:
    O(K * nnz) per build, and torch.autograd carries gradients back
    into W.
    """

    def __init__(self, pattern: LaplacianPattern, eps: float = 1e-8):
        self.n = pattern.n
        self.eps = eps
        coo = pattern.contributions.tocoo()
        self._contributions = torch.sparse_coo_tensor(
            torch.as_tensor(np.vstack([coo.row, coo.col]), dtype=torch.long),
            torch.as_tensor(coo.data, dtype=DTYPE),
            size=coo.shape,
        ).coalesce()
        self.num_slots = pattern.num_slots
        self.num_columns = pattern.contributions.shape[1]

        rows = np.asarray(pattern.rows)
        cols = np.asarray(pattern.cols)
        is_diag = rows == cols
        self._diag_slots = torch.as_tensor(np.nonzero(is_diag)[0], dtype=torch.long)
        self._diag_nodes = torch.as_tensor(rows[is_diag], dtype=torch.long)
        self._off_slots = torch.as_tensor(np.nonzero(~is_diag)[0], dtype=torch.long)
        self.rows = torch.as_tensor(rows[~is_diag], dtype=torch.long)
        self.cols = torch.as_tensor(cols[~is_diag], dtype=torch.long)

    def laplacian_values(self, weights: torch.Tensor) -> torch.Tensor:
        """K x num_slots stored values of every L_k (weights is K x num_columns)."""
        return torch.sparse.mm(self._contributions, weights.T).T

    def build(self, weights: torch.Tensor) -> PropagationOperator:
        values = self.laplacian_values(weights)
        K = values.shape[0]

        degree = torch.full((K, self.n), self.eps, dtype=DTYPE)
        degree = degree.index_copy(1, self._diag_nodes, values[:, self._diag_slots].clamp(min=self.eps))
        inv_sqrt = degree.rsqrt()

        # A~ = 2I - d^-1/2 L d^-1/2: unit diagonal, negated normalized off-diagonal.
        adj_off = -values[:, self._off_slots] * inv_sqrt[:, self.rows] * inv_sqrt[:, self.cols]

        abs_off = adj_off.abs()
        row_sums = torch.ones(K, self.n, dtype=DTYPE)
        row_sums = row_sums.index_add(1, self.rows, abs_off).index_add(1, self.cols, abs_off)
        scale = row_sums.clamp(min=self.eps).rsqrt()

        off = adj_off * scale[:, self.rows] * scale[:, self.cols]
        diag = scale * scale
        return PropagationOperator(rows=self.rows, cols=self.cols, diag=diag, off=off)

    def build_unweighted(self) -> PropagationOperator:
        """Single operator shared by every dimension (weights fixed to ones)."""
        return self.build(torch.ones(1, self.num_columns, dtype=DTYPE))
