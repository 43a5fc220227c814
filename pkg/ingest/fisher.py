# ingest/fisher.py
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp


@dataclass(frozen=True)
class ContingencyTable:
    """
                 with SE   without SE
    exposed         a          b
    nonexposed      c          d
    """
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if min(self.a, self.b, self.c, self.d) < 0:
            raise ValueError(f"negative count in contingency table {self}")

    @property
    def total(self) -> int:
        return self.a + self.b + self.c + self.d

    @property
    def exposed(self) -> int:
        return self.a + self.b

    @property
    def with_side_effect(self) -> int:
        return self.a + self.c


class LogFactorialTable:
    """log(k!) for k = 0..size, grown on demand."""

    def __init__(self, size: int = 64):
        self._values = gammaln(np.arange(size + 1, dtype=np.float64) + 1.0)

    def __call__(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=np.int64)
        top = int(k.max(initial=0))
        if top >= len(self._values):
            self._values = gammaln(np.arange(max(top + 1, 2 * len(self._values)), dtype=np.float64) + 1.0)
        return self._values[k]

    def log_comb(self, n, k) -> np.ndarray:
        return self(n) - self(k) - self(np.asarray(n) - np.asarray(k))


_DEFAULT_TABLE = LogFactorialTable()


def fisher_exact_one_sided(table: ContingencyTable, log_factorials: LogFactorialTable | None = None) -> float:
    """
    P(X >= a) for X ~ Hypergeometric(total, a + c, a + b), summed in log space.

    Tables with an empty row or column margin carry no evidence and give 1.0.
    """
    lf = log_factorials or _DEFAULT_TABLE
    N, K, n = table.total, table.with_side_effect, table.exposed
    if min(n, N - n, K, N - K) == 0:
        return 1.0
    x = np.arange(table.a, min(n, K) + 1)
    log_terms = lf.log_comb(K, x) + lf.log_comb(N - K, n - x) - lf.log_comb(N, n)
    return float(min(1.0, np.exp(logsumexp(log_terms))))
