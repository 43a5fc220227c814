# utils/profiler.py
from dataclasses import dataclass

import psutil


@dataclass
class BuildMetrics:
    """Timing and size of one Laplacian / operator build."""
    total_ms: float = 0.0
    writes: int = 0              # per-hyperedge contributions accumulated during assembly
    nnz: int = 0                 # stored entries (upper triangle plus diagonal)
    memory_peak_mb: float = 0.0

    def to_dict(self) -> dict:
        return {
            "total_ms": round(self.total_ms, 1),
            "writes": self.writes,
            "nnz": self.nnz,
            "memory_peak_mb": round(self.memory_peak_mb, 2),
        }


@dataclass
class TrainMetrics:
    """Resource usage of one training run."""
    total_ms: float = 0.0
    epochs: int = 0
    initial_loss: float = 0.0
    final_loss: float = 0.0
    final_step: float = 0.0
    memory_peak_mb: float = 0.0

    def to_dict(self) -> dict:
        return {
            "total_ms": round(self.total_ms, 1),
            "epochs": self.epochs,
            "initial_loss": self.initial_loss,
            "final_loss": self.final_loss,
            "final_step": self.final_step,
            "memory_peak_mb": round(self.memory_peak_mb, 2),
        }


class MemoryTracker:
    """
    Context manager that measures RSS process memory growth during a block.

    RSS includes allocations made by numpy, scipy and torch, which
    tracemalloc cannot see.

    Usage:
        with MemoryTracker() as mem:
            do_work()
        print(mem.peak_mb)   # MB of RSS added during the block
    """

    def __init__(self):
        self.peak_mb: float = 0.0
        self._process = psutil.Process()

    def __enter__(self):
        self._rss_before = self._process.memory_info().rss
        return self

    def __exit__(self, *args):
        rss_after = self._process.memory_info().rss
        growth = max(rss_after - self._rss_before, 0)
        self.peak_mb = growth / 1e6
