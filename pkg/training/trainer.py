# training/trainer.py
from contextlib import contextmanager
from dataclasses import dataclass, field
import math
import time
from typing import Callable

import torch

from config import TrainConfig
from hypergraph.base import DdiHypergraph
from methods.base import BaseMethod
from methods.factory import make_method
from model.network import DivergenceError, TripleBatch
from model.params import ModelParams, init_params
from training.objective import Gradients, loss_and_gradients, objective
from training.sampling import sample_negatives
from utils.profiler import MemoryTracker, TrainMetrics
from utils.seeding import derive_seed


@contextmanager
def single_thread():
    """Pin torch to one intra-op thread so runs are bit-reproducible."""
    previous = torch.get_num_threads()
    torch.set_num_threads(1)
    try:
        yield
    finally:
        torch.set_num_threads(previous)


def projected_step(params: ModelParams, grads: Gradients, lr: float) -> ModelParams:
    """One gradient step on every group, then W <- max(W, 0)."""
    stepped = {name: (t - lr * grads[name]).detach() for name, t in params.groups().items()}
    stepped["weights"] = stepped["weights"].clamp(min=0.0)
    return ModelParams.from_groups(stepped)


def armijo_step(
    params: ModelParams,
    grads: Gradients,
    value: float,
    step: float,
    evaluate: Callable[[ModelParams], float],
    shrink: float = 0.5,
    sigma: float = 0.01,
    max_trials: int = 20,
) -> tuple[ModelParams, float]:
    """
    Projected step whose size satisfies the sufficient-decrease rule
    f(x') - f(x) <= sigma * <grad, x' - x>.

    The search starts from the previous step size: while the rule holds
    the size grows by 1/shrink, otherwise it shrinks by ``shrink`` until
    the rule holds. Returns the new parameters and the accepted size; the
    parameters stay put when no trial within ``max_trials`` qualifies.
    """
    if grads.max_abs() == 0.0:
        return params, step

    def trial(size: float) -> tuple[ModelParams, bool]:
        candidate = projected_step(params, grads, size)
        return candidate, evaluate(candidate) - value <= sigma * grads.dot(params, candidate)

    candidate, accepted = trial(step)
    if accepted:
        for _ in range(max_trials):
            larger, larger_accepted = trial(step / shrink)
            if not larger_accepted:
                break
            candidate, step = larger, step / shrink
        return candidate, step
    for _ in range(max_trials):
        step *= shrink
        candidate, accepted = trial(step)
        if accepted:
            return candidate, step
    return params, step


@dataclass
class TrainResult:
    params: ModelParams
    loss_trace: list[float] = field(default_factory=list)
    metrics: TrainMetrics = field(default_factory=TrainMetrics)


class Trainer:
    """
    Full-batch projected gradient descent on the smoothness loss.

    Each epoch the loss over all known edges and the current negative
    sample is recorded, then every parameter group takes one projected
    step. The step size follows the Armijo rule along the projection
    arc, starting from the previous epoch's size (``learning_rate`` at
    first); with ``line_search`` off every step uses ``learning_rate``.
    The negative sample is redrawn every ``neg_resample_every`` epochs
    from a seed derived from (seed, epoch).
    """

    def __init__(self, config: TrainConfig, method: BaseMethod | None = None, quiet: bool = False):
        config.validate()
        self.config = config
        self.method = method or make_method(config.method, eps=config.eps)
        self.quiet = quiet

    def _log(self, message: str) -> None:
        if not self.quiet:
            print(f"[Trainer] {message}")

    def _evaluator(self, positives: TripleBatch, negatives: TripleBatch) -> Callable[[ModelParams], float]:
        def evaluate(params: ModelParams) -> float:
            with torch.no_grad():
                try:
                    value = float(objective(params, self.method, positives, negatives, self.config.lam))
                except DivergenceError:
                    return math.inf
            return value if math.isfinite(value) else math.inf
        return evaluate

    def fit(self, g: DdiHypergraph, params: ModelParams | None = None) -> TrainResult:
        cfg = self.config
        if params is None:
            params = init_params(g.feature_dim, cfg.embedding_size, g.num_side_effects, cfg.num_layers, seed=cfg.seed)
        params.validate(feature_dim=g.feature_dim, num_side_effects=g.num_side_effects)
        result = TrainResult(params=params.detach())
        if cfg.epochs == 0 or len(g.edges) == 0:
            if len(g.edges) == 0 and cfg.epochs:
                self._log("no known edges; returning initial parameters")
            return result

        self.method.setup(g)
        positives = TripleBatch.from_triples(g.edge_array, g.num_drugs)
        num_negatives = min(len(g.edges), g.complement_size)
        step = cfg.learning_rate

        with MemoryTracker() as mem, single_thread():
            start = time.perf_counter()
            params = result.params
            negatives = None
            for epoch in range(cfg.epochs):
                if epoch % cfg.neg_resample_every == 0:
                    omega = sample_negatives(g, num_negatives, derive_seed(cfg.seed, epoch))
                    negatives = TripleBatch.from_triples(omega, g.num_drugs)
                try:
                    value, grads = loss_and_gradients(params, self.method, positives, negatives, cfg.lam)
                except DivergenceError as exc:
                    raise DivergenceError(f"training diverged at epoch {epoch}: {exc}") from None
                result.loss_trace.append(value)
                if cfg.line_search:
                    params, step = armijo_step(
                        params, grads, value, step, self._evaluator(positives, negatives),
                        shrink=cfg.step_shrink, sigma=cfg.sufficient_decrease, max_trials=cfg.max_step_trials,
                    )
                else:
                    params = projected_step(params, grads, cfg.learning_rate)
                if cfg.log_every and (epoch % cfg.log_every == 0 or epoch == cfg.epochs - 1):
                    self._log(f"{self.method.name} epoch {epoch + 1}/{cfg.epochs} loss={value:.6f} step={step:.3g}")
            elapsed = (time.perf_counter() - start) * 1000

        result.params = params
        result.metrics = TrainMetrics(
            total_ms=elapsed,
            epochs=cfg.epochs,
            initial_loss=result.loss_trace[0],
            final_loss=result.loss_trace[-1],
            final_step=step,
            memory_peak_mb=mem.peak_mb,
        )
        self._log(
            f"Done — {elapsed:.0f}ms | loss {result.metrics.initial_loss:.4f} -> {result.metrics.final_loss:.4f}"
        )
        return result


def train(
    g: DdiHypergraph,
    config: TrainConfig,
    method: BaseMethod | None = None,
    quiet: bool = False,
) -> tuple[ModelParams, list[float]]:
    """Train from the seeded initialization; returns the parameters and the per-epoch loss."""
    result = Trainer(config, method=method, quiet=quiet).fit(g)
    return result.params, result.loss_trace
