# evaluation/cross_validation.py
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from joblib import Parallel, delayed

from config import RunConfig
from evaluation.metrics import CurvePoint, auc, aupr, infrequent_curve, per_side_effect
from evaluation.splits import FoldSplit, eval_negatives, stratified_folds
from hypergraph.base import DdiHypergraph
from methods.factory import make_method
from training.trainer import single_thread, train
from utils.provenance import provenance
from utils.seeding import derive_seed

# (training graph, T x 3 triples) -> T scores. Replaces training, e.g. with an oracle.
Scorer = Callable[[DdiHypergraph, np.ndarray], np.ndarray]


@dataclass
class FoldResult:
    fold: int
    auc: float
    aupr: float
    triples: np.ndarray
    labels: np.ndarray
    scores: np.ndarray
    final_loss: float | None = None


@dataclass
class EvalReport:
    fold_auc: list[float]
    fold_aupr: list[float]
    per_side_effect: dict[str, dict] = field(default_factory=dict)
    infrequent_curve: list[CurvePoint] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    @property
    def mean_auc(self) -> float:
        return float(np.mean(self.fold_auc))

    @property
    def std_auc(self) -> float:
        return float(np.std(self.fold_auc))

    @property
    def mean_aupr(self) -> float:
        return float(np.mean(self.fold_aupr))

    @property
    def std_aupr(self) -> float:
        return float(np.std(self.fold_aupr))

    def to_dict(self) -> dict:
        return {
            "folds": [
                {"fold": i, "auc": a, "aupr": p}
                for i, (a, p) in enumerate(zip(self.fold_auc, self.fold_aupr))
            ],
            "mean_auc": self.mean_auc,
            "std_auc": self.std_auc,
            "mean_aupr": self.mean_aupr,
            "std_aupr": self.std_aupr,
            "per_side_effect": self.per_side_effect,
            "infrequent_curve": [p.to_dict() for p in self.infrequent_curve],
            "provenance": self.provenance,
        }


def _run_fold(
    g: DdiHypergraph,
    split: FoldSplit,
    fold: int,
    negatives: np.ndarray,
    config: RunConfig,
    scorer: Scorer | None,
) -> FoldResult:
    train_graph = split.train_graph(g, fold)
    positives = split.test_positives(g, fold)
    triples = np.concatenate([positives, negatives])
    labels = np.concatenate([np.ones(len(positives), dtype=bool), np.zeros(len(negatives), dtype=bool)])

    final_loss = None
    if scorer is not None:
        scores = np.asarray(scorer(train_graph, triples), dtype=np.float64)
    else:
        train_config = replace(config.train, seed=derive_seed(config.train.seed, fold))
        method = make_method(train_config.method, eps=train_config.eps)
        with single_thread():
            params, trace = train(train_graph, train_config, method=method, quiet=True)
            scores = method.predict_scores(params, train_graph, triples)
        final_loss = trace[-1] if trace else None

    result = FoldResult(fold, auc(scores, labels), aupr(scores, labels), triples, labels, scores, final_loss)
    print(f"[CrossValidation] fold {fold + 1}/{split.num_folds}: AUC={result.auc:.4f} AUPR={result.aupr:.4f}")
    return result


def cross_validate(
    g: DdiHypergraph,
    config: RunConfig,
    F: int | None = None,
    seed: int | None = None,
    method: str | None = None,
    jobs: int | None = None,
    scorer: Scorer | None = None,
) -> EvalReport:
    """
    Stratified F-fold cross-validation.

    Each fold trains on E minus the fold and scores the fold's positives
    plus matched negatives. Negatives for all folds are drawn up front,
    in fold order, so they never overlap and the result does not depend
    on ``jobs``.
    """
    F = config.eval.folds if F is None else F
    seed = config.train.seed if seed is None else seed
    jobs = config.jobs if jobs is None else jobs
    if method is not None:
        config = replace(config, train=replace(config.train, method=method))
    config.train.validate()

    split = stratified_folds(g, F, derive_seed(seed, 0))
    negatives, used = [], np.zeros(0, dtype=np.int64)
    for fold in range(F):
        neg = eval_negatives(
            g,
            split.test_positives(g, fold),
            derive_seed(seed, fold, 1),
            exclude_keys=used,
            ratio=config.eval.negatives_per_positive,
        )
        negatives.append(neg)
        used = np.union1d(used, g.triple_keys(neg))

    print(f"[CrossValidation] {config.train.method} | {F} folds | {len(g.edges)} edges | jobs={jobs}")
    folds = Parallel(n_jobs=jobs)(
        delayed(_run_fold)(g, split, fold, negatives[fold], config, scorer) for fold in range(F)
    )

    scores = np.concatenate([f.scores for f in folds])
    labels = np.concatenate([f.labels for f in folds])
    side_effects = np.concatenate([f.triples[:, 2] for f in folds])
    per_se = per_side_effect(scores, labels, side_effects, g.num_side_effects)
    report = EvalReport(
        fold_auc=[f.auc for f in folds],
        fold_aupr=[f.aupr for f in folds],
        per_side_effect={g.side_effect_name(t): values for t, values in per_se.items()},
        provenance={**provenance(config, seed), "method": config.train.method, "folds": F},
    )
    if config.eval.infrequent_curve:
        report.infrequent_curve = infrequent_curve(scores, labels, side_effects, g.side_effect_counts())
    print(
        f"[CrossValidation] mean AUC={report.mean_auc:.4f}±{report.std_auc:.4f} "
        f"mean AUPR={report.mean_aupr:.4f}±{report.std_aupr:.4f}"
    )
    return report
