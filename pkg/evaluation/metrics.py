# evaluation/metrics.py
from dataclasses import dataclass, asdict

import numpy as np
from sklearn.metrics import average_precision_score, roc_auc_score


def _split_pairs(scores, labels):
    if labels is None:
        pairs = np.asarray(list(scores), dtype=np.float64).reshape(-1, 2)
        scores, labels = pairs[:, 0], pairs[:, 1]
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel().astype(bool)
    if scores.shape != labels.shape:
        raise ValueError(f"dimension mismatch: {scores.size} scores for {labels.size} labels")
    return scores, labels


def auc(scores, labels=None) -> float:
    """
    Mann-Whitney AUC: chance a random positive outscores a random negative,
    ties counting one half. Accepts (score, label) pairs or two arrays.
    """
    scores, labels = _split_pairs(scores, labels)
    if labels.all() or not labels.any():
        raise ValueError("degenerate label set: AUC needs at least one positive and one negative")
    return float(roc_auc_score(labels, scores))


def aupr(scores, labels=None) -> float:
    """Area under the precision-recall step curve, equal scores taken as one threshold."""
    scores, labels = _split_pairs(scores, labels)
    if not labels.any():
        raise ValueError("degenerate label set: AUPR needs at least one positive")
    return float(average_precision_score(labels, scores))


def safe_metrics(scores, labels) -> tuple[float | None, float | None]:
    """(auc, aupr), with None where the labels make a metric undefined."""
    scores, labels = _split_pairs(scores, labels)
    if not labels.any():
        return None, None
    if labels.all():
        return None, aupr(scores, labels)
    return auc(scores, labels), aupr(scores, labels)


@dataclass
class CurvePoint:
    """Pooled metrics over the ``count`` most infrequent side effects."""
    count: int
    side_effect: int
    frequency: int
    auc: float | None
    aupr: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def infrequency_order(frequencies) -> np.ndarray:
    """Side-effect indices by ascending frequency, ties by ascending index."""
    frequencies = np.asarray(frequencies)
    return np.lexsort((np.arange(len(frequencies)), frequencies))


def infrequent_curve(scores, labels, side_effects, frequencies) -> list[CurvePoint]:
    """
    Start from the rarest side effect and add the next rarest at each
    point; each point pools every scored triple of the included side
    effects. Side effects with no scored triples add no point.
    """
    scores, labels = _split_pairs(scores, labels)
    side_effects = np.asarray(side_effects, dtype=np.int64).ravel()
    frequencies = np.asarray(frequencies)
    present = np.zeros(len(frequencies), dtype=bool)
    present[side_effects] = True

    # Position of each side effect in the infrequency order; a triple enters at its side effect's rank.
    order = [t for t in infrequency_order(frequencies) if present[t]]
    rank = np.full(len(frequencies), len(order), dtype=np.int64)
    rank[order] = np.arange(len(order))
    triple_rank = rank[side_effects]

    points = []
    for i, t in enumerate(order):
        mask = triple_rank <= i
        point_auc, point_aupr = safe_metrics(scores[mask], labels[mask])
        points.append(CurvePoint(i + 1, int(t), int(frequencies[t]), point_auc, point_aupr))
    return points


def per_side_effect(scores, labels, side_effects, num_side_effects: int) -> dict[int, dict]:
    """AUC / AUPR and counts for every side effect with scored triples."""
    scores, labels = _split_pairs(scores, labels)
    side_effects = np.asarray(side_effects, dtype=np.int64).ravel()
    out = {}
    for t in range(num_side_effects):
        mask = side_effects == t
        if not mask.any():
            continue
        t_auc, t_aupr = safe_metrics(scores[mask], labels[mask])
        out[t] = {
            "auc": t_auc,
            "aupr": t_aupr,
            "positives": int(labels[mask].sum()),
            "negatives": int((~labels[mask]).sum()),
        }
    return out
