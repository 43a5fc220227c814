# tests/test_metrics.py
import numpy as np
import pytest

from config import RunConfig, SynthConfig
from evaluation.cross_validation import cross_validate
from evaluation.metrics import auc, aupr, infrequency_order, infrequent_curve, per_side_effect, safe_metrics
from evaluation.splits import eval_negatives, stratified_folds
from hypergraph.base import build_hypergraph
from synth.generator import generate


def _brute_auc(scores, labels) -> float:
    pos, neg = scores[labels], scores[~labels]
    wins = sum((p > n) + 0.5 * (p == n) for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


def _brute_aupr(scores, labels) -> float:
    total, previous_recall = 0.0, 0.0
    for threshold in sorted(set(scores.tolist()), reverse=True):
        predicted = scores >= threshold
        tp = int((predicted & labels).sum())
        precision = tp / int(predicted.sum())
        recall = tp / int(labels.sum())
        total += (recall - previous_recall) * precision
        previous_recall = recall
    return total


def _two_label_graph():
    """12 drugs: side effect 0 on 40 drug pairs, side effect 1 on 19."""
    pairs = np.array(np.triu_indices(12, k=1)).T
    triples = [(u, v, 0) for u, v in pairs[:40]] + [(u, v, 1) for u, v in pairs[20:39]]
    return build_hypergraph(12, 2, triples, np.zeros((12, 1)))


def _cv_config(**train) -> RunConfig:
    config = RunConfig()
    for key, value in dict(embedding_size=4, num_layers=1, epochs=10, learning_rate=0.05, log_every=0, seed=0, **train).items():
        setattr(config.train, key, value)
    config.eval.folds = 2
    config.jobs = 1
    return config


def _cv_graph():
    g, _ = generate(SynthConfig(n=4, a=2, D=14, m=2, seed=0))
    return g


# ── AUC / AUPR ────────────────────────────────────────────────────────

def test_auc_examples():
    assert auc([(0.9, 1), (0.8, 1), (0.2, 0), (0.1, 0)]) == 1.0
    assert auc([(0.5, 1), (0.5, 0), (0.5, 0)]) == 0.5
    assert auc([(0.9, 1), (0.8, 0), (0.4, 0), (0.3, 1)]) == 0.5


def test_aupr_examples():
    assert aupr([0.9, 0.8, 0.1], [1, 1, 0]) == 1.0
    n = 7
    assert aupr(np.linspace(1, 0, n + 1), [0] * n + [1]) == pytest.approx(1 / (n + 1))
    assert aupr(np.full(10, 0.3), [1, 1, 1] + [0] * 7) == pytest.approx(0.3)


def test_degenerate_labels_are_rejected():
    with pytest.raises(ValueError, match="degenerate"):
        auc([0.1, 0.2], [1, 1])
    with pytest.raises(ValueError, match="degenerate"):
        aupr([0.1, 0.2], [0, 0])
    assert safe_metrics([0.1, 0.2], [1, 1]) == (None, 1.0)
    assert safe_metrics([0.1, 0.2], [0, 0]) == (None, None)


def test_metrics_match_brute_force_with_ties():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n = int(rng.integers(2, 40))
        # Coarse grid keeps plenty of tied scores.
        scores = rng.integers(0, max(2, n // 3), size=n) / 10
        labels = rng.random(n) < 0.4
        labels[0], labels[1] = True, False
        assert abs(auc(scores, labels) - _brute_auc(scores, labels)) <= 1e-12
        assert abs(aupr(scores, labels) - _brute_aupr(scores, labels)) <= 1e-12


# ── Folds ─────────────────────────────────────────────────────────────

def test_round_robin_fold_counts():
    g = _two_label_graph()
    split = stratified_folds(g, 20, seed=1)
    counts = split.fold_counts(g)
    assert (counts[0] == 2).all()
    assert counts[1].max() - counts[1].min() == 1
    sizes = counts.sum(axis=0)
    assert sizes.max() - sizes.min() <= 1


def test_folds_partition_edges():
    g = _two_label_graph()
    split = stratified_folds(g, 5, seed=2)
    seen = np.concatenate([split.test_indices(f) for f in range(5)])
    assert sorted(seen.tolist()) == list(range(len(g.edges)))
    for f in range(5):
        train = set(split.train_indices(f).tolist())
        assert train.isdisjoint(split.test_indices(f).tolist())
        assert len(split.train_graph(g, f).edges) == len(train)


def test_folds_are_seeded_and_validated():
    g = _two_label_graph()
    assert np.array_equal(stratified_folds(g, 4, 3).fold_of, stratified_folds(g, 4, 3).fold_of)
    with pytest.raises(ValueError):
        stratified_folds(g, 1, 0)
    with pytest.raises(ValueError):
        stratified_folds(g, len(g.edges) + 1, 0)


# ── Evaluation negatives ──────────────────────────────────────────────

def test_eval_negatives_match_counts_and_avoid_edges():
    g = _two_label_graph()
    test = g.edge_array[g.edge_array[:, 2] == 0][:3]
    neg = eval_negatives(g, test, seed=4)
    assert len(neg) == 3 and (neg[:, 2] == 0).all()
    assert not g.contains_keys(g.triple_keys(neg)).any()
    assert np.array_equal(neg, eval_negatives(g, test, seed=4))


def test_eval_negatives_respect_exclusions():
    g = _two_label_graph()
    test = g.edge_array[g.edge_array[:, 2] == 1]
    first = eval_negatives(g, test, seed=5)
    second = eval_negatives(g, test, seed=6, exclude_keys=g.triple_keys(first))
    assert not set(g.triple_keys(first)) & set(g.triple_keys(second))


def test_eval_negatives_report_starved_side_effect():
    g = _two_label_graph()
    test = g.edge_array[g.edge_array[:, 2] == 0]
    # 66 pairs, 40 used by side effect 0: only 26 negatives exist for it.
    with pytest.raises(ValueError, match="side effect 0"):
        eval_negatives(g, test, seed=0)
    with pytest.raises(ValueError):
        eval_negatives(g, np.zeros((0, 3), dtype=np.int64), seed=0)


# ── Per side effect and infrequent curve ──────────────────────────────

def test_infrequency_order_breaks_ties_by_index():
    assert infrequency_order([5, 2, 2, 9, 1]).tolist() == [4, 1, 2, 0, 3]


def test_infrequent_curve_is_prefix_pooled():
    rng = np.random.default_rng(3)
    side_effects = rng.integers(0, 4, size=200)
    labels = rng.random(200) < 0.5
    scores = rng.random(200) + labels * 0.3
    frequencies = np.array([30, 5, 12, 5])
    curve = infrequent_curve(scores, labels, side_effects, frequencies)
    assert [p.side_effect for p in curve] == [1, 3, 2, 0]
    assert [p.count for p in curve] == [1, 2, 3, 4]
    assert curve[-1].auc == pytest.approx(auc(scores, labels), abs=1e-15)
    assert curve[-1].aupr == pytest.approx(aupr(scores, labels), abs=1e-15)
    mask = np.isin(side_effects, [1, 3])
    assert curve[1].auc == pytest.approx(auc(scores[mask], labels[mask]), abs=1e-15)


def test_single_side_effect_curve_is_constant():
    scores = [0.9, 0.2, 0.7, 0.4]
    labels = [1, 0, 1, 0]
    curve = infrequent_curve(scores, labels, [0, 0, 0, 0], [7])
    assert len(curve) == 1 and curve[0].auc == 1.0 and curve[0].frequency == 7


def test_per_side_effect_counts():
    out = per_side_effect([0.9, 0.1, 0.8, 0.7], [1, 0, 1, 1], [0, 0, 2, 2], 3)
    assert set(out) == {0, 2}
    assert out[0] == {"auc": 1.0, "aupr": 1.0, "positives": 1, "negatives": 1}
    assert out[2]["auc"] is None and out[2]["positives"] == 2


# ── Cross-validation ──────────────────────────────────────────────────

def test_cross_validation_smoke():
    g = _cv_graph()
    report = cross_validate(g, _cv_config())
    assert len(report.fold_auc) == 2
    assert all(0.0 <= x <= 1.0 for x in report.fold_auc + report.fold_aupr)
    data = report.to_dict()
    assert {"folds", "mean_auc", "std_auc", "mean_aupr", "std_aupr", "per_side_effect", "infrequent_curve"} <= set(data)
    assert data["provenance"]["folds"] == 2
    assert set(data["per_side_effect"]) <= set(g.side_effect_names)


def test_oracle_scorer_is_perfect():
    g = _cv_graph()

    def oracle(train_graph, triples):
        return g.contains_keys(g.triple_keys(triples)).astype(float)

    report = cross_validate(g, _cv_config(), F=3, scorer=oracle)
    assert report.fold_auc == [1.0, 1.0, 1.0]
    assert report.fold_aupr == [1.0, 1.0, 1.0]
    assert report.std_auc == 0.0


def test_cross_validation_is_deterministic():
    g = _cv_graph()
    a = cross_validate(g, _cv_config(), method="centsimple").to_dict()
    b = cross_validate(g, _cv_config(), method="centsimple").to_dict()
    assert a == b
    assert a["provenance"]["method"] == "centsimple"
