# tests/test_ingest.py
from fractions import Fraction
from math import comb
from random import Random

import numpy as np
import pytest

from hypergraph.base import build_hypergraph
from ingest.extract import extract_significant
from ingest.fisher import ContingencyTable, LogFactorialTable, fisher_exact_one_sided
from ingest.formats import (
    FormatError,
    ReportTable,
    load_dataset,
    load_features,
    load_reports,
    load_triples,
)


def _write(path, text: str):
    path.write_text(text, encoding="utf-8")
    return path


def _exact_tail(a, b, c, d) -> float:
    N, K, n = a + b + c + d, a + c, a + b
    if min(n, N - n, K, N - K) == 0:
        return 1.0
    tail = sum(Fraction(comb(K, x) * comb(N - K, n - x), comb(N, n)) for x in range(a, min(n, K) + 1))
    return float(tail)


# ── File formats ──────────────────────────────────────────────────────

def test_mirrored_duplicate_collapses(tmp_path):
    path = _write(tmp_path / "t.tsv", "# header\nA\tB\tnausea\nB\tA\tnausea\nA\tC\trash\n")
    parsed = load_triples(path)
    assert parsed.drug_names == ("A", "B", "C")
    assert parsed.side_effect_names == ("nausea", "rash")
    assert len(parsed.triples) == 3
    g = build_hypergraph(3, 2, parsed.triples, np.zeros((3, 1)))
    assert len(g.edges) == 2


def test_empty_triple_file_is_an_error_only_when_strict(tmp_path):
    path = _write(tmp_path / "t.tsv", "# nothing\n")
    assert load_triples(path).triples.shape == (0, 3)
    with pytest.raises(FormatError):
        load_triples(path, strict=True)


def test_malformed_triple_lines(tmp_path):
    with pytest.raises(FormatError, match=r"t.tsv:2: expected 3"):
        load_triples(_write(tmp_path / "t.tsv", "A\tB\tx\nA\tB\n"))
    with pytest.raises(FormatError, match="expected 3"):
        load_triples(_write(tmp_path / "t.tsv", "A\tB\tnau\tsea\n"))
    with pytest.raises(FormatError, match="self-pair"):
        load_triples(_write(tmp_path / "t.tsv", "A\tA\tx\n"))


def test_features_realign_by_name(tmp_path):
    path = _write(tmp_path / "f.tsv", "drug\tf0\tf1\tf2\tf3\nB\t0\t1\t0\t1\nA\t1\t0\t1\t0\n")
    X = load_features(path, {"A": 0, "B": 1})
    assert X.shape == (2, 4)
    assert X[0].tolist() == [1.0, 0.0, 1.0, 0.0]
    assert X[1].tolist() == [0.0, 1.0, 0.0, 1.0]


def test_feature_errors(tmp_path):
    path = _write(tmp_path / "f.tsv", "drug\tf0\nA\t1\n")
    with pytest.raises(ValueError, match="'B' has no feature row"):
        load_features(path, {"A": 0, "B": 1})
    with pytest.raises(FormatError, match="unknown drug"):
        load_features(path, {"B": 0})
    with pytest.raises(FormatError, match="dimension mismatch"):
        load_features(_write(tmp_path / "g.tsv", "drug\tf0\tf1\nA\t1\n"), {"A": 0})
    with pytest.raises(FormatError, match="duplicate"):
        load_features(_write(tmp_path / "h.tsv", "drug\tf0\nA\t1\nA\t2\n"), {"A": 0})


def test_load_dataset_includes_feature_only_drugs(tmp_path):
    _write(tmp_path / "triples.tsv", "A\tB\tx\n")
    _write(tmp_path / "features.tsv", "drug\tf0\nC\t3\nB\t2\nA\t1\n")
    g = load_dataset(tmp_path)
    assert g.drug_names == ("A", "B", "C")
    assert g.drug_features[:, 0].tolist() == [1.0, 2.0, 3.0]
    assert [e.as_tuple() for e in g.edges] == [(0, 1, 0)]


def test_load_dataset_requires_both_files(tmp_path):
    _write(tmp_path / "triples.tsv", "A\tB\tx\n")
    with pytest.raises(FileNotFoundError, match="features.tsv"):
        load_dataset(tmp_path)


def test_load_reports(tmp_path):
    table = load_reports(_write(tmp_path / "r.tsv", "A,B\tx,y\n# c\nC\t\n"))
    assert len(table) == 2
    assert table.reports[0].drugs == frozenset({"A", "B"})
    assert table.reports[1].side_effects == frozenset()
    with pytest.raises(FormatError, match="empty drug set"):
        load_reports(_write(tmp_path / "bad.tsv", "\tx\n"))


# ── Fisher exact test ─────────────────────────────────────────────────

def test_planted_table_p_value():
    assert fisher_exact_one_sided(ContingencyTable(5, 0, 0, 5)) == pytest.approx(1 / 252, abs=1e-15)


def test_least_extreme_observation_gives_one():
    assert fisher_exact_one_sided(ContingencyTable(0, 4, 3, 3)) == pytest.approx(1.0)
    assert fisher_exact_one_sided(ContingencyTable(3, 0, 0, 0)) == 1.0


def test_balanced_tables_are_not_significant():
    for a, b in ((2, 2), (3, 5), (1, 1)):
        assert fisher_exact_one_sided(ContingencyTable(a, b, a, b)) >= 0.5


def test_negative_counts_are_rejected():
    with pytest.raises(ValueError):
        ContingencyTable(1, -1, 0, 0)


def _tables(max_total: int):
    for N in range(max_total + 1):
        for n in range(N + 1):
            for K in range(N + 1):
                for a in range(max(0, n + K - N), min(n, K) + 1):
                    yield a, n - a, K - a, N - n - K + a


def test_matches_enumeration_oracle_small_tables():
    lf = LogFactorialTable(4)
    for table in _tables(30):
        assert abs(fisher_exact_one_sided(ContingencyTable(*table), lf) - _exact_tail(*table)) <= 1e-12, table


@pytest.mark.slow
def test_matches_enumeration_oracle_up_to_sixty():
    lf = LogFactorialTable()
    for table in _tables(60):
        assert abs(fisher_exact_one_sided(ContingencyTable(*table), lf) - _exact_tail(*table)) <= 1e-12, table


def test_p_value_is_monotone_in_a():
    # Fixed margins N=20, n=8, K=9: moving mass into a never raises p.
    previous = 1.0
    for a in range(0, 9):
        p = fisher_exact_one_sided(ContingencyTable(a, 8 - a, 9 - a, 3 + a))
        assert p <= previous + 1e-15
        previous = p


# ── Extraction ────────────────────────────────────────────────────────

def _planted_reports() -> list[tuple[list[str], list[str]]]:
    rows = [(["A", "B"], ["x"])] * 5
    rows += [(["A"], ["y"]), (["B"], ["y"]), (["C"], ["y"]), (["C"], ["z"]), (["A", "C"], ["y"])]
    return rows


def test_planted_triple_is_the_only_one_kept():
    assert extract_significant(ReportTable.from_rows(_planted_reports()), alpha=0.05) == [("A", "B", "x")]


def test_alpha_one_keeps_every_co_occurring_triple():
    kept = extract_significant(ReportTable.from_rows(_planted_reports()), alpha=1.0)
    assert kept == [("A", "B", "x"), ("A", "C", "y")]


def test_degenerate_nonexposed_group_drops_triple():
    table = ReportTable.from_rows([(["A", "B"], ["x"])] * 4)
    assert extract_significant(table) == []


def test_empty_and_invalid_inputs():
    assert extract_significant(ReportTable(())) == []
    with pytest.raises(ValueError, match="alpha"):
        extract_significant(ReportTable.from_rows(_planted_reports()), alpha=0.0)


def test_extraction_ignores_report_order_and_jobs():
    rows = _planted_reports() + [(["B", "D"], ["x", "z"]), (["D", "E", "A"], ["w"])] * 3
    expected = extract_significant(ReportTable.from_rows(rows))
    shuffled = list(rows)
    Random(0).shuffle(shuffled)
    assert extract_significant(ReportTable.from_rows(shuffled), jobs=2) == expected
