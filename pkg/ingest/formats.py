# ingest/formats.py
"""
Plain-text dataset formats.

  triples.tsv   drugA<TAB>drugB<TAB>sideEffect, one triple per line
  features.tsv  header ``drug<TAB>f0<TAB>f1...`` then one row of reals per drug
  ledger.tsv    drug<TAB>g1,g2,... (synthetic group assignments)
  reports.tsv   drug1,drug2,...<TAB>se1,se2,...

Lines starting with ``#`` are comments, so every writer can prepend a
provenance header.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from hypergraph.base import DdiHypergraph, build_hypergraph

TRIPLES_FILE = "triples.tsv"
FEATURES_FILE = "features.tsv"
LEDGER_FILE = "ledger.tsv"


class FormatError(ValueError):
    """Malformed input file; carries the path and 1-based line number."""

    def __init__(self, path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


@dataclass(frozen=True)
class TripleFile:
    """Parsed triple file: index rows plus the name maps they refer to."""
    triples: np.ndarray                     # T x 3 int64, duplicates kept
    drug_names: tuple[str, ...]
    side_effect_names: tuple[str, ...]

    @property
    def drug_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.drug_names)}


@dataclass(frozen=True)
class Report:
    drugs: frozenset[str]
    side_effects: frozenset[str] = field(default_factory=frozenset)


@dataclass(frozen=True)
class ReportTable:
    reports: tuple[Report, ...]

    def __len__(self) -> int:
        return len(self.reports)

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[Iterable[str], Iterable[str]]]) -> "ReportTable":
        reports = []
        for drugs, side_effects in rows:
            drugs = frozenset(drugs)
            if not drugs:
                raise ValueError("report with an empty drug set")
            reports.append(Report(drugs, frozenset(side_effects)))
        return cls(tuple(reports))


def _data_lines(path) -> Iterator[tuple[int, str]]:
    with open(path, encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            yield line_no, line


def _check_name(path, line_no: int, name: str, what: str) -> str:
    if not name or name != name.strip():
        raise FormatError(path, line_no, f"empty or padded {what} name {name!r}")
    return name


def read_triple_names(path) -> list[tuple[str, str, str]]:
    rows = []
    for line_no, line in _data_lines(path):
        cols = line.split("\t")
        if len(cols) != 3:
            raise FormatError(path, line_no, f"expected 3 tab-separated columns, got {len(cols)}")
        a, b, s = (_check_name(path, line_no, c, w) for c, w in zip(cols, ("drug", "drug", "side-effect")))
        if a == b:
            raise FormatError(path, line_no, f"self-pair: drug {a!r} paired with itself")
        rows.append((a, b, s))
    return rows


def load_triples(path, strict: bool = False, drug_names: Iterable[str] = ()) -> TripleFile:
    """
    Parse a triple file. Name maps are sorted lexicographically; extra
    ``drug_names`` (e.g. drugs that only appear in the feature file)
    join the drug map. An empty file is an error only when ``strict``.
    """
    rows = read_triple_names(path)
    if strict and not rows:
        raise FormatError(path, 0, "no triples")
    drugs = sorted({name for a, b, _ in rows for name in (a, b)} | set(drug_names))
    side_effects = sorted({s for _, _, s in rows})
    d_index = {n: i for i, n in enumerate(drugs)}
    s_index = {n: i for i, n in enumerate(side_effects)}
    triples = np.array([(d_index[a], d_index[b], s_index[s]) for a, b, s in rows], dtype=np.int64).reshape(-1, 3)
    return TripleFile(triples, tuple(drugs), tuple(side_effects))


def read_feature_rows(path) -> tuple[list[str], np.ndarray, list[int]]:
    """Drug names, the raw value matrix and each row's line number, in file order."""
    names, values, line_nos = [], [], []
    width = None
    header_seen = False
    for line_no, line in _data_lines(path):
        cols = line.split("\t")
        if not header_seen:
            if cols[0] != "drug":
                raise FormatError(path, line_no, "feature file must start with a 'drug<TAB>f0...' header")
            width = len(cols) - 1
            header_seen = True
            continue
        if len(cols) - 1 != width:
            raise FormatError(path, line_no, f"dimension mismatch: expected {width} feature values, got {len(cols) - 1}")
        try:
            row = [float(c) for c in cols[1:]]
        except ValueError as exc:
            raise FormatError(path, line_no, f"non-numeric feature value ({exc})") from None
        names.append(_check_name(path, line_no, cols[0], "drug"))
        values.append(row)
        line_nos.append(line_no)
    if not header_seen:
        raise FormatError(path, 0, "empty feature file")
    return names, np.asarray(values, dtype=np.float64).reshape(len(names), width), line_nos


def load_features(path, drug_index: dict[str, int]) -> np.ndarray:
    """Feature matrix with row i holding the drug whose index is i."""
    names, values, line_nos = read_feature_rows(path)
    out = np.zeros((len(drug_index), values.shape[1]), dtype=np.float64)
    seen = set()
    for name, row, line_no in zip(names, values, line_nos):
        if name not in drug_index:
            raise FormatError(path, line_no, f"unknown drug {name!r} in features")
        if name in seen:
            raise FormatError(path, line_no, f"duplicate feature row for drug {name!r}")
        seen.add(name)
        out[drug_index[name]] = row
    missing = [name for name in drug_index if name not in seen]
    if missing:
        raise ValueError(f"{path}: drug {missing[0]!r} has no feature row")
    return out


def load_dataset(directory, strict: bool = False) -> DdiHypergraph:
    """Load ``triples.tsv`` and ``features.tsv`` from a dataset directory."""
    directory = Path(directory)
    triples_path, features_path = directory / TRIPLES_FILE, directory / FEATURES_FILE
    for path in (triples_path, features_path):
        if not path.is_file():
            raise FileNotFoundError(f"missing dataset file {path}")
    feature_drugs, _, _ = read_feature_rows(features_path)
    parsed = load_triples(triples_path, strict=strict, drug_names=feature_drugs)
    features = load_features(features_path, parsed.drug_index)
    return build_hypergraph(
        len(parsed.drug_names),
        len(parsed.side_effect_names),
        parsed.triples,
        features,
        drug_names=parsed.drug_names,
        side_effect_names=parsed.side_effect_names,
    )


def load_ledger(path) -> dict[str, tuple[int, ...]]:
    ledger = {}
    for line_no, line in _data_lines(path):
        cols = line.split("\t")
        if len(cols) != 2:
            raise FormatError(path, line_no, f"expected 2 tab-separated columns, got {len(cols)}")
        try:
            ledger[cols[0]] = tuple(int(x) for x in cols[1].split(",") if x)
        except ValueError:
            raise FormatError(path, line_no, f"non-integer group in {cols[1]!r}") from None
    return ledger


def load_reports(path) -> ReportTable:
    rows = []
    for line_no, line in _data_lines(path):
        cols = line.split("\t")
        if len(cols) != 2:
            raise FormatError(path, line_no, f"expected 'drugs<TAB>side effects', got {len(cols)} columns")
        drugs = [d.strip() for d in cols[0].split(",") if d.strip()]
        side_effects = [s.strip() for s in cols[1].split(",") if s.strip()]
        if not drugs:
            raise FormatError(path, line_no, "report with an empty drug set")
        rows.append((drugs, side_effects))
    return ReportTable.from_rows(rows)


def _write_lines(path, lines: Iterable[str], header: str | None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        if header:
            f.write(header + "\n")
        for line in lines:
            f.write(line + "\n")


def write_triples(path, g: DdiHypergraph, header: str | None = None, triples: np.ndarray | None = None) -> None:
    """Write g's edges (or the given index rows) by name."""
    rows = g.edge_array if triples is None else np.asarray(triples, dtype=np.int64).reshape(-1, 3)
    _write_lines(
        path,
        (f"{g.drug_name(u)}\t{g.drug_name(v)}\t{g.side_effect_name(t)}" for u, v, t in rows),
        header,
    )


def write_name_triples(path, rows: Iterable[tuple[str, str, str]], header: str | None = None) -> None:
    _write_lines(path, ("\t".join(row) for row in rows), header)


def write_features(path, g: DdiHypergraph, header: str | None = None) -> None:
    width = g.feature_dim
    lines = ["\t".join(["drug"] + [f"f{j}" for j in range(width)])]
    for i in range(g.num_drugs):
        lines.append("\t".join([g.drug_name(i)] + [repr(float(x)) for x in g.drug_features[i]]))
    _write_lines(path, lines, header)


def write_ledger(path, drug_names: Iterable[str], groups: Iterable[Iterable[int]], header: str | None = None) -> None:
    _write_lines(
        path,
        (f"{name}\t{','.join(str(x) for x in grp)}" for name, grp in zip(drug_names, groups)),
        header,
    )
