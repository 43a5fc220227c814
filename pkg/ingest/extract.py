# ingest/extract.py
from collections import defaultdict
from itertools import combinations

import numpy as np
import scipy.sparse as sp
from joblib import Parallel, delayed

from ingest.fisher import ContingencyTable, LogFactorialTable, fisher_exact_one_sided
from ingest.formats import ReportTable

DEFAULT_ALPHA = 0.05


def _index_reports(reports: ReportTable):
    side_effects = sorted({s for r in reports.reports for s in r.side_effects})
    s_index = {s: j for j, s in enumerate(side_effects)}
    rows, cols = [], []
    for i, report in enumerate(reports.reports):
        for s in report.side_effects:
            rows.append(i)
            cols.append(s_index[s])
    occurrence = sp.csr_matrix(
        (np.ones(len(rows), dtype=np.int64), (rows, cols)),
        shape=(len(reports), len(side_effects)),
    )
    pair_reports: dict[tuple[str, str], list[int]] = defaultdict(list)
    for i, report in enumerate(reports.reports):
        for pair in combinations(sorted(report.drugs), 2):
            pair_reports[pair].append(i)
    return side_effects, occurrence, pair_reports


def _test_pairs(pairs, pair_reports, occurrence, se_totals, side_effects, total, alpha):
    lf = LogFactorialTable(total)
    kept = []
    for pair in pairs:
        exposed_ids = pair_reports[pair]
        n = len(exposed_ids)
        exposed_counts = np.asarray(occurrence[exposed_ids].sum(axis=0)).ravel()
        for j in np.flatnonzero(exposed_counts):
            a = int(exposed_counts[j])
            c = int(se_totals[j]) - a
            table = ContingencyTable(a=a, b=n - a, c=c, d=total - n - c)
            if alpha >= 1.0 or fisher_exact_one_sided(table, lf) < alpha:
                kept.append((pair[0], pair[1], side_effects[j]))
    return kept


def extract_significant(reports: ReportTable, alpha: float = DEFAULT_ALPHA, jobs: int = 1) -> list[tuple[str, str, str]]:
    """
    Significant (drugA, drugB, sideEffect) triples, drugA < drugB, sorted.

    For every drug pair seen together in some report, reports holding both
    drugs form the exposed group and all other reports the nonexposed one;
    a side effect is kept when its rate is significantly higher in the
    exposed group (one-sided Fisher test, p < alpha). With alpha >= 1
    every co-occurring triple is kept.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if len(reports) == 0:
        return []
    side_effects, occurrence, pair_reports = _index_reports(reports)
    se_totals = np.asarray(occurrence.sum(axis=0)).ravel()
    pairs = sorted(pair_reports)
    print(f"[Extract] {len(reports)} reports | {len(pairs)} co-occurring drug pairs | {len(side_effects)} side effects")

    chunk = max(1, -(-len(pairs) // max(1, jobs * 4)))
    batches = [pairs[i:i + chunk] for i in range(0, len(pairs), chunk)]
    results = Parallel(n_jobs=jobs)(
        delayed(_test_pairs)(batch, pair_reports, occurrence, se_totals, side_effects, len(reports), alpha)
        for batch in batches
    )
    kept = sorted(triple for part in results for triple in part)
    print(f"[Extract] {len(kept)} significant triples at alpha={alpha}")
    return kept
