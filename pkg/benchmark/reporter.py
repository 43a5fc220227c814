# benchmark/reporter.py
import json
import math
import os

import pandas as pd

from benchmark.runner import ComboResult
from evaluation.cross_validation import EvalReport


def _clean(value):
    """JSON-safe copy: NaN becomes null so reports stay valid, comparable JSON."""
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def write_json(path: str, data) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_clean(data), f, indent=2, sort_keys=True)
        f.write("\n")


def write_csv(path: str, rows: list[dict], header_line: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        if header_line:
            f.write(header_line + "\n")
        pd.DataFrame(rows).to_csv(f, index=False, float_format="%.10g", lineterminator="\n")


class BenchmarkReporter:
    """Saves evaluation and benchmark results as JSON + CSV and prints summary tables."""

    def __init__(self, output_dir: str = "reports", header_line: str | None = None):
        self.output_dir = output_dir
        self.header_line = header_line
        os.makedirs(output_dir, exist_ok=True)

    def _path(self, filename: str) -> str:
        return os.path.join(self.output_dir, filename)

    # ── Single evaluation ─────────────────────────────────────────────

    def save_report(self, report: EvalReport, prefix: str = "eval") -> list[str]:
        """``<prefix>.json``, ``<prefix>_folds.csv`` and, when present, ``<prefix>_curve.csv``."""
        paths = [self._path(f"{prefix}.json"), self._path(f"{prefix}_folds.csv")]
        write_json(paths[0], report.to_dict())
        write_csv(paths[1], report.to_dict()["folds"], self.header_line)
        if report.infrequent_curve:
            paths.append(self._path(f"{prefix}_curve.csv"))
            write_csv(paths[-1], [p.to_dict() for p in report.infrequent_curve], self.header_line)
        self.print_report(report)
        print(f"\nResults saved → {', '.join(paths)}")
        return paths

    def print_report(self, report: EvalReport):
        W = 40
        print("\n" + "=" * W)
        print("CROSS-VALIDATION")
        print("=" * W)
        print(f"{'Fold':<8} {'AUC':>10} {'AUPR':>10}")
        print("─" * W)
        for i, (a, p) in enumerate(zip(report.fold_auc, report.fold_aupr)):
            print(f"{i:<8} {a:>10.4f} {p:>10.4f}")
        print("─" * W)
        print(f"{'mean':<8} {report.mean_auc:>10.4f} {report.mean_aupr:>10.4f}")
        print(f"{'std':<8} {report.std_auc:>10.4f} {report.std_aupr:>10.4f}")

    # ── Method comparison ─────────────────────────────────────────────

    def save_all(self, results: list[ComboResult], filename: str = "benchmark_results.json") -> str:
        """Save JSON and CSV and print the summary table."""
        path = self._path(filename)
        self.save_json(results, path)
        write_csv(path.removesuffix(".json") + ".csv", [r.summary_row() for r in results], self.header_line)
        self.print_table(results)
        print(f"\nResults saved → {path}")
        return path

    def save_json(self, results: list[ComboResult], path: str):
        data = [
            {
                "combo": r.combo,
                "method": r.method,
                "dataset": r.dataset,
                "edges": r.num_edges,
                "report": r.report.to_dict(),
            }
            for r in results
        ]
        write_json(path, data)

    def print_table(self, results: list[ComboResult]):
        by_auc = sorted(results, key=lambda r: (r.dataset, -r.report.mean_auc))

        W = 78
        print("\n" + "=" * W)
        print("BENCHMARK RESULTS — per dataset, sorted by mean AUC")
        print("=" * W)
        print(f"{'Dataset':<14} {'Method':<14} {'Edges':>8} {'AUC':>9} {'±':>7} {'AUPR':>9} {'±':>7}")
        print("─" * W)
        for r in by_auc:
            rep = r.report
            print(
                f"{r.dataset:<14} {r.method:<14} {r.num_edges:>8} "
                f"{rep.mean_auc:>9.4f} {rep.std_auc:>7.4f} "
                f"{rep.mean_aupr:>9.4f} {rep.std_aupr:>7.4f}"
            )
        print("─" * W)
