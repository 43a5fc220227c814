# run_synthetic_benchmark.py
# Desk-scale method comparison on the synthetic m-sweep.
# Run from project root: python run_synthetic_benchmark.py [--jobs 4]
from dataclasses import replace
import sys

from benchmark.reporter import BenchmarkReporter
from benchmark.runner import BenchmarkRunner
from config import CONFIG, METHODS
from synth.generator import sweep
from utils.provenance import provenance_header

M_VALUES = [1, 2, 3, 4, 5, 6]

jobs = int(sys.argv[sys.argv.index("--jobs") + 1]) if "--jobs" in sys.argv else CONFIG.jobs

# ── Desk-scale configuration ──────────────────────────────────────────
config = replace(
    CONFIG,
    synth=replace(CONFIG.synth, D=200, n=10, a=3, sigma=0.01),
    train=replace(CONFIG.train, embedding_size=20, num_layers=2),
    eval=replace(CONFIG.eval, folds=5),
    jobs=jobs,
)

# ── Generate datasets ─────────────────────────────────────────────────
print(f"Generating synthetic datasets for m in {M_VALUES}...")
datasets = {f"m{m}": g for m, g, _ in sweep(config.synth, M_VALUES, jobs=jobs)}
for name, g in datasets.items():
    print(f"  {name}: {g}")

# ── Run benchmark ─────────────────────────────────────────────────────
runner = BenchmarkRunner(datasets=datasets, methods=list(METHODS), config=config)
results = runner.run_all()

# ── Save reports ──────────────────────────────────────────────────────
reporter = BenchmarkReporter(output_dir=config.paths.output_dir, header_line=provenance_header(config))
reporter.save_all(results, filename="synthetic_benchmark.json")
