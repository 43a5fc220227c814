# cli.py
"""
csh-ddi command line.

    python cli.py synth --m 1..6 --seed 7 --out data/synth
    python cli.py train --data data/synth/m1 --out reports/m1
    python cli.py eval --data data/synth/m1 --folds 5 --out reports/m1
    python cli.py predict --data data/synth/m1 --checkpoint reports/m1/model.ckpt --side-effect S_0_1
    python cli.py extract --reports reports.tsv --out triples.tsv
    python cli.py dump --data data/synth/m1 --checkpoint reports/m1/model.ckpt --laplacian k=0
    python cli.py benchmark --m 1..6 --folds 5 --out reports/bench
    python cli.py grid --data data/synth/m1 --folds 5 --out reports/grid

Every command accepts --config, --seed and --jobs. Errors print one
``error: <Type>: <message>`` line on stderr and exit with status 1.
"""
import sys
from pathlib import Path
from typing import Annotated, Optional

import click
import numpy as np
import pandas as pd
import typer

from benchmark.grid import grid_search
from benchmark.reporter import BenchmarkReporter, write_json
from benchmark.runner import BenchmarkRunner
from config import METHODS, RunConfig, load_run_config
from evaluation.cross_validation import cross_validate
from ingest.extract import extract_significant
from ingest.formats import load_dataset, load_reports, write_name_triples
from laplacians.base import SideEffectWeights
from methods.factory import make_method
from model.inference import (
    active_dimensions,
    embedding_frame,
    rank_unknown,
    resolve_drug,
    resolve_side_effect,
    side_effect_neighbors,
    weight_frame,
)
from model.params import init_params
from synth.generator import sweep, write_dataset
from training.checkpoint import load_checkpoint, save_checkpoint, save_loss_trace
from training.trainer import Trainer
from utils.provenance import provenance_header

app = typer.Typer(add_completion=False, pretty_exceptions_enable=False, help="Central-smoothing hypergraph networks for DDI side effects.")

ConfigOpt = Annotated[Optional[Path], typer.Option("--config", help="key = value config file")]
SeedOpt = Annotated[Optional[int], typer.Option("--seed", help="seed for training and generation")]
JobsOpt = Annotated[Optional[int], typer.Option("--jobs", help="parallel folds / datasets")]
DataOpt = Annotated[Path, typer.Option("--data", help="dataset directory with triples.tsv and features.tsv")]
OutOpt = Annotated[Optional[Path], typer.Option("--out", help="output directory")]
MethodOpt = Annotated[Optional[str], typer.Option("--method", help=f"one of {', '.join(METHODS)}")]
EmbeddingOpt = Annotated[Optional[int], typer.Option("--embedding-size", "-K")]
LayersOpt = Annotated[Optional[int], typer.Option("--layers", "-N")]
LamOpt = Annotated[Optional[float], typer.Option("--lam", help="weight of the negative term")]
LrOpt = Annotated[Optional[float], typer.Option("--lr")]
EpochsOpt = Annotated[Optional[int], typer.Option("--epochs")]
FoldsOpt = Annotated[Optional[int], typer.Option("--folds")]
MOpt = Annotated[Optional[str], typer.Option("--m", help="max groups per drug: 3, 1..6 or 1,3,5")]


def parse_int_list(text: str) -> list[int]:
    """``4`` -> [4], ``1..6`` -> [1..6], ``1,3,5`` -> [1, 3, 5]."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
            return list(range(lo, hi + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValueError(f"cannot parse integer list {text!r}") from None


def resolve_config(config_path: Optional[Path], seed: Optional[int], jobs: Optional[int], **overrides) -> RunConfig:
    """Defaults < environment < config file < flags; logs the resolved settings."""
    if seed is not None:
        overrides["train.seed"] = seed
        overrides["synth.seed"] = seed
    overrides["jobs"] = jobs
    config = load_run_config(str(config_path) if config_path else None, overrides)
    print(f"[Config] hash={config.config_hash()}")
    for key, value in config.resolved_dict().items():
        print(f"[Config]   {key} = {value}")
    for notice in config.train.grid_notices():
        print(f"[Config] notice: {notice}")
    return config


def _train_overrides(method, embedding_size, layers, lam, lr, epochs) -> dict:
    return {
        "method": method,
        "embedding_size": embedding_size,
        "num_layers": layers,
        "lam": lam,
        "learning_rate": lr,
        "epochs": epochs,
    }


def _output_dir(config: RunConfig, out: Optional[Path]) -> Path:
    directory = Path(out) if out is not None else Path(config.paths.output_dir)
    directory.mkdir(parents=True, exist_ok=True)
    return directory


def _write_frame(path: Path, frame: pd.DataFrame, header: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(header + "\n")
        frame.to_csv(f, sep="\t", index=False, float_format="%.10g", lineterminator="\n")


def _load_model(data: Path, checkpoint: Optional[Path], config: RunConfig):
    """Graph, method and parameters; untrained parameters when no checkpoint is given."""
    g = load_dataset(data)
    if checkpoint is None:
        print("[Dump] warning: no checkpoint given; using initialized parameters")
        cfg = config.train
        params = init_params(g.feature_dim, cfg.embedding_size, g.num_side_effects, cfg.num_layers, seed=cfg.seed)
        method = make_method(cfg.method, eps=cfg.eps)
    else:
        params, meta = load_checkpoint(checkpoint)
        if int(meta["drugs"]) != g.num_drugs:
            raise ValueError(f"dimension mismatch: checkpoint was trained on {meta['drugs']} drugs, dataset has {g.num_drugs}")
        method = make_method(meta.get("method", config.train.method), eps=config.train.eps)
    params.validate(feature_dim=g.feature_dim, num_side_effects=g.num_side_effects)
    method.setup(g)
    return g, method, params


@app.command()
def synth(
    out: Annotated[Path, typer.Option("--out", help="directory receiving one m<k>/ dataset per m")],
    m: MOpt = None,
    n: Annotated[Optional[int], typer.Option("--n", help="feature groups")] = None,
    a: Annotated[Optional[int], typer.Option("--a", help="features per group")] = None,
    drugs: Annotated[Optional[int], typer.Option("--drugs", help="number of drugs D")] = None,
    sigma: Annotated[Optional[float], typer.Option("--sigma")] = None,
    config_path: ConfigOpt = None,
    seed: SeedOpt = None,
    jobs: JobsOpt = None,
):
    """Generate synthetic datasets for one or more values of m."""
    config = resolve_config(config_path, seed, jobs, n=n, a=a, D=drugs, sigma=sigma)
    m_values = parse_int_list(m) if m else [config.synth.m]
    header = provenance_header(config, config.synth.seed)
    for m_value, g, assignment in sweep(config.synth, m_values, jobs=config.jobs):
        directory = write_dataset(Path(out) / f"m{m_value}", g, assignment, header)
        print(f"[Synth] m={m_value}: {g} → {directory}")


@app.command()
def train(
    data: DataOpt,
    out: OutOpt = None,
    method: MethodOpt = None,
    embedding_size: EmbeddingOpt = None,
    layers: LayersOpt = None,
    lam: LamOpt = None,
    lr: LrOpt = None,
    epochs: EpochsOpt = None,
    config_path: ConfigOpt = None,
    seed: SeedOpt = None,
    jobs: JobsOpt = None,
):
    """Train on a dataset; writes model.ckpt and loss.csv."""
    config = resolve_config(config_path, seed, jobs, **_train_overrides(method, embedding_size, layers, lam, lr, epochs))
    g = load_dataset(data)
    trainer = Trainer(config.train)
    setup = trainer.method.setup_and_time(g)
    print(f"[Train] setup {setup.to_dict()}")
    result = trainer.fit(g)
    directory = _output_dir(config, out)
    save_checkpoint(
        directory / "model.ckpt",
        result.params,
        g.num_drugs,
        {"method": config.train.method, "config": config.config_hash(), "seed": config.train.seed},
    )
    save_loss_trace(directory / "loss.csv", result.loss_trace, provenance_header(config))
    print(f"[Train] metrics {result.metrics.to_dict()}")
    print(f"[Train] saved → {directory / 'model.ckpt'}, {directory / 'loss.csv'}")


@app.command("eval")
def evaluate(
    data: DataOpt,
    out: OutOpt = None,
    folds: FoldsOpt = None,
    infrequent_curve: Annotated[Optional[bool], typer.Option("--infrequent-curve/--no-infrequent-curve")] = None,
    method: MethodOpt = None,
    embedding_size: EmbeddingOpt = None,
    layers: LayersOpt = None,
    lam: LamOpt = None,
    lr: LrOpt = None,
    epochs: EpochsOpt = None,
    config_path: ConfigOpt = None,
    seed: SeedOpt = None,
    jobs: JobsOpt = None,
):
    """Stratified cross-validation; writes eval.json, eval_folds.csv and eval_curve.csv."""
    config = resolve_config(
        config_path, seed, jobs,
        folds=folds, infrequent_curve=infrequent_curve,
        **_train_overrides(method, embedding_size, layers, lam, lr, epochs),
    )
    g = load_dataset(data)
    report = cross_validate(g, config)
    BenchmarkReporter(str(_output_dir(config, out)), provenance_header(config)).save_report(report)


@app.command()
def predict(
    data: DataOpt,
    checkpoint: Annotated[Path, typer.Option("--checkpoint")],
    out: Annotated[Optional[Path], typer.Option("--out", help="output TSV file")] = None,
    side_effect: Annotated[Optional[list[str]], typer.Option("--side-effect", help="repeatable; default all")] = None,
    drug_a: Annotated[Optional[str], typer.Option("--drug-a")] = None,
    drug_b: Annotated[Optional[str], typer.Option("--drug-b")] = None,
    top_k: Annotated[int, typer.Option("--top-k", help="rows per side effect, 0 for all")] = 10,
    threshold: Annotated[Optional[float], typer.Option("--threshold", help="keep scores > h")] = None,
    neighbors: Annotated[Optional[str], typer.Option("--neighbors", help="list side effects nearest to this one")] = None,
    config_path: ConfigOpt = None,
    seed: SeedOpt = None,
    jobs: JobsOpt = None,
):
    """Rank unknown triples, or list a side effect's nearest neighbours."""
    config = resolve_config(config_path, seed, jobs)
    g, method, params = _load_model(data, checkpoint, config)
    header = provenance_header(config)
    directory = Path(config.paths.output_dir)
    if neighbors is not None:
        t = resolve_side_effect(g, neighbors)
        frame = side_effect_neighbors(method.forward(params).detach(), g, t, k=top_k or g.num_side_effects)
        path = Path(out) if out else directory / "neighbors.tsv"
    else:
        if (drug_a is None) != (drug_b is None):
            raise ValueError("--drug-a and --drug-b must be given together")
        pair = (resolve_drug(g, drug_a), resolve_drug(g, drug_b)) if drug_a is not None else None
        targets = [resolve_side_effect(g, s) for s in side_effect] if side_effect else None
        frame = rank_unknown(method, params, g, targets, pair=pair, top_k=top_k, threshold=threshold)
        path = Path(out) if out else directory / "predictions.tsv"
    _write_frame(path, frame, header)
    print(f"[Predict] {len(frame)} rows → {path}")


@app.command()
def extract(
    reports: Annotated[Path, typer.Option("--reports", help="drug1,drug2<TAB>se1,se2 per line")],
    out: Annotated[Path, typer.Option("--out", help="output triple file")],
    alpha: Annotated[float, typer.Option("--alpha")] = 0.05,
    config_path: ConfigOpt = None,
    seed: SeedOpt = None,
    jobs: JobsOpt = None,
):
    """Significant drug-pair side effects by one-sided Fisher test."""
    config = resolve_config(config_path, seed, jobs)
    triples = extract_significant(load_reports(reports), alpha=alpha, jobs=config.jobs)
    write_name_triples(out, triples, provenance_header(config))
    print(f"[Extract] {len(triples)} triples → {out}")


@app.command()
def dump(
    data: DataOpt,
    checkpoint: Annotated[Optional[Path], typer.Option("--checkpoint")] = None,
    out: OutOpt = None,
    laplacian: Annotated[Optional[str], typer.Option("--laplacian", help="k=<dimension>")] = None,
    embeddings: Annotated[bool, typer.Option("--embeddings")] = False,
    side_effect: Annotated[Optional[str], typer.Option("--side-effect", help="also export this side effect's subspace")] = None,
    config_path: ConfigOpt = None,
    seed: SeedOpt = None,
    jobs: JobsOpt = None,
):
    """Export a Laplacian as a coordinate list, or X* and W as TSV."""
    config = resolve_config(config_path, seed, jobs)
    g, method, params = _load_model(data, checkpoint, config)
    directory = _output_dir(config, out)
    header = provenance_header(config)
    written = []
    if laplacian is not None:
        key, _, value = laplacian.partition("=")
        if key.strip() != "k" or not value.strip().lstrip("-").isdigit():
            raise ValueError(f"--laplacian expects k=<dimension>, got {laplacian!r}")
        k = int(value)
        if not 0 <= k < params.K:
            raise ValueError(f"dimension out of range: k={k}, K={params.K}")
        weights = SideEffectWeights(method.effective_weights(params.weights).detach().numpy())
        L = method.laplacian.build_and_time(g, weights, k)
        print(f"[Dump] build {method.laplacian.build_metrics.to_dict()}")
        path = directory / f"laplacian_k{k}.txt"
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(header + "\n")
            f.write(f"# n={L.n} nnz={L.nnz}\n")
            for line in L.coordinate_lines():
                f.write(line + "\n")
        written.append(path)
    if embeddings or side_effect is not None:
        X = method.forward(params).detach()
        shape_line = f"\n# K={params.K} drugs={g.num_drugs} side_effects={g.num_side_effects}"
        if embeddings:
            _write_frame(directory / "embeddings.tsv", embedding_frame(X, g), header + shape_line)
            _write_frame(directory / "weights.tsv", weight_frame(params.weights, g), header + shape_line)
            written += [directory / "embeddings.tsv", directory / "weights.tsv"]
        if side_effect is not None:
            t = resolve_side_effect(g, side_effect)
            dims = active_dimensions(params.weights, t)
            path = directory / f"subspace_{g.side_effect_name(t)}.tsv"
            _write_frame(path, embedding_frame(X, g, dims), header + f"\n# active dimensions: {','.join(map(str, dims))}")
            written.append(path)
    if not written:
        raise ValueError("nothing to dump: pass --laplacian k=<dimension>, --embeddings or --side-effect")
    print(f"[Dump] wrote {', '.join(str(p) for p in written)}")


@app.command()
def benchmark(
    out: OutOpt = None,
    data: Annotated[Optional[Path], typer.Option("--data", help="real dataset instead of a synthetic sweep")] = None,
    m: MOpt = "1..6",
    drugs: Annotated[Optional[int], typer.Option("--drugs")] = None,
    methods: Annotated[str, typer.Option("--methods")] = ",".join(METHODS),
    folds: FoldsOpt = None,
    embedding_size: EmbeddingOpt = None,
    layers: LayersOpt = None,
    lam: LamOpt = None,
    lr: LrOpt = None,
    epochs: EpochsOpt = None,
    config_path: ConfigOpt = None,
    seed: SeedOpt = None,
    jobs: JobsOpt = None,
):
    """Cross-validate every method on every dataset of an m-sweep (or one dataset)."""
    config = resolve_config(
        config_path, seed, jobs, D=drugs, folds=folds,
        **_train_overrides(None, embedding_size, layers, lam, lr, epochs),
    )
    method_names = [name.strip() for name in methods.split(",") if name.strip()]
    for name in method_names:
        if name not in METHODS:
            raise ValueError(f"unknown method {name!r}; expected one of {METHODS}")
    if data is not None:
        datasets = {Path(data).name: load_dataset(data)}
    else:
        datasets = {f"m{k}": g for k, g, _ in sweep(config.synth, parse_int_list(m), jobs=config.jobs)}
    results = BenchmarkRunner(datasets, method_names, config).run_all()
    BenchmarkReporter(str(_output_dir(config, out)), provenance_header(config)).save_all(results)


@app.command()
def grid(
    data: DataOpt,
    out: OutOpt = None,
    layers: Annotated[str, typer.Option("--layers", help="N values, e.g. 1,2,3")] = "1,2,3",
    sizes: Annotated[str, typer.Option("--sizes", help="K values, e.g. 10,20,30")] = "10,20,30",
    folds: FoldsOpt = None,
    method: MethodOpt = None,
    epochs: EpochsOpt = None,
    config_path: ConfigOpt = None,
    seed: SeedOpt = None,
    jobs: JobsOpt = None,
):
    """Pick (N, K) by mean cross-validated AUC."""
    config = resolve_config(config_path, seed, jobs, folds=folds, method=method, epochs=epochs)
    result = grid_search(load_dataset(data), config, parse_int_list(layers), parse_int_list(sizes))
    path = _output_dir(config, out) / "grid.json"
    write_json(str(path), {**result.to_dict(), "provenance_header": provenance_header(config)})
    print(f"[Grid] saved → {path}")


def main(argv: list[str] | None = None) -> int:
    try:
        app(args=argv, standalone_mode=False, prog_name="csh-ddi")
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except Exception as exc:
        message = exc.format_message() if isinstance(exc, click.ClickException) else str(exc)
        print(f"error: {type(exc).__name__}: {' '.join(message.split())}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
