"""File-level workflows behind the service endpoints.

Each job reads its inputs from paths, runs the library, writes its outputs,
and returns a plain dict ready for a JSON response. Benchmark realizations
may run in parallel worker threads; every run owns its state, so results
are deterministic regardless of worker count.
"""

import concurrent.futures
import csv
import os
import time

import numpy as np

from . import classifier, model_io
from .baseline import train_ridge
from .core import ConfigError, DataError, TrainConfig, load_config
from .data import SynthSpec, generate_synthetic, load_dataset, save_dataset, split
from .solver import train
from .structure import build_targets

CLI_MODES = ("sadl", "plain_adl", "ridge")


def _resolve_config(config_path, seed=None, mode=None) -> tuple:
    """Load the config file and apply CLI-level overrides.

    Returns (cfg, cli_mode); cli_mode may be "ridge", which is not a
    TrainConfig mode (the ridge baseline bypasses the iterative solver).
    """
    cfg = load_config(config_path)
    if seed is not None:
        cfg = cfg.replace(seed=int(seed))
    cli_mode = mode if mode is not None else cfg.mode
    if cli_mode not in CLI_MODES:
        raise ConfigError(f"mode must be one of {CLI_MODES}")
    if cli_mode != "ridge":
        cfg = cfg.replace(mode=cli_mode)
    return cfg, cli_mode


def _train_one(train_set, cfg: TrainConfig, cli_mode: str, block_rows=None):
    """Train a model in any CLI mode, returning (model, state, seconds)."""
    t0 = time.perf_counter()
    if cli_mode == "ridge":
        model = train_ridge(train_set, cfg)
        state = None
    else:
        targets = None
        if cfg.mode == "sadl":
            targets = build_targets(train_set.labels, train_set.class_count,
                                    block_rows)
        model, state = train(train_set, targets, cfg)
    return model, state, time.perf_counter() - t0


def train_job(config_path, data_path, model_out, trace_out=None,
              seed=None, mode=None, block_rows=None) -> dict:
    """Train from files: writes the model container and the trace CSV."""
    cfg, cli_mode = _resolve_config(config_path, seed, mode)
    data = load_dataset(data_path)
    model, state, seconds = _train_one(data, cfg, cli_mode, block_rows)
    model_io.save_model(model, model_out)
    if trace_out is None:
        trace_out = str(model_out) + ".trace.csv"
    model_io.write_trace_csv(state, trace_out)
    result = {
        "model_path": str(model_out),
        "trace_path": str(trace_out),
        "mode": cli_mode,
        "train_seconds": seconds,
        "iterations": 0 if state is None else state.iterations,
        "final_objective": None if state is None else state.objective_trace[-1],
        "final_residual_h": None if state is None else state.residual_h_trace[-1],
        "final_residual_l": None if state is None else state.residual_l_trace[-1],
    }
    return result


def eval_job(model_path, data_path, reps: int = 1, out=None,
             train_seconds: float = 0.0, method: str = "sadl") -> dict:
    """Evaluate a stored model on a dataset; optionally write the CSV report."""
    model = model_io.load_model(model_path)
    data = load_dataset(data_path)
    report = classifier.evaluate(model, data, timing_reps=reps,
                                 train_seconds=train_seconds)
    csv_text = classifier.report_to_csv(report)
    if out is not None:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    return {
        "accuracy": report.accuracy,
        "confusion": report.confusion.tolist(),
        "n_test": report.n_test,
        "test_seconds_per_sample": report.test_seconds_per_sample,
        "train_seconds": report.train_seconds,
        "table": classifier.report_table(report, method=method),
        "report_path": None if out is None else str(out),
    }


def predict_job(model_path, data_path=None, features=None) -> dict:
    """Predict classes for a dataset file or one feature vector."""
    model = model_io.load_model(model_path)
    scorer = classifier.precompute_scorer(model)
    if (data_path is None) == (features is None):
        raise DataError("provide exactly one of data_path or features")
    if features is not None:
        x = np.asarray(features, dtype=np.float64)
        label = classifier.predict(model, x, scorer=scorer)
        return {"labels": [label], "scores": (scorer @ x).tolist()}
    data = load_dataset(data_path)
    if data.x.shape[0] != scorer.shape[1]:
        raise DataError(
            f"dataset features have dim {data.x.shape[0]}, model expects {scorer.shape[1]}"
        )
    labels = [int(np.argmax(scorer @ data.x[:, j])) for j in range(data.sample_count)]
    return {"labels": labels, "scores": None}


def synth_job(spec: SynthSpec, train_out, test_out, binary: bool = False) -> dict:
    """Generate and save the synthetic train/test pair."""
    train_set, test_set = generate_synthetic(spec)
    save_dataset(train_set, train_out, binary=binary)
    save_dataset(test_set, test_out, binary=binary)
    return {
        "train_path": str(train_out),
        "test_path": str(test_out),
        "train_samples": train_set.sample_count,
        "test_samples": test_set.sample_count,
        "feature_dim": train_set.feature_dim,
        "class_count": train_set.class_count,
    }


def _bench_cell(data, size, realization, base_seed, cfg, cli_mode, train_fraction):
    seed = base_seed + realization
    train_set, test_set = split(data, train_fraction=train_fraction, seed=seed)
    run_cfg = cfg.replace(dict_size=size, seed=seed)
    model, _, seconds = _train_one(train_set, run_cfg, cli_mode)
    report = classifier.evaluate(model, test_set, timing_reps=1,
                                 train_seconds=seconds)
    return {
        "size": size,
        "realization": realization,
        "accuracy": report.accuracy,
        "train_s": seconds,
        "test_s_per_sample": report.test_seconds_per_sample,
    }


def bench_job(config_path, data_path, sizes, realizations: int = 1, out=None,
              seed=None, mode=None, workers: int = 1,
              train_fraction: float = 0.5) -> dict:
    """Dictionary-size sweep: one trained model per (size, realization).

    Each realization re-splits the dataset with seed = base seed +
    realization index, shared across sizes so size comparisons see the
    same data. Sizes smaller than the class count are skipped with a
    warning. Rows are ordered by (size, realization) regardless of worker
    scheduling.
    """
    if realizations < 1:
        raise ConfigError("realizations must be >= 1")
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    cfg, cli_mode = _resolve_config(config_path, seed, mode)
    base_seed = cfg.seed
    data = load_dataset(data_path)

    warnings = []
    kept_sizes = []
    for size in sizes:
        if size < data.class_count:
            warnings.append(
                f"size {size} rejected: fewer atoms than classes ({data.class_count})"
            )
        else:
            kept_sizes.append(int(size))

    cells = [(size, real) for size in kept_sizes for real in range(realizations)]
    results = {}
    if workers == 1:
        for size, real in cells:
            results[(size, real)] = _bench_cell(
                data, size, real, base_seed, cfg, cli_mode, train_fraction)
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(_bench_cell, data, size, real, base_seed, cfg,
                            cli_mode, train_fraction): (size, real)
                for size, real in cells
            }
            for fut in concurrent.futures.as_completed(futures):
                results[futures[fut]] = fut.result()

    rows = [results[cell] for cell in cells]
    summary = []
    for size in kept_sizes:
        block = [r for r in rows if r["size"] == size]
        accs = np.array([r["accuracy"] for r in block])
        summary.append({
            "size": size,
            "mean_accuracy": float(accs.mean()),
            "std_accuracy": float(accs.std()),
            "mean_train_s": float(np.mean([r["train_s"] for r in block])),
            "mean_test_s_per_sample": float(
                np.mean([r["test_s_per_sample"] for r in block])),
        })

    csv_path = summary_path = None
    if out is not None:
        csv_path = str(out)
        root, ext = os.path.splitext(csv_path)
        summary_path = f"{root}_summary{ext or '.csv'}"
        _write_rows(csv_path, rows,
                    ["size", "realization", "accuracy", "train_s", "test_s_per_sample"])
        _write_rows(summary_path, summary,
                    ["size", "mean_accuracy", "std_accuracy", "mean_train_s",
                     "mean_test_s_per_sample"])
    return {
        "rows": rows,
        "summary": summary,
        "csv_path": csv_path,
        "summary_csv_path": summary_path,
        "warnings": warnings,
    }


def _write_rows(path, rows, fields) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for row in rows:
            writer.writerow(
                [repr(row[f]) if isinstance(row[f], float) else row[f] for f in fields]
            )
