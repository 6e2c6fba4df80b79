"""Structured analysis dictionary learning.

Joint training of an analysis dictionary, a structuring transform, and a
linear classifier by a linearized alternating-direction method, with a
one-matrix-product inference path, dataset/model containers, a synthetic
subspace generator, a benchmark harness, and an HTTP service plus CLI.
"""

from .baseline import train_ridge
from .classifier import EvalReport, encode, evaluate, precompute_scorer, predict
from .core import (
    ConfigError,
    DataError,
    Dataset,
    Model,
    NumericalError,
    SadlError,
    StructureTargets,
    TrainConfig,
    TrainState,
    format_config,
    load_config,
    make_dataset,
    parse_config_text,
    save_config,
    validate_config,
    validate_dataset,
    validate_model,
)
from .data import SynthSpec, generate_synthetic, load_dataset, save_dataset, split
from .model_io import load_model, read_trace_csv, save_model, write_trace_csv
from .solver import (
    StepSizes,
    compute_step_sizes,
    dual_and_penalty_update,
    grad_q,
    grad_u,
    grad_w,
    lagrangian,
    normalize_rows,
    soft_threshold,
    spectral_norm,
    train,
    update_omega,
)
from .structure import build_label_matrix, build_structure_matrix, build_targets

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataError",
    "Dataset",
    "EvalReport",
    "Model",
    "NumericalError",
    "SadlError",
    "StepSizes",
    "StructureTargets",
    "SynthSpec",
    "TrainConfig",
    "TrainState",
    "build_label_matrix",
    "build_structure_matrix",
    "build_targets",
    "compute_step_sizes",
    "dual_and_penalty_update",
    "encode",
    "evaluate",
    "format_config",
    "generate_synthetic",
    "grad_q",
    "grad_u",
    "grad_w",
    "lagrangian",
    "load_config",
    "load_dataset",
    "load_model",
    "make_dataset",
    "normalize_rows",
    "parse_config_text",
    "precompute_scorer",
    "predict",
    "read_trace_csv",
    "save_config",
    "save_dataset",
    "save_model",
    "soft_threshold",
    "spectral_norm",
    "split",
    "train",
    "train_ridge",
    "update_omega",
    "validate_config",
    "validate_dataset",
    "validate_model",
    "write_trace_csv",
]
