"""Domain types, configuration, and the flat key-value config file format.

Everything here is plain data: frozen dataclasses around float64 numpy
matrices, with explicit validation functions that raise descriptive errors.
Matrices keep samples in columns throughout the package.
"""

import dataclasses
from dataclasses import dataclass, field

import numpy as np

STEP_RULES = ("spectral", "fixed")
MODES = ("sadl", "plain_adl")


class SadlError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SadlError):
    """Invalid configuration value or malformed config file."""


class DataError(SadlError):
    """Malformed dataset/model file or inconsistent data."""


class NumericalError(SadlError):
    """Numerical failure (singular system, diverging objective)."""


@dataclass(frozen=True)
class TrainConfig:
    """Scalar hyperparameters and schedules of one training run.

    Attributes
    ----------
    dict_size : int
        Number of dictionary atoms (rows of the analysis dictionary).
    lambda1 : float
        Weight of the l1 sparsity term on the codes.
    lambda2, lambda3 : float
        Weights of the two dual coupling terms (structure and label fit).
    lambda4 : float
        Ridge weight in the dictionary update.
    mu0, rho, mu_max : float
        Initial quadratic penalty, its per-iteration growth factor (>= 1),
        and its ceiling.
    max_iter : int
        Iteration budget.
    tol : float
        Relative objective-change threshold for early stopping (0 disables).
    step_rule : str
        "spectral" derives step sizes from operator norms each iteration;
        "fixed" uses the eta_* constants below.
    eta_q, eta_wq, eta_wu, eta_qu : float
        Learning-rate constants for the fixed step rule. The code-update
        denominator is mu*(eta_q + eta_wq), the structuring-transform
        denominator mu*(eta_q + eta_wu), the classifier denominator
        mu*eta_qu.
    seed : int
        Seed for the Gaussian initializer.
    mode : str
        "sadl" trains the full structured model; "plain_adl" disables the
        structure and classifier terms (lambda2 = lambda3 = 0 effectively)
        and only fits dictionary and sparse codes.
    """

    dict_size: int
    lambda1: float = 0.001
    lambda2: float = 1.0
    lambda3: float = 1.0
    lambda4: float = 0.5
    mu0: float = 0.1
    rho: float = 1.01
    mu_max: float = 1e6
    max_iter: int = 300
    tol: float = 1e-6
    step_rule: str = "spectral"
    eta_q: float = 1.0
    eta_wq: float = 1.0
    eta_wu: float = 1.0
    eta_qu: float = 1.0
    seed: int = 0
    mode: str = "sadl"

    def __post_init__(self):
        # Normalize numpy scalars / JSON numbers so equality and the
        # config-file round trip are value-based, not type-based.
        for name in _INT_KEYS:
            v = getattr(self, name)
            if not isinstance(v, int):
                try:
                    iv = int(v)
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"{name} must be an integer") from exc
                if iv != v:
                    raise ConfigError(f"{name} must be an integer")
                object.__setattr__(self, name, iv)
        for name in _FLOAT_KEYS:
            v = getattr(self, name)
            if not isinstance(v, float):
                try:
                    object.__setattr__(self, name, float(v))
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"{name} must be a real number") from exc

    def replace(self, **changes) -> "TrainConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with integer class labels.

    x has shape (m, n) with one sample per column; labels has length n with
    values in [0, class_count).
    """

    x: np.ndarray
    labels: np.ndarray
    class_count: int

    @property
    def feature_dim(self) -> int:
        return self.x.shape[0]

    @property
    def sample_count(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class StructureTargets:
    """Supervision targets built from labels: block structure h and one-hot l."""

    h: np.ndarray
    l: np.ndarray
    block_rows: np.ndarray


@dataclass(frozen=True)
class Model:
    """Learned triple sufficient for inference.

    omega is the analysis dictionary (dict_size x feature_dim, unit-norm
    rows), q the structuring transform (s x dict_size), w the classifier
    (class_count x s). The composite w @ q @ omega maps a feature vector to
    class scores.
    """

    omega: np.ndarray
    q: np.ndarray
    w: np.ndarray
    config: TrainConfig
    class_count: int


@dataclass
class TrainState:
    """Iteration-varying quantities of a training run (owned by that run)."""

    u: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    mu: float
    iterations: int
    objective_trace: list = field(default_factory=list)
    residual_h_trace: list = field(default_factory=list)
    residual_l_trace: list = field(default_factory=list)
    mu_trace: list = field(default_factory=list)


def _finite(v) -> bool:
    return bool(np.isfinite(v))


def validate_config(cfg: TrainConfig) -> None:
    """Check every TrainConfig invariant, naming the first failing field."""
    if not isinstance(cfg.dict_size, int) or cfg.dict_size < 1:
        raise ConfigError("dict_size must be a positive integer")
    for name in ("lambda1", "lambda2", "lambda3", "lambda4"):
        v = getattr(cfg, name)
        if not _finite(v) or v < 0:
            raise ConfigError(f"{name} must be >= 0 and finite")
    if not _finite(cfg.mu0) or cfg.mu0 <= 0:
        raise ConfigError("mu0 must be > 0 and finite")
    if not (cfg.rho >= 1):
        raise ConfigError("rho must be >= 1")
    if not (cfg.mu_max > 0):
        raise ConfigError("mu_max must be > 0")
    if cfg.mu0 > cfg.mu_max:
        raise ConfigError("mu0 must be <= mu_max")
    if not isinstance(cfg.max_iter, int) or cfg.max_iter < 1:
        raise ConfigError("max_iter must be a positive integer")
    if not _finite(cfg.tol) or cfg.tol < 0:
        raise ConfigError("tol must be >= 0 and finite")
    if cfg.step_rule not in STEP_RULES:
        raise ConfigError(f"step_rule must be one of {STEP_RULES}")
    if cfg.step_rule == "fixed":
        for name in ("eta_q", "eta_wq", "eta_wu", "eta_qu"):
            v = getattr(cfg, name)
            if not _finite(v) or v <= 0:
                raise ConfigError(f"{name} must be > 0 and finite")
    if not isinstance(cfg.seed, int):
        raise ConfigError("seed must be an integer")
    if cfg.mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}")


def effective_lambdas(cfg: TrainConfig) -> tuple:
    """(lambda2, lambda3) actually used: forced to zero in plain_adl mode."""
    if cfg.mode == "plain_adl":
        return 0.0, 0.0
    return cfg.lambda2, cfg.lambda3


def validate_dataset(data: Dataset, require_all_classes: bool = False) -> None:
    """Check Dataset invariants; require_all_classes adds the training-time
    condition that every class index has at least one sample."""
    x = data.x
    if x.ndim != 2:
        raise DataError("feature matrix must be 2-dimensional")
    labels = np.asarray(data.labels)
    if labels.ndim != 1 or labels.shape[0] != x.shape[1]:
        raise DataError("labels length must equal the number of samples")
    if data.class_count < 1:
        raise DataError("class_count must be >= 1")
    if not np.all(np.isfinite(x)):
        raise DataError("feature matrix contains NaN or Inf entries")
    if labels.size and (labels.min() < 0 or labels.max() >= data.class_count):
        raise DataError("label out of range")
    if require_all_classes:
        counts = np.bincount(labels, minlength=data.class_count)
        missing = np.nonzero(counts == 0)[0]
        if missing.size:
            raise DataError(f"class {int(missing[0])} has no samples")


def validate_model(model: Model, atol: float = 1e-12) -> None:
    """Check Model invariants: unit-norm dictionary rows, consistent dims."""
    r, m = model.omega.shape
    s, r2 = model.q.shape
    c, s2 = model.w.shape
    if r2 != r or s2 != s or c != model.class_count:
        raise DataError("model matrices have inconsistent dimensions")
    norms = np.linalg.norm(model.omega, axis=1)
    if norms.size and np.max(np.abs(norms - 1.0)) > atol:
        raise DataError("dictionary rows are not unit-norm")


def make_dataset(x, labels, class_count: int) -> Dataset:
    """Coerce arrays to the canonical dtypes and validate."""
    data = Dataset(
        x=np.ascontiguousarray(x, dtype=np.float64),
        labels=np.ascontiguousarray(labels, dtype=np.int64),
        class_count=int(class_count),
    )
    validate_dataset(data)
    return data


# Config file format: one `key = value` per line, `#` starts a comment,
# unknown keys are errors. Fields map one-to-one to TrainConfig.

_INT_KEYS = ("dict_size", "max_iter", "seed")
_FLOAT_KEYS = (
    "lambda1", "lambda2", "lambda3", "lambda4",
    "mu0", "rho", "mu_max", "tol",
    "eta_q", "eta_wq", "eta_wu", "eta_qu",
)
_STR_KEYS = ("step_rule", "mode")
CONFIG_KEYS = _INT_KEYS + _FLOAT_KEYS + _STR_KEYS


def parse_config_text(text: str) -> TrainConfig:
    """Parse the key-value config format into a validated TrainConfig."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown config key: {key}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate config key: {key}")
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            else:
                values[key] = value
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    if "dict_size" not in values:
        raise ConfigError("dict_size is required")
    cfg = TrainConfig(**values)
    validate_config(cfg)
    return cfg


def load_config(path) -> TrainConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    return parse_config_text(text)


def format_config(cfg: TrainConfig) -> str:
    """Render a TrainConfig in the config file format.

    Floats are written with repr so parse(format(cfg)) reproduces the
    config bit-exactly.
    """
    lines = []
    for f in dataclasses.fields(TrainConfig):
        v = getattr(cfg, f.name)
        lines.append(f"{f.name} = {v!r}" if isinstance(v, float) else f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


def save_config(cfg: TrainConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_config(cfg))
