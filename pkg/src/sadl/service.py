"""HTTP service wrapping the training, evaluation, and benchmark workflows.

Endpoints accept server-local file paths (this is a local tool service) plus
inline feature vectors for prediction. Library errors map to structured
JSON with a category ("config", "data", "numerical") that clients translate
into exit codes.
"""

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import jobs
from .core import ConfigError, DataError, NumericalError, SadlError
from .data import SynthSpec

app = FastAPI(title="sadl", version="0.1.0")

_CATEGORIES = (
    (ConfigError, "config", 400),
    (DataError, "data", 400),
    (NumericalError, "numerical", 500),
)


@app.exception_handler(SadlError)
def _sadl_error_handler(request: Request, exc: SadlError):
    for cls, category, status in _CATEGORIES:
        if isinstance(exc, cls):
            break
    else:
        category, status = "internal", 500
    return JSONResponse(
        status_code=status,
        content={"detail": {"category": category, "message": str(exc)}},
    )


class TrainRequest(BaseModel):
    config_path: str
    data_path: str
    model_out: str
    trace_out: str | None = None
    seed: int | None = None
    mode: str | None = None
    block_rows: int | None = Field(
        default=None, description="uniform rows per class block (default: class sizes)"
    )


class TrainResponse(BaseModel):
    model_path: str
    trace_path: str
    mode: str
    train_seconds: float
    iterations: int
    final_objective: float | None
    final_residual_h: float | None
    final_residual_l: float | None


class EvalRequest(BaseModel):
    model_path: str
    data_path: str
    reps: int = 1
    out: str | None = None
    train_seconds: float = 0.0
    method: str = "sadl"


class EvalResponse(BaseModel):
    accuracy: float
    confusion: list[list[int]]
    n_test: int
    test_seconds_per_sample: float
    train_seconds: float
    table: str
    report_path: str | None


class PredictRequest(BaseModel):
    model_path: str
    data_path: str | None = None
    features: list[float] | None = None


class PredictResponse(BaseModel):
    labels: list[int]
    scores: list[float] | None


class SynthRequest(BaseModel):
    classes: int = 4
    subspace_dim: int = 5
    ambient_dim: int = 32
    per_class_train: int = 40
    per_class_test: int = 20
    noise_sigma: float = 0.05
    seed: int = 0
    train_out: str
    test_out: str
    binary: bool = False


class SynthResponse(BaseModel):
    train_path: str
    test_path: str
    train_samples: int
    test_samples: int
    feature_dim: int
    class_count: int


class BenchRequest(BaseModel):
    config_path: str
    data_path: str
    sizes: list[int]
    realizations: int = 1
    out: str | None = None
    seed: int | None = None
    mode: str | None = None
    workers: int = 1
    train_fraction: float = 0.5


class BenchRow(BaseModel):
    size: int
    realization: int
    accuracy: float
    train_s: float
    test_s_per_sample: float


class BenchSummaryRow(BaseModel):
    size: int
    mean_accuracy: float
    std_accuracy: float
    mean_train_s: float
    mean_test_s_per_sample: float


class BenchResponse(BaseModel):
    rows: list[BenchRow]
    summary: list[BenchSummaryRow]
    csv_path: str | None
    summary_csv_path: str | None
    warnings: list[str]


@app.get("/health")
def health():
    return {"status": "ok", "service": "sadl", "version": app.version}


@app.post("/train", response_model=TrainResponse)
def train_endpoint(req: TrainRequest):
    block_rows = None
    if req.block_rows is not None:
        # Uniform sizing: the per-class vector is expanded server-side once
        # the class count is known, so the request stays a single integer.
        from .data import load_dataset

        data = load_dataset(req.data_path)
        block_rows = [req.block_rows] * data.class_count
    return jobs.train_job(
        req.config_path, req.data_path, req.model_out,
        trace_out=req.trace_out, seed=req.seed, mode=req.mode,
        block_rows=block_rows,
    )


@app.post("/eval", response_model=EvalResponse)
def eval_endpoint(req: EvalRequest):
    return jobs.eval_job(
        req.model_path, req.data_path, reps=req.reps, out=req.out,
        train_seconds=req.train_seconds, method=req.method,
    )


@app.post("/predict", response_model=PredictResponse)
def predict_endpoint(req: PredictRequest):
    return jobs.predict_job(req.model_path, data_path=req.data_path,
                            features=req.features)


@app.post("/synth", response_model=SynthResponse)
def synth_endpoint(req: SynthRequest):
    spec = SynthSpec(
        classes=req.classes,
        subspace_dim=req.subspace_dim,
        ambient_dim=req.ambient_dim,
        per_class_train=req.per_class_train,
        per_class_test=req.per_class_test,
        noise_sigma=req.noise_sigma,
        seed=req.seed,
    )
    return jobs.synth_job(spec, req.train_out, req.test_out, binary=req.binary)


@app.post("/bench", response_model=BenchResponse)
def bench_endpoint(req: BenchRequest):
    return jobs.bench_job(
        req.config_path, req.data_path, req.sizes,
        realizations=req.realizations, out=req.out, seed=req.seed,
        mode=req.mode, workers=req.workers, train_fraction=req.train_fraction,
    )
