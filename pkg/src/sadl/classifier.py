"""Inference and evaluation.

Test-time coding is a single matrix-vector product (no sparse optimization),
so prediction is three chained products or, faster, one product with the
precomputed class-score matrix. Evaluation reports accuracy, a confusion
matrix, and median per-sample prediction time.
"""

import csv
import dataclasses
import io
import time

import numpy as np

from .core import DataError, Dataset, Model


@dataclasses.dataclass(frozen=True)
class EvalReport:
    """Accuracy/timing summary over one test set."""

    accuracy: float
    confusion: np.ndarray
    train_seconds: float
    test_seconds_per_sample: float
    n_test: int


def encode(model: Model, x) -> np.ndarray:
    """Analysis code of one sample: dictionary applied to the feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.omega.shape[1],):
        raise DataError(
            f"feature vector has length {x.shape}, model expects {model.omega.shape[1]}"
        )
    return model.omega @ x


def precompute_scorer(model: Model) -> np.ndarray:
    """Collapsed class-score matrix w @ q @ omega (class_count x feature_dim)."""
    return (model.w @ model.q) @ model.omega


def predict(model: Model, x, scorer=None) -> int:
    """Predicted class: argmax of the class scores for one sample.

    Without a precomputed scorer the product chain is evaluated
    right-to-left (three matrix-vector products). Ties break to the lowest
    class index.
    """
    if scorer is not None:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (scorer.shape[1],):
            raise DataError("feature vector length does not match the scorer")
        return int(np.argmax(scorer @ x))
    return int(np.argmax(model.w @ (model.q @ encode(model, x))))


def timed_prediction_loop(scorer, x, timing_reps: int):
    """Run the per-sample prediction loop timing_reps times.

    Returns (predictions, per-sample wall times), one time per repetition.
    """
    n = x.shape[1]
    preds = np.empty(n, dtype=np.int64)
    loop_times = []
    for _ in range(timing_reps):
        t0 = time.perf_counter()
        for j in range(n):
            preds[j] = np.argmax(scorer @ x[:, j])
        loop_times.append((time.perf_counter() - t0) / n)
    return preds, loop_times


def evaluate(model: Model, test: Dataset, timing_reps: int = 1,
             train_seconds: float = 0.0) -> EvalReport:
    """Accuracy, confusion matrix, and per-sample prediction time.

    The prediction loop (precomputed scorer, one sample at a time) is run
    timing_reps times; the reported per-sample time is the median of the
    per-repetition wall times divided by the test size. train_seconds is
    carried through for reporting, the caller supplies it.
    """
    if test.sample_count == 0:
        raise DataError("test set is empty")
    if timing_reps < 1:
        raise DataError("timing_reps must be >= 1")
    if test.x.shape[0] != model.omega.shape[1]:
        raise DataError(
            f"test features have dim {test.x.shape[0]}, model expects {model.omega.shape[1]}"
        )
    if test.labels.max() >= model.class_count:
        raise DataError("test label exceeds the model's class count")

    scorer = precompute_scorer(model)
    n = test.sample_count
    preds, loop_times = timed_prediction_loop(scorer, test.x, timing_reps)

    c = model.class_count
    confusion = np.zeros((c, c), dtype=np.int64)
    np.add.at(confusion, (test.labels, preds), 1)
    accuracy = float(np.trace(confusion)) / n
    return EvalReport(
        accuracy=accuracy,
        confusion=confusion,
        train_seconds=float(train_seconds),
        test_seconds_per_sample=float(np.median(loop_times)),
        n_test=n,
    )


def report_table(report: EvalReport, method: str = "sadl") -> str:
    """Human-readable three-column table plus the confusion matrix."""
    lines = [
        f"{'Method':<12} {'Accuracy (%)':>12} {'Training (s)':>14} {'Testing (s)':>14}",
        f"{method:<12} {100.0 * report.accuracy:>12.2f} "
        f"{report.train_seconds:>14.2f} {report.test_seconds_per_sample:>14.3e}",
        "",
        "Confusion matrix (rows: true class, columns: predicted):",
    ]
    width = max(len(str(int(report.confusion.max(initial=0)))), 1) + 1
    for row in report.confusion:
        lines.append("".join(f"{int(v):>{width}}" for v in row))
    return "\n".join(lines)


def report_to_csv(report: EvalReport) -> str:
    """CSV form: a metrics row followed by the confusion matrix block."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["accuracy", "train_seconds", "test_seconds_per_sample", "n_test"])
    writer.writerow([
        repr(report.accuracy),
        repr(report.train_seconds),
        repr(report.test_seconds_per_sample),
        report.n_test,
    ])
    writer.writerow(["confusion"])
    for row in report.confusion:
        writer.writerow([int(v) for v in row])
    return buf.getvalue()


def report_from_csv(text: str) -> EvalReport:
    """Inverse of report_to_csv (lossless for the float fields)."""
    rows = list(csv.reader(io.StringIO(text)))
    if len(rows) < 3 or rows[0][:4] != ["accuracy", "train_seconds",
                                        "test_seconds_per_sample", "n_test"]:
        raise DataError("malformed evaluation report CSV")
    accuracy, train_s, test_s, n_test = rows[1][:4]
    if rows[2] != ["confusion"]:
        raise DataError("malformed evaluation report CSV: missing confusion block")
    confusion = np.array([[int(v) for v in row] for row in rows[3:]], dtype=np.int64)
    return EvalReport(
        accuracy=float(accuracy),
        confusion=confusion,
        train_seconds=float(train_s),
        test_seconds_per_sample=float(test_s),
        n_test=int(n_test),
    )
