"""Model container and objective-trace files.

Model container layout (all integers little-endian u32):
magic ``SADL`` | version=1 | r | m | s | c | omega (r*m float64, row-major)
| q (s*r float64) | w (c*s float64) | config text length | config text
(the key-value config format, UTF-8).
"""

import csv
import struct

import numpy as np

from .core import DataError, Model, format_config, parse_config_text, validate_model

_MAGIC = b"SADL"
_VERSION = 1


def save_model(model: Model, path) -> None:
    """Write the binary model container (bit-exact round trip)."""
    r, m = model.omega.shape
    s = model.q.shape[0]
    c = model.w.shape[0]
    config_text = format_config(model.config).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IIIII", _VERSION, r, m, s, c))
        fh.write(np.ascontiguousarray(model.omega, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(model.q, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(model.w, dtype="<f8").tobytes())
        fh.write(struct.pack("<I", len(config_text)))
        fh.write(config_text)


def load_model(path) -> Model:
    """Read a model container and re-check its invariants."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except FileNotFoundError as exc:
        raise DataError(f"model file not found: {path}") from exc
    if not blob.startswith(_MAGIC):
        raise DataError(f"{path}: not a model file (bad magic)")
    header_size = 4 + 20
    if len(blob) < header_size:
        raise DataError(f"{path}: truncated model header")
    version, r, m, s, c = struct.unpack("<IIIII", blob[4:header_size])
    if version != _VERSION:
        raise DataError(f"{path}: unsupported model format version {version}")
    offset = header_size

    def take(rows, cols):
        nonlocal offset
        count = rows * cols
        arr = np.frombuffer(blob, dtype="<f8", count=count, offset=offset)
        offset += 8 * count
        return arr.reshape(rows, cols).copy()

    if len(blob) < header_size + 8 * (r * m + s * r + c * s) + 4:
        raise DataError(f"{path}: truncated model payload")
    omega = take(r, m)
    q = take(s, r)
    w = take(c, s)
    (config_len,) = struct.unpack_from("<I", blob, offset)
    offset += 4
    config_text = blob[offset: offset + config_len].decode("utf-8")
    if len(blob) != offset + config_len:
        raise DataError(f"{path}: trailing bytes after config block")
    config = parse_config_text(config_text)
    model = Model(omega=omega, q=q, w=w, config=config, class_count=c)
    validate_model(model)
    return model


def write_trace_csv(state, path) -> None:
    """Objective trace as CSV: iteration, objective, both primal residuals,
    and the penalty value after each iteration. state may be None (header
    only, e.g. for closed-form baselines)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["iteration", "objective", "primal_residual_H", "primal_residual_L", "mu"]
        )
        if state is None:
            return
        for k in range(state.iterations):
            writer.writerow([
                k + 1,
                repr(state.objective_trace[k]),
                repr(state.residual_h_trace[k]),
                repr(state.residual_l_trace[k]),
                repr(state.mu_trace[k]),
            ])


def read_trace_csv(path):
    """Parse a trace CSV back into column arrays (lossless; repr-written)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["iteration", "objective", "primal_residual_H",
                               "primal_residual_L", "mu"]:
        raise DataError(f"{path}: malformed trace header")
    iterations = [int(row[0]) for row in rows[1:]]
    columns = {
        "iteration": np.array(iterations, dtype=np.int64),
        "objective": np.array([float(r[1]) for r in rows[1:]]),
        "primal_residual_H": np.array([float(r[2]) for r in rows[1:]]),
        "primal_residual_L": np.array([float(r[3]) for r in rows[1:]]),
        "mu": np.array([float(r[4]) for r in rows[1:]]),
    }
    return columns
