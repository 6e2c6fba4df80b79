"""Dataset file I/O, stratified splitting, and synthetic subspace data.

Two on-disk forms carry the same content: a diffable text format and a
binary twin for speed. Both round-trip bit-exactly.

Text format (``SADL-DS``):
    line 1: ``SADL-DS m n c``
    line 2: n space-separated integer labels
    lines 3..n+2: sample j as m space-separated floats (column j of X),
    written with repr so parsing reproduces every value exactly.

Binary format: magic ``SADS``, then little-endian u32 fields
(version=1, m, n, c), n labels as u32, and X as m*n float64 row-major.

All randomness (splitting, synthesis) flows through numpy's default_rng
(PCG64) with explicit integer seeds, so every draw is reproducible.
"""

import dataclasses
import struct

import numpy as np

from .core import DataError, Dataset, make_dataset, validate_dataset

_TEXT_MAGIC = "SADL-DS"
_BINARY_MAGIC = b"SADS"
_BINARY_VERSION = 1


def save_dataset(data: Dataset, path, binary: bool = False) -> None:
    """Write a dataset in the text format (default) or its binary twin."""
    validate_dataset(data)
    if binary:
        _save_binary(data, path)
    else:
        _save_text(data, path)


def _save_text(data: Dataset, path) -> None:
    m, n = data.x.shape
    lines = [f"{_TEXT_MAGIC} {m} {n} {data.class_count}"]
    lines.append(" ".join(str(int(v)) for v in data.labels))
    for j in range(n):
        lines.append(" ".join(repr(float(v)) for v in data.x[:, j]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _save_binary(data: Dataset, path) -> None:
    m, n = data.x.shape
    with open(path, "wb") as fh:
        fh.write(_BINARY_MAGIC)
        fh.write(struct.pack("<IIII", _BINARY_VERSION, m, n, data.class_count))
        fh.write(data.labels.astype("<u4").tobytes())
        fh.write(np.ascontiguousarray(data.x, dtype="<f8").tobytes())


def load_dataset(path) -> Dataset:
    """Read either on-disk form back into a validated Dataset."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except FileNotFoundError as exc:
        raise DataError(f"dataset file not found: {path}") from exc
    if blob.startswith(_BINARY_MAGIC):
        return _load_binary(blob, path)
    if blob.startswith(_TEXT_MAGIC.encode()):
        return _load_text(blob, path)
    raise DataError(f"malformed header in {path}")


def _load_text(blob: bytes, path) -> Dataset:
    lines = blob.decode("utf-8").splitlines()
    header = lines[0].split()
    if len(header) != 4 or header[0] != _TEXT_MAGIC:
        raise DataError(f"malformed header in {path}")
    try:
        m, n, c = (int(v) for v in header[1:])
    except ValueError as exc:
        raise DataError(f"malformed header in {path}") from exc
    if len(lines) < 2 + n:
        raise DataError(f"{path}: expected {n} sample lines, file is truncated")
    labels = lines[1].split()
    if len(labels) != n:
        raise DataError(f"{path}: expected {n} labels, found {len(labels)}")
    try:
        labels = np.array([int(v) for v in labels], dtype=np.int64)
    except ValueError as exc:
        raise DataError(f"{path}: non-integer label") from exc
    x = np.empty((m, n), dtype=np.float64)
    for j in range(n):
        values = lines[2 + j].split()
        if len(values) != m:
            raise DataError(f"{path}: sample {j} has {len(values)} values, expected {m}")
        try:
            x[:, j] = [float(v) for v in values]
        except ValueError as exc:
            raise DataError(f"{path}: bad float in sample {j}") from exc
    return _finish_load(x, labels, c, path)


def _load_binary(blob: bytes, path) -> Dataset:
    header_size = 4 + 16
    if len(blob) < header_size:
        raise DataError(f"malformed header in {path}")
    version, m, n, c = struct.unpack("<IIII", blob[4:header_size])
    if version != _BINARY_VERSION:
        raise DataError(f"{path}: unsupported dataset format version {version}")
    expected = header_size + 4 * n + 8 * m * n
    if len(blob) != expected:
        raise DataError(f"{path}: expected {expected} bytes, found {len(blob)}")
    labels = np.frombuffer(blob, dtype="<u4", count=n, offset=header_size)
    x = np.frombuffer(blob, dtype="<f8", count=m * n, offset=header_size + 4 * n)
    return _finish_load(x.reshape(m, n).copy(), labels.astype(np.int64), c, path)


def _finish_load(x, labels, class_count, path) -> Dataset:
    try:
        return make_dataset(x, labels, class_count)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from exc


def split(data: Dataset, train_fraction: float = None, per_class_count: int = None,
          seed: int = 0):
    """Stratified, seeded partition into (train, test).

    Exactly one of train_fraction / per_class_count selects the sizing.
    With a fraction, per-class train counts start at floor(n_i * fraction)
    and largest fractional remainders are topped up until the global
    round(n * fraction) target is met; every class keeps at least one
    training sample. With a count, each class contributes exactly that
    many training samples.
    """
    if (train_fraction is None) == (per_class_count is None):
        raise DataError("specify exactly one of train_fraction or per_class_count")
    validate_dataset(data, require_all_classes=True)
    n = data.sample_count
    c = data.class_count
    counts = np.bincount(data.labels, minlength=c)

    if per_class_count is not None:
        if per_class_count < 1:
            raise DataError("per_class_count must be >= 1")
        short = np.nonzero(counts < per_class_count)[0]
        if short.size:
            raise DataError(
                f"class {int(short[0])} has {int(counts[short[0]])} samples, "
                f"fewer than the requested {per_class_count}"
            )
        take = np.full(c, per_class_count, dtype=np.int64)
    else:
        if not 0.0 < train_fraction < 1.0:
            raise DataError("train_fraction must be in (0, 1)")
        target = int(np.floor(n * train_fraction + 0.5))
        exact = counts * train_fraction
        take = np.floor(exact).astype(np.int64)
        remainders = exact - take
        # Top up by largest remainder (ties to the lower class index).
        order = sorted(range(c), key=lambda i: (-remainders[i], i))
        deficit = target - int(take.sum())
        for i in order:
            if deficit <= 0:
                break
            if take[i] < counts[i]:
                take[i] += 1
                deficit -= 1
        take = np.maximum(take, 1)
        short = np.nonzero(take > counts)[0]
        if short.size:
            raise DataError(
                f"class {int(short[0])} is too small to retain a training sample"
            )

    rng = np.random.default_rng(seed)
    train_idx = []
    test_idx = []
    for i in range(c):
        members = np.nonzero(data.labels == i)[0]
        perm = rng.permutation(members)
        train_idx.extend(perm[: take[i]])
        test_idx.extend(perm[take[i]:])
    train_idx = np.sort(np.array(train_idx, dtype=np.int64))
    test_idx = np.sort(np.array(test_idx, dtype=np.int64))
    train = Dataset(x=data.x[:, train_idx], labels=data.labels[train_idx],
                    class_count=c)
    test = Dataset(x=data.x[:, test_idx], labels=data.labels[test_idx],
                   class_count=c)
    return train, test


@dataclasses.dataclass(frozen=True)
class SynthSpec:
    """Parameters of the synthetic subspace generator."""

    classes: int = 4
    subspace_dim: int = 5
    ambient_dim: int = 32
    per_class_train: int = 40
    per_class_test: int = 20
    noise_sigma: float = 0.05
    seed: int = 0


def validate_synth_spec(spec: SynthSpec) -> None:
    if spec.classes < 1 or spec.per_class_train < 1 or spec.per_class_test < 1:
        raise DataError("classes and per-class counts must be >= 1")
    if spec.subspace_dim < 1 or spec.subspace_dim > spec.ambient_dim:
        raise DataError("subspace_dim must be in [1, ambient_dim]")
    if not np.isfinite(spec.noise_sigma) or spec.noise_sigma < 0:
        raise DataError("noise_sigma must be >= 0 and finite")


def generate_synthetic(spec: SynthSpec):
    """Deterministic (train, test) pair with one low-dimensional subspace
    per class.

    Each class draws an orthonormal basis (QR of a seeded Gaussian) and
    emits samples basis @ z + sigma * noise with folded-Gaussian
    coefficients z = |N(0, 1)|, then normalizes columns to unit length.
    Folding the coefficients keeps every class inside a one-sided cone of
    its subspace, so classes are separable by a linear scorer instead of
    being antipodally symmetric.
    """
    validate_synth_spec(spec)
    rng = np.random.default_rng(spec.seed)
    m, d = spec.ambient_dim, spec.subspace_dim
    total = spec.per_class_train + spec.per_class_test

    train_cols, train_labels = [], []
    test_cols, test_labels = [], []
    for i in range(spec.classes):
        basis, _ = np.linalg.qr(rng.normal(size=(m, d)))
        coeffs = np.abs(rng.normal(size=(d, total)))
        noise = rng.normal(size=(m, total))
        samples = basis @ coeffs + spec.noise_sigma * noise
        norms = np.linalg.norm(samples, axis=0)
        norms[norms == 0.0] = 1.0
        samples = samples / norms
        train_cols.append(samples[:, : spec.per_class_train])
        test_cols.append(samples[:, spec.per_class_train:])
        train_labels.extend([i] * spec.per_class_train)
        test_labels.extend([i] * spec.per_class_test)

    train = make_dataset(np.hstack(train_cols), train_labels, spec.classes)
    test = make_dataset(np.hstack(test_cols), test_labels, spec.classes)
    return train, test
