"""Supervision targets built from class labels.

Two binary matrices drive the structured training: a block matrix that
assigns every class a contiguous band of rows (same-class columns identical,
different-class columns orthogonal) and a one-hot label matrix.
"""

import numpy as np

from .core import DataError, StructureTargets


def _check_labels(labels, class_count: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.ndim != 1:
        raise DataError("labels must be a 1-d integer vector")
    if labels.size == 0:
        raise DataError("labels must be nonempty")
    if labels.min() < 0 or labels.max() >= class_count:
        raise DataError("label out of range")
    return labels


def build_label_matrix(labels, class_count: int) -> np.ndarray:
    """One-hot label matrix of shape (class_count, n): entry (i, j) is 1
    iff sample j belongs to class i."""
    labels = _check_labels(labels, class_count)
    n = labels.shape[0]
    lmat = np.zeros((class_count, n), dtype=np.float64)
    lmat[labels, np.arange(n)] = 1.0
    return lmat


def build_structure_matrix(labels, class_count: int, block_rows=None) -> np.ndarray:
    """Block structure matrix of shape (sum(block_rows), n).

    Row band i (of height block_rows[i]) is all ones on the columns of
    class i and zero elsewhere, so the bands form a block-diagonal pattern
    under the class-sorted column order. block_rows defaults to the
    per-class sample counts, which makes the matrix square (s = n).
    """
    labels = _check_labels(labels, class_count)
    counts = np.bincount(labels, minlength=class_count)
    if block_rows is None:
        if np.any(counts == 0):
            empty = int(np.nonzero(counts == 0)[0][0])
            raise DataError(
                f"class {empty} has no samples; default block sizing needs every class"
            )
        block_rows = counts
    block_rows = np.asarray(block_rows, dtype=np.int64)
    if block_rows.shape != (class_count,):
        raise DataError("block_rows must have one entry per class")
    if np.any(block_rows < 1):
        raise DataError("block_rows entries must be >= 1")
    row_class = np.repeat(np.arange(class_count), block_rows)
    return (row_class[:, None] == labels[None, :]).astype(np.float64)


def build_targets(labels, class_count: int, block_rows=None) -> StructureTargets:
    """Bundle the structure and label matrices for a training run."""
    labels = _check_labels(labels, class_count)
    h = build_structure_matrix(labels, class_count, block_rows)
    lmat = build_label_matrix(labels, class_count)
    if block_rows is None:
        block_rows = np.bincount(labels, minlength=class_count)
    return StructureTargets(
        h=h,
        l=lmat,
        block_rows=np.asarray(block_rows, dtype=np.int64),
    )
