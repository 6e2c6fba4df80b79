"""Closed-form ridge baseline classifier on raw features.

Solves W_r = L X^T (X X^T + gamma I)^{-1} and packs it into the standard
model container as (omega = row-normalized W_r, q = diag(row norms),
w = identity), so that w @ q @ omega reproduces W_r exactly and the unit-
row-norm invariant of the container still holds. Serialization, prediction
and evaluation then work unchanged.
"""

import numpy as np
from scipy.linalg import cho_solve

from .core import Dataset, Model, TrainConfig, validate_dataset
from .solver import gram_factor
from .structure import build_label_matrix


def train_ridge(data: Dataset, cfg: TrainConfig) -> Model:
    """Fit the one-against-all ridge scorer; gamma is cfg.lambda4."""
    validate_dataset(data, require_all_classes=True)
    x = data.x
    c = data.class_count
    lmat = build_label_matrix(data.labels, c)
    factor = gram_factor(x, cfg.lambda4)
    scorer = cho_solve(factor, x @ lmat.T).T

    norms = np.linalg.norm(scorer, axis=1)
    omega = np.empty_like(scorer)
    for i in range(c):
        if norms[i] == 0.0:
            # Degenerate class row: any unit row works since the diagonal
            # gain is zero.
            omega[i] = 0.0
            omega[i, 0] = 1.0
        else:
            omega[i] = scorer[i] / norms[i]
    return Model(
        omega=omega,
        q=np.diag(norms),
        w=np.eye(c),
        config=cfg,
        class_count=c,
    )
