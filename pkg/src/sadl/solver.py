"""Linearized alternating-direction training loop.

The trainer minimizes an augmented Lagrangian over five blocks: sparse
codes U (prox-gradient step with soft thresholding), structuring transform
Q and classifier W (gradient steps), the analysis dictionary Omega (exact
ridge solve with cached factorization, then row normalization), followed by
dual ascent on both coupling constraints and a capped geometric growth of
the quadratic penalty mu.

Step sizes follow either the spectral rule, which bounds each block's
curvature by operator norms so the linearized steps are majorizing, or
user-supplied fixed constants.
"""

import dataclasses

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .core import (
    ConfigError,
    DataError,
    Dataset,
    Model,
    NumericalError,
    TrainConfig,
    TrainState,
    effective_lambdas,
    validate_config,
    validate_dataset,
)

ETA_FLOOR = 1e-8


@dataclasses.dataclass(frozen=True)
class StepSizes:
    """Per-block step-size denominators (each multiplied by mu when used).

    eta_u scales the code prox step, eta_q the structuring-transform step,
    eta_w the classifier step.
    """

    eta_u: float
    eta_q: float
    eta_w: float


def soft_threshold(mat, alpha: float):
    """Elementwise shrinkage sign(x) * max(|x| - alpha, 0), the proximal
    operator of alpha * l1. Adding 0.0 normalizes signed zeros."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    mat = np.asarray(mat, dtype=np.float64)
    return np.sign(mat) * np.maximum(np.abs(mat) - alpha, 0.0) + 0.0


def spectral_norm(mat) -> float:
    """Largest singular value, via the eigenvalues of the smaller Gram
    matrix (cheaper than a full SVD for rectangular inputs)."""
    mat = np.asarray(mat, dtype=np.float64)
    if mat.size == 0:
        return 0.0
    gram = mat @ mat.T if mat.shape[0] <= mat.shape[1] else mat.T @ mat
    top = np.linalg.eigvalsh(gram)[-1]
    return float(np.sqrt(max(top, 0.0)))


def lagrangian(omega, u, q, w, y1, y2, mu, x, h, lmat, cfg: TrainConfig) -> float:
    """Augmented-Lagrangian value.

    0.5 * ||U - Omega X||_F^2 + lambda1 * ||U||_1
      + lambda2 * <Y1, H - QU> + lambda3 * <Y2, L - WQU>
      + mu/2 * (||H - QU||_F^2 + ||L - WQU||_F^2)
    """
    lam2, lam3 = effective_lambdas(cfg)
    r0 = u - omega @ x
    qu = q @ u
    r1 = h - qu
    r2 = lmat - w @ qu
    value = 0.5 * np.vdot(r0, r0) + cfg.lambda1 * np.sum(np.abs(u))
    value += lam2 * np.vdot(y1, r1) + lam3 * np.vdot(y2, r2)
    value += 0.5 * mu * (np.vdot(r1, r1) + np.vdot(r2, r2))
    return float(value)


def grad_u(omega, u, q, w, y1, y2, mu, x, h, lmat, cfg: TrainConfig):
    """Gradient of the smooth part of the Lagrangian in the codes U
    (the l1 term is handled by the prox, not here)."""
    lam2, lam3 = effective_lambdas(cfg)
    qu = q @ u
    r1 = h - qu
    r2 = lmat - w @ qu
    g = u - omega @ x
    g -= q.T @ (lam2 * y1 + mu * r1)
    g -= q.T @ (w.T @ (lam3 * y2 + mu * r2))
    return g


def grad_q(omega, u, q, w, y1, y2, mu, x, h, lmat, cfg: TrainConfig):
    """Gradient of the Lagrangian in the structuring transform Q."""
    lam2, lam3 = effective_lambdas(cfg)
    qu = q @ u
    r1 = h - qu
    r2 = lmat - w @ qu
    g = -(lam2 * y1 + mu * r1) @ u.T
    g -= w.T @ ((lam3 * y2 + mu * r2) @ u.T)
    return g


def grad_w(omega, u, q, w, y1, y2, mu, x, h, lmat, cfg: TrainConfig):
    """Gradient of the Lagrangian in the classifier W."""
    lam3 = effective_lambdas(cfg)[1]
    qu = q @ u
    r2 = lmat - w @ qu
    return -(lam3 * y2 + mu * r2) @ qu.T


def gram_factor(x, lambda4: float):
    """Cholesky factorization of X X^T + lambda4 I, reusable across
    iterations since it never changes within a run."""
    m = x.shape[0]
    a = x @ x.T + lambda4 * np.eye(m)
    try:
        return cho_factor(a, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            "dictionary update system is singular (rank-deficient data with lambda4 = 0)"
        ) from exc


def update_omega(u, x, lambda4: float, factor=None):
    """Exact minimizer of ||U - Omega X||_F^2 + lambda4 ||Omega||_F^2,
    solved as a linear system (never an explicit inverse)."""
    if factor is None:
        factor = gram_factor(x, lambda4)
    return cho_solve(factor, x @ u.T).T


def normalize_rows(omega, rng=None):
    """Scale every row to unit l2 norm. Zero rows are re-drawn from the
    Gaussian initializer so the unit-norm constraint always holds."""
    omega = np.array(omega, dtype=np.float64)
    norms = np.linalg.norm(omega, axis=1)
    zero = norms == 0.0
    if np.any(zero):
        if rng is None:
            rng = np.random.default_rng(0)
        m = omega.shape[1]
        for i in np.nonzero(zero)[0]:
            row = rng.normal(0.0, 1.0 / np.sqrt(m), size=m)
            omega[i] = row
            norms[i] = np.linalg.norm(row)
    return omega / norms[:, None]


def dual_and_penalty_update(y1, y2, mu, q, u, w, h, lmat, cfg: TrainConfig):
    """Dual ascent on both residuals and capped growth of the penalty."""
    qu = q @ u
    y1_next = y1 + mu * (h - qu)
    y2_next = y2 + mu * (lmat - w @ qu)
    mu_next = min(cfg.rho * mu, cfg.mu_max)
    return y1_next, y2_next, mu_next


def _eta_u_spectral(q, w, mu: float, structured: bool) -> float:
    # Curvature bound of the smooth U block: 1 from the data term plus
    # mu * (||Q||^2 + ||WQ||^2) from the two quadratic penalties. Dividing
    # by mu gives the eta convention (denominator = mu * eta).
    if not structured:
        return max(1.0 / mu, ETA_FLOOR)
    nq = spectral_norm(q)
    nwq = spectral_norm(w @ q)
    return max(nq * nq + nwq * nwq + 1.0 / mu, ETA_FLOOR)


def _eta_q_spectral(u, w) -> float:
    nu = spectral_norm(u)
    nw = spectral_norm(w)
    return max(nu * nu * (1.0 + nw * nw), ETA_FLOOR)


def _eta_w_spectral(qu) -> float:
    nqu = spectral_norm(qu)
    return max(nqu * nqu, ETA_FLOOR)


def compute_step_sizes(q, w, u, mu: float, cfg: TrainConfig) -> StepSizes:
    """Step-size denominators for the three linearized blocks.

    The spectral rule ties each denominator to the operator-norm curvature
    of its block; the fixed rule arranges the configured constants. All
    outputs are clamped below by ETA_FLOOR.
    """
    if cfg.step_rule == "fixed":
        return StepSizes(
            eta_u=max(cfg.eta_q + cfg.eta_wq, ETA_FLOOR),
            eta_q=max(cfg.eta_q + cfg.eta_wu, ETA_FLOOR),
            eta_w=max(cfg.eta_qu, ETA_FLOOR),
        )
    structured = cfg.mode != "plain_adl"
    return StepSizes(
        eta_u=_eta_u_spectral(q, w, mu, structured),
        eta_q=_eta_q_spectral(u, w),
        eta_w=_eta_w_spectral(q @ u),
    )


def prox_grad_u_step(u, grad, denominator: float, lambda1: float):
    """One linearized code update: gradient step then l1 prox, both scaled
    by the same curvature denominator."""
    return soft_threshold(u - grad / denominator, lambda1 / denominator)


def _plain_objective(omega, u, x, lambda1: float) -> float:
    r0 = u - omega @ x
    return float(0.5 * np.vdot(r0, r0) + lambda1 * np.sum(np.abs(u)))


def train(data: Dataset, targets, cfg: TrainConfig, callback=None):
    """Run the full training loop and return (Model, TrainState).

    Per iteration: prox-gradient code update, gradient steps on the
    structuring transform and classifier (skipped in plain_adl mode),
    exact ridge dictionary update with row normalization, dual ascent, and
    penalty growth. The objective trace records the augmented-Lagrangian
    value of the state as it stands after each full iteration (updated
    duals and penalty); training stops early once its relative change
    drops below cfg.tol, and aborts with a NumericalError if it becomes
    non-finite.

    callback, if given, is invoked after every iteration as
    callback(iteration, omega, mu, objective) with a copy of the
    dictionary.

    targets may be None in plain_adl mode; there the objective trace is
    the bare data-plus-sparsity objective and the residual traces are NaN.
    """
    validate_config(cfg)
    validate_dataset(data, require_all_classes=True)
    structured = cfg.mode != "plain_adl"

    x = data.x
    m, n = x.shape
    r = cfg.dict_size
    if structured:
        if targets is None:
            raise ConfigError("mode sadl requires structure targets")
        h, lmat = targets.h, targets.l
        s = h.shape[0]
        c = lmat.shape[0]
        if h.shape[1] != n or lmat.shape[1] != n:
            raise DataError(
                f"targets have {h.shape[1]}/{lmat.shape[1]} columns, dataset has {n}"
            )
        if c != data.class_count:
            raise ConfigError("label matrix row count must equal class_count")
    else:
        # Structure terms disabled; q and w keep minimal consistent shapes
        # so the returned model is still a complete triple.
        h = lmat = None
        s = data.class_count
        c = data.class_count

    rng = np.random.default_rng(cfg.seed)
    omega = rng.normal(0.0, 1.0 / np.sqrt(m), size=(r, m))
    q = rng.normal(0.0, 1.0 / np.sqrt(r), size=(s, r))
    w = rng.normal(0.0, 1.0 / np.sqrt(s), size=(c, s))
    u = np.zeros((r, n))
    y1 = np.zeros((s, n))
    y2 = np.zeros((c, n))
    mu = cfg.mu0

    factor = gram_factor(x, cfg.lambda4)
    state = TrainState(u=u, y1=y1, y2=y2, mu=mu, iterations=0)
    fixed = cfg.step_rule == "fixed"
    prev_obj = None

    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        for k in range(1, cfg.max_iter + 1):
            # Code update (prox-gradient).
            eta_u = (cfg.eta_q + cfg.eta_wq) if fixed else _eta_u_spectral(q, w, mu, structured)
            den_u = mu * max(eta_u, ETA_FLOOR)
            if structured:
                g = grad_u(omega, u, q, w, y1, y2, mu, x, h, lmat, cfg)
            else:
                g = u - omega @ x
            u = prox_grad_u_step(u, g, den_u, cfg.lambda1)

            if structured:
                # Structuring transform, then classifier, each against the
                # freshest iterates.
                eta_q = (cfg.eta_q + cfg.eta_wu) if fixed else _eta_q_spectral(u, w)
                q = q - grad_q(omega, u, q, w, y1, y2, mu, x, h, lmat, cfg) / (
                    mu * max(eta_q, ETA_FLOOR)
                )
                eta_w = cfg.eta_qu if fixed else _eta_w_spectral(q @ u)
                w = w - grad_w(omega, u, q, w, y1, y2, mu, x, h, lmat, cfg) / (
                    mu * max(eta_w, ETA_FLOOR)
                )

            # Dictionary update: exact ridge solve, then row normalization.
            omega = update_omega(u, x, cfg.lambda4, factor=factor)
            omega = normalize_rows(omega, rng)

            if structured:
                y1, y2, mu = dual_and_penalty_update(y1, y2, mu, q, u, w, h, lmat, cfg)
                qu = q @ u
                res_h = float(np.linalg.norm(h - qu))
                res_l = float(np.linalg.norm(lmat - w @ qu))
                obj = lagrangian(omega, u, q, w, y1, y2, mu, x, h, lmat, cfg)
            else:
                mu = min(cfg.rho * mu, cfg.mu_max)
                res_h = float("nan")
                res_l = float("nan")
                obj = _plain_objective(omega, u, x, cfg.lambda1)

            state.iterations = k
            state.objective_trace.append(obj)
            state.residual_h_trace.append(res_h)
            state.residual_l_trace.append(res_l)
            state.mu_trace.append(mu)

            if not np.isfinite(obj):
                raise NumericalError(f"objective diverged at iteration {k}")
            if callback is not None:
                callback(k, omega.copy(), mu, obj)
            if prev_obj is not None:
                change = abs(obj - prev_obj) / max(1.0, abs(prev_obj))
                if change < cfg.tol:
                    break
            prev_obj = obj

    state.u = u
    state.y1 = y1
    state.y2 = y2
    state.mu = mu
    model = Model(omega=omega, q=q, w=w, config=cfg, class_count=data.class_count)
    return model, state
