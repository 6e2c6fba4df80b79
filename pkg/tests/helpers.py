"""Shared fixtures-in-code for the test suite: the frozen desk-scale
configuration and independent oracle implementations."""

import numpy as np

from sadl import TrainConfig

# Configuration frozen for the desk-scale synthetic benchmark (64 atoms,
# spectral steps, 300 iterations, no early stop).
DESK_CONFIG = TrainConfig(
    dict_size=64,
    lambda1=0.001,
    lambda2=1.0,
    lambda3=1.0,
    lambda4=0.5,
    mu0=1.0,
    rho=1.02,
    mu_max=1e6,
    max_iter=300,
    tol=0.0,
    step_rule="spectral",
    seed=0,
    mode="sadl",
)


def prox_l1_oracle(values, alpha):
    """Brute-force elementwise prox of alpha*|.|: evaluate the prox
    objective at the three candidate minimizers and keep the best."""
    v = np.asarray(values, dtype=np.float64)
    candidates = np.stack([v - alpha, v + alpha, np.zeros_like(v)])
    costs = 0.5 * (candidates - v) ** 2 + alpha * np.abs(candidates)
    pick = np.argmin(costs, axis=0)
    return np.take_along_axis(candidates, pick[None], axis=0)[0]


def lagrangian_scalar_oracle(omega, u, q, w, y1, y2, mu, x, h, lmat, cfg):
    """Term-by-term re-evaluation with scalar loops only (no matmul)."""

    def matmul(a, b):
        out = [[0.0] * len(b[0]) for _ in range(len(a))]
        for i in range(len(a)):
            for k in range(len(b)):
                aik = a[i][k]
                for j in range(len(b[0])):
                    out[i][j] += aik * b[k][j]
        return out

    def sub(a, b):
        return [[a[i][j] - b[i][j] for j in range(len(a[0]))] for i in range(len(a))]

    def frob2(a):
        return sum(v * v for row in a for v in row)

    def inner(a, b):
        return sum(x * y for ra, rb in zip(a, b) for x, y in zip(ra, rb))

    omega, u, q, w = omega.tolist(), u.tolist(), q.tolist(), w.tolist()
    y1, y2, x = y1.tolist(), y2.tolist(), x.tolist()
    h, lmat = h.tolist(), lmat.tolist()
    r0 = sub(u, matmul(omega, x))
    qu = matmul(q, u)
    r1 = sub(h, qu)
    r2 = sub(lmat, matmul(w, qu))
    value = 0.5 * frob2(r0)
    value += cfg.lambda1 * sum(abs(v) for row in u for v in row)
    value += cfg.lambda2 * inner(y1, r1) + cfg.lambda3 * inner(y2, r2)
    value += 0.5 * mu * (frob2(r1) + frob2(r2))
    return value


def finite_difference(func, mat, h=1e-6):
    """Central finite differences of a scalar function of one matrix."""
    mat = np.array(mat, dtype=np.float64)
    grad = np.zeros_like(mat)
    it = np.nditer(mat, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        orig = mat[idx]
        mat[idx] = orig + h
        fplus = func(mat)
        mat[idx] = orig - h
        fminus = func(mat)
        mat[idx] = orig
        grad[idx] = (fplus - fminus) / (2.0 * h)
    return grad


def power_iteration_norm(mat, iters=500, tol=1e-12):
    """Independent spectral-norm estimate by power iteration on A^T A."""
    mat = np.asarray(mat, dtype=np.float64)
    v = np.ones(mat.shape[1]) / np.sqrt(mat.shape[1])
    prev = 0.0
    for _ in range(iters):
        av = mat @ v
        atav = mat.T @ av
        norm = np.linalg.norm(atav)
        if norm == 0.0:
            return 0.0
        v = atav / norm
        sigma = np.linalg.norm(mat @ v)
        if abs(sigma - prev) <= tol * max(1.0, sigma):
            return sigma
        prev = sigma
    return prev


def structure_matrix_oracle(labels, class_count, block_rows):
    """Double loop over (row block, column class) membership."""
    starts = [0]
    for b in block_rows:
        starts.append(starts[-1] + int(b))
    s = starts[-1]
    out = np.zeros((s, len(labels)))
    for p in range(s):
        for j, y in enumerate(labels):
            if starts[y] <= p < starts[y + 1]:
                out[p, j] = 1.0
    return out


def random_instance(rng, m=None, n=None, r=None, s=None, c=None):
    """Random small problem instance for gradient/objective checks."""
    m = m or int(rng.integers(2, 13))
    n = n or int(rng.integers(2, 13))
    r = r or int(rng.integers(2, 13))
    s = s or int(rng.integers(2, 13))
    c = c or int(rng.integers(2, 13))
    return {
        "omega": rng.normal(size=(r, m)),
        "u": rng.normal(size=(r, n)),
        "q": rng.normal(size=(s, r)),
        "w": rng.normal(size=(c, s)),
        "y1": rng.normal(size=(s, n)),
        "y2": rng.normal(size=(c, n)),
        "mu": float(rng.uniform(0.1, 2.0)),
        "x": rng.normal(size=(m, n)),
        "h": rng.normal(size=(s, n)),
        "lmat": rng.normal(size=(c, n)),
    }
