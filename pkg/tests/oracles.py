"""Independent oracle implementations used only by the tests.

These deliberately re-derive results through different algorithms than the
package (projected gradient instead of the l1 dual, naive loops instead of
Cholesky log-dets, exhaustive enumeration, random probing) so agreement is
meaningful.
"""

from __future__ import annotations

import itertools

import numpy as np


def rnd_complex(rng: np.random.Generator, *shape: int) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def rnd_semi_orthogonal(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """Random matrix with orthonormal rows (rows <= cols)."""
    _, _, vh = np.linalg.svd(rnd_complex(rng, rows, cols), full_matrices=False)
    return vh[:rows]


def projected_gradient_precoder(
    f_opt: np.ndarray,
    f_bb: np.ndarray,
    radius: float = 2.0,
    max_iter: int = 50_000,
    tol: float = 1e-12,
) -> np.ndarray:
    """Minimize ||f_opt - V f_bb||_F^2 over entrywise |V_ij| <= radius."""
    gram = f_bb @ f_bb.conj().T
    lip = 2.0 * float(np.linalg.eigvalsh(gram)[-1])
    step = 1.0 / lip
    v = np.zeros((f_opt.shape[0], f_bb.shape[0]), dtype=complex)
    prev = float(np.linalg.norm(f_opt) ** 2)
    for _ in range(max_iter):
        grad = -2.0 * (f_opt - v @ f_bb) @ f_bb.conj().T
        v = v - step * grad
        mag = np.abs(v)
        over = mag > radius
        v[over] *= radius / mag[over]
        obj = float(np.linalg.norm(f_opt - v @ f_bb) ** 2)
        if abs(prev - obj) < tol * max(1.0, abs(prev)):
            break
        prev = obj
    return v


def fit_objective(f_opt: np.ndarray, f_rf: np.ndarray, f_bb: np.ndarray) -> float:
    return float(np.linalg.norm(f_opt - f_rf @ f_bb) ** 2)


def probe_subproblem_residual(
    rows: np.ndarray, n_probes: int, rng: np.random.Generator
) -> float:
    """Best residual of sum_i ||y_i - a_i x||^2 over random unit directions x.

    For a fixed unit x the optimal gains are a_i = x^H y_i, giving residual
    sum ||y_i||^2 - x^H C x with C the column covariance.
    """
    total = float(np.sum(np.abs(rows) ** 2))
    best = total
    dim = rows.shape[1]
    for _ in range(n_probes):
        x = rnd_complex(rng, dim)
        x /= np.linalg.norm(x)
        quad = float(np.sum(np.abs(rows @ np.conj(x)) ** 2))
        best = min(best, total - quad)
    return best


def power_iteration_residual(rows: np.ndarray, iters: int = 200) -> float:
    """Residual at the power-iteration approximation of the top eigenvector."""
    cols = rows.T
    x = np.sum(cols, axis=1)
    if np.linalg.norm(x) == 0:
        x = np.zeros(cols.shape[0], dtype=complex)
        x[0] = 1.0
    x /= np.linalg.norm(x)
    for _ in range(iters):
        x = cols @ (cols.conj().T @ x)
        norm = np.linalg.norm(x)
        if norm == 0:
            break
        x /= norm
    total = float(np.sum(np.abs(rows) ** 2))
    quad = float(np.sum(np.abs(rows @ np.conj(x)) ** 2))
    return total - quad


def two_cluster_partitions(n: int):
    """All partitions of range(n) into two non-empty unlabeled clusters."""
    for bits in itertools.product((0, 1), repeat=n - 1):
        second = [i + 1 for i, b in enumerate(bits) if b == 1]
        if not second:
            continue
        first = [0] + [i + 1 for i, b in enumerate(bits) if b == 0]
        yield tuple(first), tuple(second)


def best_partition_objective(f_opt: np.ndarray) -> float:
    """Exhaustive optimum of the two-cluster mapping objective."""
    best = -np.inf
    for first, second in two_cluster_partitions(f_opt.shape[0]):
        obj = 0.0
        for idx in (first, second):
            sub = f_opt[list(idx), :]
            obj += float(np.linalg.svd(sub, compute_uv=False)[0] ** 2)
        best = max(best, obj)
    return best


def naive_sum_rate(f: int, chan, bundle, cfg) -> float:
    """Literal-formula rate evaluation with explicit inverses and determinants."""
    total = 0.0
    kk = bundle.n_users
    scale = 1.0 / (cfg.n_users * cfg.n_streams * cfg.n_subcarriers)
    for k in range(kk):
        h = chan.h[k, f]
        w = bundle.w_rf[k] @ bundle.w_bb.block(k, f)
        interference = np.zeros((h.shape[0], h.shape[0]), dtype=complex)
        for j in range(kk):
            if j == k:
                continue
            fj = bundle.f_rf @ bundle.f_b.block(j, f)
            interference += scale * (h @ fj) @ (h @ fj).conj().T
        omega = w.conj().T @ (interference + cfg.noise_var * np.eye(h.shape[0])) @ w
        fk = bundle.f_rf @ bundle.f_b.block(k, f)
        signal = scale * (w.conj().T @ h @ fk) @ (w.conj().T @ h @ fk).conj().T
        m = np.eye(w.shape[1]) + signal @ np.linalg.inv(omega)
        total += float(np.log2(np.abs(np.linalg.det(m))))
    return total
