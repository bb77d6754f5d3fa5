"""Fully-connected hybrid precoding with amplitude-2 analog entries.

Summing two unit phasors per connection relaxes the usual unit-modulus
constraint to a disk of radius 2, which makes the analog-only fit the dual of
an l1-regularized least-squares problem (solvable by soft-thresholding, in
closed form when the digital factor is semi-orthogonal) and reduces the joint
analog/digital fit to a truncated-SVD low-rank approximation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError
from .linalg import complex_l1, disk_project, soft_threshold, svd_fixed

AMPLITUDE_LIMIT = 2.0
_SEMI_ORTHO_TOL = 1e-10
_COND_LIMIT = 1e10


@dataclass(eq=False)
class LassoProblem:
    """l1-regularized least-squares instance dual to the analog-only fit.

    ``a`` is a square root of inv(D^H D) with D = F_bb^T (x) I, so a^H a equals
    that inverse; ``b = a @ vec(F_opt @ F_bb^H)``. When the digital factor has
    orthonormal rows, a^H a = I and the solution is one soft-threshold away.
    """

    a: np.ndarray
    b: np.ndarray
    n_tx: int
    n_rf: int
    semi_orthogonal: bool


@dataclass(eq=False)
class LassoSolution:
    x: np.ndarray
    objective: float
    iterations: int
    converged: bool


def _lasso_objective(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> float:
    return 0.5 * float(np.linalg.norm(a @ x - b) ** 2) + AMPLITUDE_LIMIT * complex_l1(x)


def build_lasso(f_bb: np.ndarray, f_opt: np.ndarray) -> LassoProblem:
    """Assemble the dual l1 problem for a fixed digital factor.

    The Kronecker structure of D = F_bb^T (x) I keeps everything expressed
    through the small Gram matrix G = F_bb @ F_bb^H; the observation matrix is
    (S^(1/2) U^H) (x) I with U S U^H the eigendecomposition of inv(G^T).
    Raises ValueError when F_bb is rank deficient.
    """
    f_bb = np.asarray(f_bb, dtype=complex)
    f_opt = np.asarray(f_opt, dtype=complex)
    n_rf = f_bb.shape[0]
    n_tx = f_opt.shape[0]
    sv = np.linalg.svd(f_bb, compute_uv=False)
    if sv.size < n_rf or sv[n_rf - 1] <= max(f_bb.shape) * np.finfo(float).eps * sv[0]:
        raise ValueError("digital factor must have full row rank")

    gram = f_bb @ f_bb.conj().T
    semi = bool(np.max(np.abs(gram - np.eye(n_rf))) <= _SEMI_ORTHO_TOL)
    inv_gram_t = np.linalg.inv(gram.T)
    eigvals, eigvecs = np.linalg.eigh(inv_gram_t)
    root_small = np.sqrt(eigvals)[:, None] * eigvecs.conj().T  # S^(1/2) U^H
    a = np.kron(root_small, np.eye(n_tx))
    target = (f_opt @ f_bb.conj().T).reshape(-1, order="F")  # vec(F_opt F_bb^H) = D^H f_opt
    b = a @ target
    return LassoProblem(a=a, b=b, n_tx=n_tx, n_rf=n_rf, semi_orthogonal=semi)


def solve_lasso(
    prob: LassoProblem, max_iter: int = 10_000, tol: float = 1e-9
) -> LassoSolution:
    """Minimize 0.5*||a x - b||^2 + 2*||x||_1 over complex x.

    Semi-orthogonal instances are solved in closed form by soft-thresholding
    a^H b at 2. Otherwise proximal gradient iterations with step 1/lambda_max
    run until the relative objective change drops below ``tol``; if the budget
    runs out the best iterate is returned with ``converged=False``.
    """
    a, b = prob.a, prob.b
    if prob.semi_orthogonal:
        x = soft_threshold(a.conj().T @ b, AMPLITUDE_LIMIT)
        return LassoSolution(
            x=x, objective=_lasso_objective(a, b, x), iterations=0, converged=True
        )

    lam_max = float(np.linalg.svd(a, compute_uv=False)[0] ** 2)
    step = 1.0 / lam_max
    x = np.zeros(a.shape[1], dtype=complex)
    prev = _lasso_objective(a, b, x)
    for it in range(1, max_iter + 1):
        grad = a.conj().T @ (a @ x - b)
        x = soft_threshold(x - step * grad, AMPLITUDE_LIMIT * step)
        obj = _lasso_objective(a, b, x)
        if abs(prev - obj) < tol * max(1.0, abs(prev)):
            return LassoSolution(x=x, objective=obj, iterations=it, converged=True)
        prev = obj
    return LassoSolution(x=x, objective=prev, iterations=max_iter, converged=False)


def rf_only_precoder(f_opt: np.ndarray, f_bb: np.ndarray) -> np.ndarray:
    """Best amplitude-constrained analog precoder for a fixed digital factor.

    With a semi-orthogonal digital factor this is the entrywise projection of
    F_opt @ F_bb^H onto the radius-2 disk. Otherwise the dual l1 problem is
    solved and the analog matrix recovered as vec^-1(a^H (b - a x*)). All
    output entries satisfy |.| <= 2 (+1e-9 numerical slack).
    """
    f_opt = np.asarray(f_opt, dtype=complex)
    f_bb = np.asarray(f_bb, dtype=complex)
    gram = f_bb @ f_bb.conj().T
    if np.max(np.abs(gram - np.eye(f_bb.shape[0]))) <= _SEMI_ORTHO_TOL:
        return disk_project(f_opt @ f_bb.conj().T, AMPLITUDE_LIMIT)

    prob = build_lasso(f_bb, f_opt)
    # tighter-than-default tolerance: the recovered amplitudes inherit the
    # iterate's slack, and the contract caps them at 2
    sol = solve_lasso(prob, max_iter=50_000, tol=1e-13)
    vec = prob.a.conj().T @ (prob.b - prob.a @ sol.x)
    f_rf = vec.reshape((prob.n_tx, prob.n_rf), order="F")
    peak = float(np.max(np.abs(f_rf)))
    if peak > AMPLITUDE_LIMIT + 1e-4:
        raise NumericalError(
            f"recovered analog entry modulus {peak} exceeds the amplitude limit"
            + ("" if sol.converged else " (l1 solver did not converge)")
        )
    return disk_project(f_rf, AMPLITUDE_LIMIT)


@dataclass(eq=False)
class LowRankApproximation:
    """Best rank-n_rf factorization of a target precoder (truncated SVD)."""

    f_hat: np.ndarray      # U1 S1 V1^H
    u1: np.ndarray
    s1: np.ndarray
    v1h: np.ndarray
    residual: float        # sum of the discarded squared singular values

    @property
    def f_rf(self) -> np.ndarray:
        return self.u1

    @property
    def f_bb(self) -> np.ndarray:
        return self.s1[:, None] * self.v1h


def hybrid_lowrank(f_opt: np.ndarray, n_rf: int) -> LowRankApproximation:
    """Truncate the target to its n_rf strongest principal components.

    By the Eckart-Young theorem the residual equals the sum of the trailing
    squared singular values, and ||f_hat||_F <= ||f_opt||_F so the transmit
    power budget carries over automatically.
    """
    f_opt = np.asarray(f_opt, dtype=complex)
    if n_rf > min(f_opt.shape):
        raise ValueError(
            f"n_rf={n_rf} exceeds matrix dimensions {f_opt.shape}"
        )
    u, s, vh = svd_fixed(f_opt)
    u1, s1, v1h = u[:, :n_rf], s[:n_rf], vh[:n_rf]
    f_hat = (u1 * s1[None, :]) @ v1h
    residual = float(np.sum(s[n_rf:] ** 2))
    return LowRankApproximation(f_hat=f_hat, u1=u1, s1=s1, v1h=v1h, residual=residual)


@dataclass(eq=False)
class IdentityBlockDecomposition:
    """Factorization whose analog matrix carries an identity block.

    Rows holding the identity need no phase shifters (direct connections), so
    only 2 * n_rf * (n_tx - n_rf) shifters remain. ``permutation`` records the
    row order used when the leading rows were too ill-conditioned to invert
    directly; None means the natural order was kept.
    """

    f_rf: np.ndarray
    f_bb: np.ndarray
    permutation: np.ndarray | None
    n_phase_shifters: int


def decompose_identity_block(f_hat: np.ndarray, n_rf: int) -> IdentityBlockDecomposition:
    """Split a rank-n_rf matrix as [I; X] @ F1 with F1 its leading rows.

    Requires the first n_rf rows to be linearly independent, which holds for
    SVD-derived truncations in general position; if their condition number
    exceeds 1e10 a row-pivoted fallback picks a well-conditioned row set and
    the permutation is reported.
    """
    f_hat = np.asarray(f_hat, dtype=complex)
    n_tx = f_hat.shape[0]
    if n_rf > min(f_hat.shape):
        raise ValueError("n_rf exceeds matrix dimensions")

    def split(order: np.ndarray | None):
        mat = f_hat if order is None else f_hat[order]
        top, rest = mat[:n_rf], mat[n_rf:]
        return mat, top, rest

    order = None
    _, top, rest = split(order)
    sv = np.linalg.svd(top, compute_uv=False)
    if sv[-1] == 0 or sv[0] / sv[-1] > _COND_LIMIT:
        # column pivoting on the transpose ranks rows by independence
        _, _, piv = scipy.linalg.qr(f_hat.T, pivoting=True, mode="economic")
        chosen = sorted(int(i) for i in piv[:n_rf])
        remaining = [i for i in range(n_tx) if i not in chosen]
        order = np.array(chosen + remaining)
        _, top, rest = split(order)
        sv = np.linalg.svd(top, compute_uv=False)
        if sv[-1] == 0 or sv[0] / sv[-1] > _COND_LIMIT:
            raise NumericalError("no well-conditioned leading row block found")

    x = rest @ np.linalg.pinv(top)
    f_rf_ordered = np.vstack([np.eye(n_rf, dtype=complex), x])
    if order is None:
        f_rf = f_rf_ordered
    else:
        f_rf = np.empty_like(f_rf_ordered)
        f_rf[order] = f_rf_ordered  # undo the row permutation
    return IdentityBlockDecomposition(
        f_rf=f_rf,
        f_bb=top.copy(),
        permutation=order,
        n_phase_shifters=2 * n_rf * (n_tx - n_rf),
    )


def sps_phase_extract(lowrank: LowRankApproximation) -> tuple[np.ndarray, np.ndarray]:
    """Unit-modulus analog precoder from the phases of the orthonormal factor.

    Every entry of the returned analog matrix has modulus exactly 1 (zero
    entries map to phase 0, i.e. to 1); the digital factor S1 V1^H is kept.
    The pair no longer meets the power budget exactly and is rescaled by the
    caller before evaluation.
    """
    f_rf = np.exp(1j * np.angle(lowrank.u1))
    return f_rf, lowrank.f_bb.copy()


@dataclass(eq=False)
class PhasePair:
    """Pair of phase-shifter angles realizing one analog entry."""

    theta_plus: np.ndarray | float
    theta_minus: np.ndarray | float

    def reconstruct(self):
        return np.exp(1j * np.asarray(self.theta_plus)) + np.exp(
            1j * np.asarray(self.theta_minus)
        )


def factor_double_phase(entry) -> PhasePair:
    """Split a modulus<=2 complex value into two unit phasors.

    a*e^(j*theta) = e^(j*(theta+phi)) + e^(j*(theta-phi)) with
    phi = arccos(a/2); works elementwise on arrays. Raises ValueError when any
    modulus exceeds 2 (beyond 1e-12 slack).
    """
    z = np.asarray(entry, dtype=complex)
    mag = np.abs(z)
    if np.any(mag > AMPLITUDE_LIMIT + 1e-12):
        raise ValueError(f"modulus {float(np.max(mag))} exceeds {AMPLITUDE_LIMIT}")
    theta = np.angle(z)
    phi = np.arccos(np.clip(mag / AMPLITUDE_LIMIT, -1.0, 1.0))
    pair = PhasePair(theta_plus=theta + phi, theta_minus=theta - phi)
    if np.ndim(entry) == 0:
        pair.theta_plus = float(pair.theta_plus)
        pair.theta_minus = float(pair.theta_minus)
    return pair


def rescale_feasible(f_rf: np.ndarray, f_bb: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Move amplitude between factors so the analog peak modulus is exactly 2.

    The product f_rf @ f_bb is unchanged: both factors are scaled by the
    reciprocal factors gamma = max|f_rf| / 2 and 1/gamma.
    """
    peak = float(np.max(np.abs(f_rf)))
    if peak == 0.0:
        raise ValueError("cannot rescale an all-zero analog precoder")
    gamma = peak / AMPLITUDE_LIMIT
    return f_rf / gamma, f_bb * gamma
