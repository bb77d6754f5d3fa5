"""Dense complex linear-algebra helpers with deterministic sign conventions."""

from __future__ import annotations

import numpy as np


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate a vector by a unit phasor so its largest-modulus entry is real positive.

    The first occurrence of the maximum modulus wins ties, which makes the
    convention deterministic. A zero vector is returned unchanged.
    """
    i = int(np.argmax(np.abs(v)))
    if v[i] == 0:
        return v
    return v * np.exp(-1j * np.angle(v[i]))


def svd_fixed(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Economy SVD with the phase of each left singular vector fixed.

    Each column of U is rotated so its largest-modulus entry is real positive,
    and the matching row of Vh absorbs the conjugate phase, so U @ diag(s) @ Vh
    is unchanged.
    """
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    for col in range(u.shape[1]):
        i = int(np.argmax(np.abs(u[:, col])))
        if u[i, col] == 0:
            continue
        phase = np.exp(-1j * np.angle(u[i, col]))
        u[:, col] *= phase
        vh[col, :] *= np.conj(phase)
    return u, s, vh


def principal_component(cols: np.ndarray) -> tuple[np.ndarray, float]:
    """Unit-norm top eigenvector and eigenvalue of cols @ cols^H.

    `cols` holds the observation vectors as columns (L x m). The eigenpair is
    obtained from the economy SVD, so the cost scales with min(L, m). An
    all-zero input maps to the first canonical basis vector with eigenvalue 0.
    """
    if not np.any(cols):
        x = np.zeros(cols.shape[0], dtype=complex)
        x[0] = 1.0
        return x, 0.0
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    return fix_phase(u[:, 0]), float(s[0] ** 2)


def largest_eigenvalue_gram(gram: np.ndarray) -> float:
    """Largest eigenvalue of a Hermitian PSD Gram matrix (clamped at 0)."""
    if gram.shape[0] == 0:
        return 0.0
    return float(max(np.linalg.eigvalsh(gram)[-1], 0.0))


def soft_threshold(z: np.ndarray, tau: float) -> np.ndarray:
    """Complex soft-thresholding: shrink each modulus by tau, keep the phase.

    The phase of a zero entry is taken as 0, so zeros map to zeros.
    """
    mag = np.abs(z)
    return np.exp(1j * np.angle(z)) * np.maximum(mag - tau, 0.0)


def disk_project(z: np.ndarray, radius: float = 2.0) -> np.ndarray:
    """Entrywise projection onto the complex disk of the given radius."""
    mag = np.abs(z)
    scale = np.ones_like(mag)
    over = mag > radius
    scale[over] = radius / mag[over]
    return z * scale


def complex_l1(x: np.ndarray) -> float:
    """Sum of entry moduli (the l1-norm used for complex vectors)."""
    return float(np.sum(np.abs(x)))


def logdet_hermitian(mat: np.ndarray) -> float:
    """log-determinant of a Hermitian positive definite matrix via Cholesky.

    Raises np.linalg.LinAlgError when the matrix is not positive definite.
    """
    chol = np.linalg.cholesky(mat)
    return 2.0 * float(np.sum(np.log(np.real(np.diag(chol)))))
