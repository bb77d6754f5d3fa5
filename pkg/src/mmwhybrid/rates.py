"""Achievable sum-rate evaluation under Gaussian signaling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bundles import PrecoderBundle
from .channel import ChannelRealization
from .config import SystemConfig
from .errors import NumericalError
from .linalg import logdet_hermitian


@dataclass(frozen=True)
class RateSample:
    """One Monte-Carlo spectral-efficiency sample."""

    realization: int
    snr_db: float
    algorithm: str
    spectral_efficiency: float  # bits/s/Hz, averaged over subcarriers


def interference_matrix(
    k: int,
    f: int,
    chan: ChannelRealization,
    bundle: PrecoderBundle,
    noise_var: float,
) -> np.ndarray:
    """Interference-plus-noise covariance after combining, n_streams square.

    Omega = W^H [ (1/(K*Ns*F)) * H (sum_{j!=k} F_j F_j^H) H^H + noise_var*I ] W
    with W the effective combiner and F_j the effective per-user precoders.
    Hermitian positive definite whenever noise_var > 0 and W has full column
    rank; a singular result raises :class:`NumericalError`.
    """
    w = bundle.effective_combiner(k, f)
    h = chan.h[k, f]
    scale = 1.0 / (bundle.n_users * bundle.f_b.block_shape[1] * bundle.n_subcarriers)
    inner = noise_var * np.eye(h.shape[0], dtype=complex)
    for j in range(bundle.n_users):
        if j == k:
            continue
        hf = h @ bundle.effective_precoder(j, f)
        inner += scale * (hf @ hf.conj().T)
    omega = w.conj().T @ inner @ w
    omega = 0.5 * (omega + omega.conj().T)  # enforce exact Hermitian symmetry
    try:
        np.linalg.cholesky(omega)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"interference-plus-noise matrix singular for user {k}, subcarrier {f}"
        ) from exc
    return omega


def sum_rate(
    f: int, chan: ChannelRealization, bundle: PrecoderBundle, cfg: SystemConfig
) -> float:
    """Achievable sum rate on subcarrier f, in bits/s/Hz.

    R_f = sum_k log2 det(I + (1/(K*Ns*F)) W^H H F_k F_k^H H^H W Omega^-1),
    evaluated stably as logdet(Omega + S) - logdet(Omega) with S the scaled
    signal covariance.
    """
    total = 0.0
    scale = 1.0 / cfg.power_budget
    for k in range(bundle.n_users):
        w = bundle.effective_combiner(k, f)
        t = w.conj().T @ chan.h[k, f] @ bundle.effective_precoder(k, f)
        signal = scale * (t @ t.conj().T)
        signal = 0.5 * (signal + signal.conj().T)
        omega = interference_matrix(k, f, chan, bundle, cfg.noise_var)
        try:
            total += logdet_hermitian(omega + signal) - logdet_hermitian(omega)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                f"rate evaluation failed for user {k}, subcarrier {f}"
            ) from exc
    return total / math.log(2.0)


def spectral_efficiency(
    chan: ChannelRealization, bundle: PrecoderBundle, cfg: SystemConfig
) -> float:
    """Subcarrier-averaged sum rate in bits/s/Hz."""
    rates = [sum_rate(f, chan, bundle, cfg) for f in range(bundle.n_subcarriers)]
    return float(np.mean(rates))
