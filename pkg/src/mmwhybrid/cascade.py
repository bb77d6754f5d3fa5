"""Residual interuser interference cancellation at the digital baseband.

Hybrid factors only approximate the zero-forcing target, so a second digital
stage is cascaded: it zero-forces the low-dimensional effective channels seen
through the already-designed hybrid precoders and combiners, then the whole
digital precoder is renormalized to the transmit power budget.
"""

from __future__ import annotations

import numpy as np

from .bundles import KFMatrixBundle, PrecoderBundle
from .channel import ChannelRealization
from .errors import NumericalError
from .linalg import fix_phase, svd_fixed


def effective_channels(chan: ChannelRealization, bundle: PrecoderBundle) -> KFMatrixBundle:
    """Per-(user, subcarrier) effective channels W_bb^H W_rf^H H F_rf F_bb_f.

    ``F_bb_f`` is the composite per-subcarrier digital precoder (user blocks
    side by side), so each effective channel is n_streams x (K * n_streams).
    """
    kk, ff = bundle.n_users, bundle.n_subcarriers
    ns = bundle.f_bb.block_shape[1]
    out = np.zeros((kk, ff, ns, kk * ns), dtype=complex)
    for f in range(ff):
        composite = bundle.f_rf @ bundle.f_bb.per_carrier(f)
        for k in range(kk):
            w = bundle.w_rf[k] @ bundle.w_bb.block(k, f)
            out[k, f] = w.conj().T @ chan.h[k, f] @ composite
    return KFMatrixBundle(out)


def bd_cascade(eff: KFMatrixBundle) -> KFMatrixBundle:
    """Zero-forcing cascade blocks for the effective channels.

    For each (user, subcarrier) the block's columns span the null space of the
    other users' stacked effective channels, refined by eigen-beamforming the
    own effective channel inside that null space.
    """
    kk, ff = eff.n_users, eff.n_subcarriers
    ns, width = eff.block_shape
    out = np.zeros((kk, ff, width, ns), dtype=complex)
    for k in range(kk):
        others = [j for j in range(kk) if j != k]
        for f in range(ff):
            if others:
                stack = np.concatenate([eff.block(j, f) for j in others], axis=0)
                _, s, vh = np.linalg.svd(stack, full_matrices=True)
                tol = max(stack.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
                rank = int(np.sum(s > tol))
                basis = vh[rank:].conj().T
            else:
                basis = np.eye(width, dtype=complex)
            if basis.shape[1] < ns:
                raise NumericalError(
                    f"effective null space dimension {basis.shape[1]} < {ns} "
                    f"for user {k}, subcarrier {f}"
                )
            inside = eff.block(k, f) @ basis
            _, _, vh_in = svd_fixed(inside)
            block = basis @ vh_in[:ns].conj().T
            for col in range(ns):
                out[k, f, :, col] = fix_phase(block[:, col])
    return KFMatrixBundle(out)


def normalize_power(
    f_rf: np.ndarray, f_b: KFMatrixBundle, power_budget: float
) -> KFMatrixBundle:
    """Scale the digital blocks so ||f_rf @ concat||_F^2 equals the budget."""
    norm = float(np.linalg.norm(f_rf @ f_b.concat))
    if norm == 0.0:
        raise ValueError("cannot normalize an all-zero precoder product")
    return f_b.scaled(np.sqrt(power_budget) / norm)


def cascade_digital(
    f_bb: KFMatrixBundle, f_bd: KFMatrixBundle
) -> KFMatrixBundle:
    """Overall digital blocks F_bb_f @ F_bd_(k,f), one per (user, subcarrier)."""
    kk, ff = f_bb.n_users, f_bb.n_subcarriers
    n_rf, ns = f_bb.block_shape
    out = np.zeros((kk, ff, n_rf, ns), dtype=complex)
    for f in range(ff):
        composite = f_bb.per_carrier(f)
        for k in range(kk):
            out[k, f] = composite @ f_bd.block(k, f)
    return KFMatrixBundle(out)
