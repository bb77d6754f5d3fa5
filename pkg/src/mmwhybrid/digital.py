"""Fully digital block-diagonalization precoder and combiner targets.

The digital baseline forces each user's signal into the null space of every
other user's channel, then eigen-beamforms inside that null space. It is both
the approximation target for all hybrid designs and the performance upper
bound in the evaluations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundles import KFMatrixBundle
from .channel import ChannelRealization
from .config import SystemConfig
from .errors import InfeasibleScenarioError
from .linalg import fix_phase, svd_fixed


@dataclass(eq=False)
class FullyDigitalPrecoder:
    """Per-(user, subcarrier) zero-forcing precoder blocks, n_tx x n_streams each."""

    blocks: KFMatrixBundle

    @property
    def concat(self) -> np.ndarray:
        return self.blocks.concat


def _null_space_basis(stack: np.ndarray, n_cols: int) -> np.ndarray:
    """Orthonormal basis of the null space of ``stack`` (rows x n_cols)."""
    if stack.shape[0] == 0:
        return np.eye(n_cols, dtype=complex)
    _, s, vh = np.linalg.svd(stack, full_matrices=True)
    tol = max(stack.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol))
    return vh[rank:].conj().T


def bd_precoder(chan: ChannelRealization, cfg: SystemConfig) -> FullyDigitalPrecoder:
    """Block-diagonalization precoder with equal per-stream power.

    For each (user, subcarrier): stack the other users' channels, take an
    orthonormal basis of the stack's null space, and keep the n_streams
    strongest directions of the user's channel restricted to that basis.
    Columns are unit-norm, so the total power is exactly
    n_users * n_streams * n_subcarriers.
    """
    kk, ff = cfg.n_users, cfg.n_subcarriers
    ns = cfg.n_streams
    blocks = np.zeros((kk, ff, cfg.n_tx, ns), dtype=complex)
    for k in range(kk):
        others = [j for j in range(kk) if j != k]
        for f in range(ff):
            stack = (
                np.concatenate([chan.h[j, f] for j in others], axis=0)
                if others
                else np.zeros((0, cfg.n_tx))
            )
            v0 = _null_space_basis(stack, cfg.n_tx)
            if v0.shape[1] < ns:
                raise InfeasibleScenarioError(
                    [
                        f"null space dimension {v0.shape[1]} < n_streams {ns} "
                        f"for user {k}, subcarrier {f}"
                    ]
                )
            effective = chan.h[k, f] @ v0
            _, _, vh = svd_fixed(effective)
            directions = v0 @ vh[:ns].conj().T
            for col in range(ns):
                vec = fix_phase(directions[:, col])
                blocks[k, f, :, col] = vec / np.linalg.norm(vec)
    return FullyDigitalPrecoder(blocks=KFMatrixBundle(blocks))


def digital_combiner(chan: ChannelRealization, f_opt: FullyDigitalPrecoder) -> KFMatrixBundle:
    """Per-(user, subcarrier) combiners: top left singular vectors of H @ F.

    Columns are orthonormal with the deterministic phase convention.
    """
    kk, ff, _, ns = f_opt.blocks.blocks.shape
    n_rx = chan.h.shape[2]
    out = np.zeros((kk, ff, n_rx, ns), dtype=complex)
    for k in range(kk):
        for f in range(ff):
            effective = chan.h[k, f] @ f_opt.blocks.block(k, f)
            u, _, _ = svd_fixed(effective)
            out[k, f] = u[:, :ns]
    return KFMatrixBundle(out)
