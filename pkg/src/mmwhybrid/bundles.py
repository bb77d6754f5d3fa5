"""Matrix-bundle containers shared by all precoder construction stages."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .partial import MappingSets

FULLY_CONNECTED = "fully-connected"
PARTIALLY_CONNECTED = "partially-connected"
FULLY_DIGITAL = "fully-digital"

AMPLITUDE_LIMIT = 2.0          # two summed unit phasors per analog entry
POWER_REL_TOL = 1e-9           # double-precision SVD round-off allowance


class KFMatrixBundle:
    """Stack of equally shaped complex matrices indexed by (user, subcarrier).

    Blocks are stored as one (n_users, n_subcarriers, m, n) array. The flat
    ``concat`` view orders columns user-major then subcarrier then column,
    matching how the combined precoder is laid out.
    """

    def __init__(self, blocks: np.ndarray):
        blocks = np.asarray(blocks)
        if blocks.ndim != 4:
            raise ValueError(f"expected a 4-D (K, F, m, n) array, got {blocks.shape}")
        self.blocks = blocks.astype(complex, copy=False)

    @property
    def n_users(self) -> int:
        return self.blocks.shape[0]

    @property
    def n_subcarriers(self) -> int:
        return self.blocks.shape[1]

    @property
    def block_shape(self) -> tuple[int, int]:
        return self.blocks.shape[2], self.blocks.shape[3]

    def block(self, k: int, f: int) -> np.ndarray:
        return self.blocks[k, f]

    @property
    def concat(self) -> np.ndarray:
        """(m, K*F*n) concatenation, columns ordered (user, subcarrier, column)."""
        kk, ff, m, n = self.blocks.shape
        return self.blocks.transpose(2, 0, 1, 3).reshape(m, kk * ff * n)

    def per_carrier(self, f: int) -> np.ndarray:
        """(m, K*n) composite on subcarrier f: user blocks side by side."""
        return np.concatenate([self.blocks[k, f] for k in range(self.n_users)], axis=1)

    @classmethod
    def from_concat(cls, mat: np.ndarray, n_users: int, n_subcarriers: int) -> "KFMatrixBundle":
        mat = np.asarray(mat)
        m, total = mat.shape
        if total % (n_users * n_subcarriers) != 0:
            raise ValueError("column count not divisible by n_users * n_subcarriers")
        n = total // (n_users * n_subcarriers)
        blocks = mat.reshape(m, n_users, n_subcarriers, n).transpose(1, 2, 0, 3)
        return cls(blocks.copy())

    def scaled(self, factor: float) -> "KFMatrixBundle":
        return KFMatrixBundle(self.blocks * factor)


@dataclass(eq=False)
class PrecoderBundle:
    """Complete transmitter/receiver precoding state for one channel realization.

    ``f_b`` holds the final per-(user, subcarrier) digital blocks actually
    transmitted (after the optional interference-cancellation cascade and power
    normalization); ``f_bb`` keeps the pre-cascade approximation blocks and
    ``f_bd`` the cascade blocks when present.
    """

    f_rf: np.ndarray               # (n_tx, n_rf_tx) analog precoder
    f_bb: KFMatrixBundle           # (n_rf_tx, n_streams) approximation blocks
    f_b: KFMatrixBundle            # (n_rf_tx, n_streams) final digital blocks
    w_rf: np.ndarray               # (n_users, n_rx, n_rf_rx) analog combiners
    w_bb: KFMatrixBundle           # (n_rf_rx, n_streams) digital combiners
    structure: str                 # fully-connected | partially-connected | fully-digital
    f_bd: KFMatrixBundle | None = None   # (K*n_streams, n_streams) cascade blocks
    mapping: MappingSets | None = None
    power_normalized: bool = False

    def __post_init__(self):
        if self.structure not in (FULLY_CONNECTED, PARTIALLY_CONNECTED, FULLY_DIGITAL):
            raise ValueError(f"unknown structure tag {self.structure!r}")
        n_rf_tx = self.f_rf.shape[1]
        if self.f_bb.block_shape[0] != n_rf_tx or self.f_b.block_shape[0] != n_rf_tx:
            raise ValueError("digital block row count does not match analog column count")
        if self.f_bb.blocks.shape[:2] != self.f_b.blocks.shape[:2]:
            raise ValueError("f_bb and f_b disagree on (users, subcarriers)")
        if self.w_rf.shape[0] != self.f_bb.n_users:
            raise ValueError("combiner user count mismatch")
        if self.w_bb.block_shape[0] != self.w_rf.shape[2]:
            raise ValueError("w_bb rows do not match w_rf columns")
        if self.w_bb.blocks.shape[:2] != self.f_bb.blocks.shape[:2]:
            raise ValueError("w_bb and f_bb disagree on (users, subcarriers)")
        if self.structure == PARTIALLY_CONNECTED and self.mapping is None:
            raise ValueError("partially-connected bundle needs its mapping")
        if self.f_bd is not None:
            want = self.f_bb.n_users * self.f_bb.block_shape[1]
            if self.f_bd.block_shape[0] != want:
                raise ValueError("cascade block rows must equal K * n_streams")

    @property
    def n_users(self) -> int:
        return self.f_bb.n_users

    @property
    def n_subcarriers(self) -> int:
        return self.f_bb.n_subcarriers

    def effective_precoder(self, k: int, f: int) -> np.ndarray:
        """n_tx x n_streams transmit matrix for user k on subcarrier f."""
        return self.f_rf @ self.f_b.block(k, f)

    def effective_combiner(self, k: int, f: int) -> np.ndarray:
        """n_rx x n_streams receive matrix for user k on subcarrier f."""
        return self.w_rf[k] @ self.w_bb.block(k, f)

    def transmit_power(self) -> float:
        return float(np.linalg.norm(self.f_rf @ self.f_b.concat) ** 2)

    def check(self, power_budget: float) -> None:
        """Verify structure, amplitude and power invariants; raise ValueError."""
        problems = []
        if self.structure in (FULLY_CONNECTED, PARTIALLY_CONNECTED):
            peak = float(np.max(np.abs(self.f_rf))) if self.f_rf.size else 0.0
            if peak > AMPLITUDE_LIMIT + POWER_REL_TOL:
                problems.append(f"analog precoder modulus {peak} exceeds {AMPLITUDE_LIMIT}")
            peak_w = float(np.max(np.abs(self.w_rf))) if self.w_rf.size else 0.0
            if peak_w > AMPLITUDE_LIMIT + POWER_REL_TOL:
                problems.append(f"analog combiner modulus {peak_w} exceeds {AMPLITUDE_LIMIT}")
        if self.structure == PARTIALLY_CONNECTED:
            support = np.abs(self.f_rf) > 0
            if not np.all(support.sum(axis=1) == 1):
                problems.append("analog precoder rows must have exactly one non-zero")
            else:
                col = np.argmax(support, axis=1)
                for j, cluster in enumerate(self.mapping.clusters):
                    if sorted(int(i) for i in np.flatnonzero(col == j)) != sorted(cluster):
                        problems.append(f"row support of chain {j} disagrees with mapping")
                        break
        power = self.transmit_power()
        if self.power_normalized:
            if abs(power - power_budget) > POWER_REL_TOL * power_budget:
                problems.append(f"normalized power {power} != budget {power_budget}")
        elif power > power_budget * (1 + POWER_REL_TOL):
            problems.append(f"transmit power {power} exceeds budget {power_budget}")
        if problems:
            raise ValueError("; ".join(problems))
