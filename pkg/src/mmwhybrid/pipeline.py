"""End-to-end precoder/combiner construction for each algorithm tag.

Tags name a complete construction recipe: which transmitter structure
approximates the zero-forcing target, whether the interference-cancellation
cascade runs, and an optional RF-chain override. Users always keep the dense
amplitude-2 combiner structure; only the transmitter side varies.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .bundles import (
    FULLY_CONNECTED,
    FULLY_DIGITAL,
    PARTIALLY_CONNECTED,
    KFMatrixBundle,
    PrecoderBundle,
)
from .cascade import bd_cascade, cascade_digital, effective_channels, normalize_power
from .channel import ChannelRealization
from .config import SystemConfig
from .digital import FullyDigitalPrecoder, bd_precoder, digital_combiner
from .errors import ConfigError, MmwHybridError
from .fullyconnected import (
    hybrid_lowrank,
    rescale_feasible,
    rf_only_precoder,
    sps_phase_extract,
)
from .partial import (
    MappingSets,
    fixed_block_mapping,
    greedy_mapping,
    hybrid_partial,
    kmeans_mapping,
)

_FAMILIES = ("fully-digital", "rf-only", "dps-full", "sps-heuristic", "partial")
_MAPPINGS = ("fixed", "greedy", "kmeans")


@dataclass(frozen=True)
class AlgorithmTag:
    """Parsed construction recipe; ``name`` is the canonical tag string."""

    name: str
    family: str
    mapping: str | None
    cascade: bool
    n_rf_tx: int | None

    @property
    def uses_fixed_mapping(self) -> bool:
        return self.family == "partial" and self.mapping == "fixed"


def parse_tag(text: str) -> AlgorithmTag:
    """Parse tag strings like ``dps-full+bd`` or ``dps-full+bd@nrf=12``.

    Grammar: BASE[+bd][@nrf=N] with BASE one of fully-digital, rf-only,
    dps-full, sps-heuristic, partial-fixed, partial-greedy, partial-kmeans.
    """
    body = text.strip()
    n_rf = None
    if "@" in body:
        body, _, opt = body.partition("@")
        if not opt.startswith("nrf="):
            raise ConfigError(f"unknown tag option {opt!r} in {text!r}")
        try:
            n_rf = int(opt[4:])
        except ValueError as exc:
            raise ConfigError(f"bad RF-chain override in {text!r}") from exc
    cascade = body.endswith("+bd")
    if cascade:
        body = body[: -len("+bd")]
    mapping = None
    if body.startswith("partial-"):
        family, mapping = "partial", body[len("partial-"):]
        if mapping not in _MAPPINGS:
            raise ConfigError(f"unknown mapping strategy {mapping!r} in {text!r}")
    elif body in _FAMILIES:
        family = body
    else:
        raise ConfigError(f"unknown algorithm tag {text!r}")
    if family in ("fully-digital", "rf-only") and cascade:
        raise ConfigError(f"tag {text!r}: +bd does not apply to {family}")

    canonical = family if mapping is None else f"{family}-{mapping}"
    if cascade:
        canonical += "+bd"
    if n_rf is not None:
        canonical += f"@nrf={n_rf}"
    return AlgorithmTag(
        name=canonical, family=family, mapping=mapping, cascade=cascade, n_rf_tx=n_rf
    )


@dataclass(eq=False)
class DigitalTargets:
    """Zero-forcing precoder and combiner targets, shared across tags."""

    f_opt: FullyDigitalPrecoder
    w_opt: KFMatrixBundle


def digital_targets(chan: ChannelRealization, cfg: SystemConfig) -> DigitalTargets:
    f_opt = bd_precoder(chan, cfg)
    return DigitalTargets(f_opt=f_opt, w_opt=digital_combiner(chan, f_opt))


def _receiver_hybrid(
    w_opt: KFMatrixBundle, cfg: SystemConfig
) -> tuple[np.ndarray, KFMatrixBundle]:
    """Per-user low-rank approximation of the concatenated combiner targets."""
    kk, ff = w_opt.n_users, w_opt.n_subcarriers
    n_rx, ns = w_opt.block_shape
    w_rf = np.zeros((kk, n_rx, cfg.n_rf_rx), dtype=complex)
    w_bb = np.zeros((kk, ff, cfg.n_rf_rx, ns), dtype=complex)
    for k in range(kk):
        target = np.concatenate([w_opt.block(k, f) for f in range(ff)], axis=1)
        lr = hybrid_lowrank(target, cfg.n_rf_rx)
        rf, bb = rescale_feasible(lr.u1, lr.f_bb)
        w_rf[k] = rf
        for f in range(ff):
            w_bb[k, f] = bb[:, f * ns : (f + 1) * ns]
    return w_rf, KFMatrixBundle(w_bb)


def _shared_semi_orthogonal_fbb(f_opt_mat: np.ndarray, n_rf: int) -> np.ndarray:
    """Row-orthonormal digital factor from the target's leading right factor."""
    _, _, vh = np.linalg.svd(f_opt_mat, full_matrices=False)
    return vh[:n_rf]


def build_precoders(
    tag: AlgorithmTag,
    chan: ChannelRealization,
    cfg: SystemConfig,
    targets: DigitalTargets | None = None,
) -> PrecoderBundle:
    """Construct the complete precoding bundle for one algorithm tag.

    Stages: zero-forcing targets, transmitter hybrid approximation per the
    tag's family, per-user receiver approximation, then the optional cascade
    plus exact power normalization. Failures are annotated with the stage.
    """
    if targets is None:
        targets = digital_targets(chan, cfg)
    if tag.n_rf_tx is not None:
        cfg = replace(cfg, n_rf_tx=tag.n_rf_tx)
    kk, ff, ns = cfg.n_users, cfg.n_subcarriers, cfg.n_streams
    budget = cfg.power_budget
    f_opt_mat = targets.f_opt.concat

    if tag.family == "fully-digital":
        eye_rx = np.broadcast_to(
            np.eye(cfg.n_rx, dtype=complex), (kk, cfg.n_rx, cfg.n_rx)
        ).copy()
        bundle = PrecoderBundle(
            f_rf=np.eye(cfg.n_tx, dtype=complex),
            f_bb=targets.f_opt.blocks,
            f_b=targets.f_opt.blocks,
            w_rf=eye_rx,
            w_bb=targets.w_opt,
            structure=FULLY_DIGITAL,
            power_normalized=True,
        )
        bundle.check(budget)
        return bundle

    mapping: MappingSets | None = None
    try:
        if tag.family == "rf-only":
            f_bb_mat = _shared_semi_orthogonal_fbb(f_opt_mat, cfg.n_rf_tx)
            f_rf = rf_only_precoder(f_opt_mat, f_bb_mat)
            # analog-only fit ignores the power budget; scale down if exceeded
            power = float(np.linalg.norm(f_rf @ f_bb_mat) ** 2)
            if power > budget:
                f_rf = f_rf * np.sqrt(budget / power)
            structure = FULLY_CONNECTED
        elif tag.family == "dps-full":
            lr = hybrid_lowrank(f_opt_mat, cfg.n_rf_tx)
            f_rf, f_bb_mat = rescale_feasible(lr.u1, lr.f_bb)
            structure = FULLY_CONNECTED
        elif tag.family == "sps-heuristic":
            lr = hybrid_lowrank(f_opt_mat, cfg.n_rf_tx)
            f_rf, f_bb_mat = sps_phase_extract(lr)
            # unit-modulus extraction changes the product power; renormalize
            f_bb_mat = f_bb_mat * (
                np.sqrt(budget) / np.linalg.norm(f_rf @ f_bb_mat)
            )
            structure = FULLY_CONNECTED
        else:  # partial
            if tag.mapping == "fixed":
                mapping = fixed_block_mapping(cfg.n_tx, cfg.n_rf_tx)
            elif tag.mapping == "greedy":
                mapping = greedy_mapping(f_opt_mat, cfg.n_rf_tx)
            else:
                mapping = kmeans_mapping(f_opt_mat, cfg.n_rf_tx).mapping
            ph = hybrid_partial(f_opt_mat, mapping)
            f_rf, f_bb_mat = rescale_feasible(ph.f_rf, ph.f_bb)
            structure = PARTIALLY_CONNECTED
    except MmwHybridError as exc:
        raise type(exc)(f"[transmitter stage, tag {tag.name}] {exc}") from exc

    f_bb = KFMatrixBundle.from_concat(f_bb_mat, kk, ff)
    try:
        w_rf, w_bb = _receiver_hybrid(targets.w_opt, cfg)
    except MmwHybridError as exc:
        raise type(exc)(f"[receiver stage, tag {tag.name}] {exc}") from exc

    f_bd = None
    f_b = f_bb
    power_normalized = tag.family == "sps-heuristic"
    if tag.cascade:
        draft = PrecoderBundle(
            f_rf=f_rf,
            f_bb=f_bb,
            f_b=f_bb,
            w_rf=w_rf,
            w_bb=w_bb,
            structure=structure,
            mapping=mapping,
        )
        try:
            eff = effective_channels(chan, draft)
            f_bd = bd_cascade(eff)
            f_b = normalize_power(f_rf, cascade_digital(f_bb, f_bd), budget)
        except MmwHybridError as exc:
            raise type(exc)(f"[cascade stage, tag {tag.name}] {exc}") from exc
        power_normalized = True

    bundle = PrecoderBundle(
        f_rf=f_rf,
        f_bb=f_bb,
        f_b=f_b,
        w_rf=w_rf,
        w_bb=w_bb,
        structure=structure,
        f_bd=f_bd,
        mapping=mapping,
        power_normalized=power_normalized,
    )
    bundle.check(budget)
    return bundle
