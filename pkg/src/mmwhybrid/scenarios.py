"""Named simulation scenarios: full-scale references and desk-scale variants.

The ``fig2``..``fig5`` presets cover the standard antenna/user geometries this
library targets (RF-only precoding, fully-connected hybrid precoding, an
RF-chain sweep, and the partially-connected structure). Each has a ``-desk``
variant shrunk to run in seconds-to-minutes on a workstation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .channel import ChannelParams
from .config import SystemConfig
from .errors import ConfigError


@dataclass(frozen=True)
class Scenario:
    """A named, fully specified Monte-Carlo experiment."""

    name: str
    cfg: SystemConfig
    params: ChannelParams
    algorithms: tuple[str, ...]
    realizations: int
    base_seed: int


_FULL_SNR = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
_DESK_SNR = (-10.0, 0.0, 5.0, 10.0, 20.0)
_PARAMS = ChannelParams()


def _scenario(name, cfg, algorithms, realizations, base_seed=1):
    return Scenario(
        name=name,
        cfg=cfg,
        params=_PARAMS,
        algorithms=tuple(algorithms),
        realizations=realizations,
        base_seed=base_seed,
    )


def _build_presets() -> dict[str, Scenario]:
    presets: dict[str, Scenario] = {}

    cfg_fig2 = SystemConfig(
        n_tx=64, n_rx=9, n_users=5, n_subcarriers=128, n_streams=2,
        n_rf_tx=10, n_rf_rx=2, snr_grid_db=_FULL_SNR,
    )
    presets["fig2"] = _scenario(
        "fig2", cfg_fig2, ("fully-digital", "rf-only"), realizations=1000
    )

    cfg_fig3 = SystemConfig(
        n_tx=256, n_rx=16, n_users=3, n_subcarriers=128, n_streams=3,
        n_rf_tx=9, n_rf_rx=3, snr_grid_db=_FULL_SNR,
    )
    presets["fig3"] = _scenario(
        "fig3",
        cfg_fig3,
        ("fully-digital", "dps-full", "dps-full+bd", "sps-heuristic", "sps-heuristic+bd"),
        realizations=1000,
    )

    sweep = tuple(f"dps-full+bd@nrf={n}" for n in (9, 11, 13, 15, 17))
    presets["fig4"] = _scenario(
        "fig4",
        replace(cfg_fig3, snr_grid_db=(5.0,)),
        ("fully-digital",) + sweep,
        realizations=1000,
    )

    cfg_fig5 = SystemConfig(
        n_tx=256, n_rx=16, n_users=4, n_subcarriers=128, n_streams=2,
        n_rf_tx=8, n_rf_rx=2, snr_grid_db=_FULL_SNR,
    )
    presets["fig5"] = _scenario(
        "fig5",
        cfg_fig5,
        (
            "fully-digital",
            "dps-full+bd",
            "partial-fixed+bd",
            "partial-greedy+bd",
            "partial-kmeans+bd",
        ),
        realizations=1000,
    )

    # desk-scale variants: 64 BS antennas, 8 per user, 16 subcarriers
    desk = dict(n_tx=64, n_rx=8, n_subcarriers=16, snr_grid_db=_DESK_SNR)
    presets["fig2-desk"] = _scenario(
        "fig2-desk",
        replace(cfg_fig2, **desk),
        ("fully-digital", "rf-only"),
        realizations=50,
    )
    presets["fig3-desk"] = _scenario(
        "fig3-desk",
        replace(cfg_fig3, **desk),
        ("fully-digital", "dps-full", "dps-full+bd", "sps-heuristic", "sps-heuristic+bd"),
        realizations=50,
    )
    presets["fig4-desk"] = _scenario(
        "fig4-desk",
        replace(cfg_fig3, **{**desk, "snr_grid_db": (5.0,)}),
        ("fully-digital",) + tuple(f"dps-full+bd@nrf={n}" for n in (9, 11, 13)),
        realizations=50,
    )
    presets["fig5-desk"] = _scenario(
        "fig5-desk",
        replace(cfg_fig5, **desk),
        (
            "fully-digital",
            "dps-full+bd",
            "partial-fixed+bd",
            "partial-greedy+bd",
            "partial-kmeans+bd",
        ),
        realizations=50,
    )
    # n_rf_tx=8 keeps 64 divisible for the fixed-mapping tag
    presets["desk-small"] = _scenario(
        "desk-small",
        SystemConfig(
            n_tx=64, n_rx=8, n_users=3, n_subcarriers=16, n_streams=2,
            n_rf_tx=8, n_rf_rx=2, snr_grid_db=_DESK_SNR,
        ),
        (
            "fully-digital",
            "dps-full",
            "dps-full+bd",
            "sps-heuristic+bd",
            "partial-fixed+bd",
            "partial-greedy+bd",
            "partial-kmeans+bd",
        ),
        realizations=50,
    )
    return presets


PRESETS = _build_presets()


def list_presets() -> tuple[str, ...]:
    return tuple(PRESETS)


def get_preset(name: str) -> Scenario:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; available: {', '.join(PRESETS)}"
        ) from None
