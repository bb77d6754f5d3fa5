"""Frequency-selective clustered mm-wave MIMO channel generation.

Channels follow the clustered multipath (Saleh-Valenzuela) model: a few
scattering clusters, each contributing several rays whose angles spread around
the cluster mean with a Laplacian profile. Frequency selectivity comes from a
cyclic-prefix delay-tap line: every cluster lands on one uniformly random tap
and the per-subcarrier response is the DFT of the tap matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig


@dataclass(frozen=True)
class ChannelParams:
    """Multipath geometry of the clustered channel model."""

    n_clusters: int = 3           # scattering clusters per user
    n_rays: int = 8               # rays per cluster
    cluster_power: float = 1.0    # average per-ray gain power sigma_alpha^2
    angle_spread_deg: float = 10.0  # Laplacian angular spread (std dev, degrees)
    n_delay_taps: int = 16        # cyclic-prefix delay taps

    def __post_init__(self):
        if self.n_clusters < 1 or self.n_rays < 1:
            raise ValueError("n_clusters and n_rays must be >= 1")
        # spread 0 is the degenerate all-rays-at-the-mean limit, kept for tests
        if self.angle_spread_deg < 0:
            raise ValueError("angle_spread_deg must be >= 0")
        if self.cluster_power <= 0:
            raise ValueError("cluster_power must be > 0")
        if self.n_delay_taps < 1:
            raise ValueError("n_delay_taps must be >= 1")

    @property
    def laplacian_scale(self) -> float:
        """Laplacian scale b in radians; the angular spread is its std dev sqrt(2)*b."""
        return math.radians(self.angle_spread_deg) / math.sqrt(2.0)


@dataclass(eq=False)
class RayPaths:
    """Sampled per-ray geometry for one user; arrays are (n_clusters, n_rays)."""

    az_aod: np.ndarray
    el_aod: np.ndarray
    az_aoa: np.ndarray
    el_aoa: np.ndarray
    gains: np.ndarray


@dataclass(eq=False)
class ChannelRealization:
    """Per-user per-subcarrier channel matrices plus the RNG coordinates used.

    ``h`` has shape (n_users, n_subcarriers, n_rx, n_tx). ``taps`` keeps the
    delay-tap matrices (n_users, n_delay_taps, n_rx, n_tx) when generated
    locally; it is dropped by the dump/load fixture format.
    """

    h: np.ndarray
    seed: int
    realization: int
    taps: np.ndarray | None = None

    @property
    def n_users(self) -> int:
        return self.h.shape[0]

    @property
    def n_subcarriers(self) -> int:
        return self.h.shape[1]


def _grid_dims(n: int) -> tuple[int, int]:
    """Closest-to-square factorization rows x cols = n with rows <= cols."""
    r = math.isqrt(n)
    while n % r != 0:
        r -= 1
    return r, n // r


def planar_response(rows: int, cols: int, azimuth: float, elevation: float) -> np.ndarray:
    """Unit-norm steering vector of a rows x cols planar array, half-wavelength spaced.

    Element (m, n) of the grid has phase pi*(m*sin(az)*sin(el) + n*cos(el));
    the vector is flattened row-major and scaled by 1/sqrt(rows*cols).
    """
    m = np.arange(rows)[:, None]
    n = np.arange(cols)[None, :]
    phase = np.pi * (m * math.sin(azimuth) * math.sin(elevation) + n * math.cos(elevation))
    return np.exp(1j * phase).ravel() / math.sqrt(rows * cols)


def array_response(array_size: int, azimuth: float, elevation: float) -> np.ndarray:
    """Steering vector of a square planar array with ``array_size`` elements.

    Raises ValueError when ``array_size`` is not a perfect square.
    """
    side = math.isqrt(array_size)
    if side * side != array_size:
        raise ValueError(f"array size {array_size} is not a perfect square")
    return planar_response(side, side, azimuth, elevation)


def sample_path_angles(rng: np.random.Generator, params: ChannelParams) -> RayPaths:
    """Draw per-ray departure/arrival angles and complex gains for one user.

    Cluster mean azimuths are uniform on [0, 2*pi), mean elevations uniform on
    [0, pi); ray offsets are Laplacian with the configured spread and gains are
    circular complex Gaussian with variance ``cluster_power``.
    """
    nc, nr = params.n_clusters, params.n_rays
    b = params.laplacian_scale
    mean_az_aod = rng.uniform(0.0, 2.0 * np.pi, size=nc)
    mean_el_aod = rng.uniform(0.0, np.pi, size=nc)
    mean_az_aoa = rng.uniform(0.0, 2.0 * np.pi, size=nc)
    mean_el_aoa = rng.uniform(0.0, np.pi, size=nc)
    offsets = rng.laplace(0.0, b, size=(4, nc, nr)) if b > 0 else np.zeros((4, nc, nr))
    gains = math.sqrt(params.cluster_power / 2.0) * (
        rng.standard_normal((nc, nr)) + 1j * rng.standard_normal((nc, nr))
    )
    return RayPaths(
        az_aod=mean_az_aod[:, None] + offsets[0],
        el_aod=mean_el_aod[:, None] + offsets[1],
        az_aoa=mean_az_aoa[:, None] + offsets[2],
        el_aoa=mean_el_aoa[:, None] + offsets[3],
        gains=gains,
    )


def _user_stream(seed: int, realization: int, user: int) -> np.random.Generator:
    """Counter-based substream, independent per (realization, user)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(realization, user))
    return np.random.Generator(np.random.Philox(ss))


def generate_channel(
    cfg: SystemConfig,
    params: ChannelParams,
    seed: int,
    realization: int = 0,
) -> ChannelRealization:
    """Generate all per-user per-subcarrier channel matrices for one realization.

    Each cluster is assigned one uniformly random delay tap d; the subcarrier-f
    response is H_f = sum_d H_d * exp(-2j*pi*f*d/F). The normalization
    sqrt(n_tx*n_rx/(n_clusters*n_rays)) makes E[||H_f||_F^2] = n_tx*n_rx.
    The result is a deterministic function of (cfg, params, seed, realization).
    """
    nt, nr_ant = cfg.n_tx, cfg.n_rx
    nf = cfg.n_subcarriers
    tx_rows, tx_cols = _grid_dims(nt)
    rx_rows, rx_cols = _grid_dims(nr_ant)
    n_paths = params.n_clusters * params.n_rays
    gamma = math.sqrt(nt * nr_ant / n_paths)

    h = np.zeros((cfg.n_users, nf, nr_ant, nt), dtype=complex)
    taps = np.zeros((cfg.n_users, params.n_delay_taps, nr_ant, nt), dtype=complex)
    for k in range(cfg.n_users):
        rng = _user_stream(seed, realization, k)
        paths = sample_path_angles(rng, params)
        cluster_taps = rng.integers(0, params.n_delay_taps, size=params.n_clusters)

        a_tx = np.empty((nt, n_paths), dtype=complex)
        a_rx = np.empty((nr_ant, n_paths), dtype=complex)
        alphas = paths.gains.ravel()
        path_taps = np.repeat(cluster_taps, params.n_rays)
        p = 0
        for c in range(params.n_clusters):
            for r in range(params.n_rays):
                a_tx[:, p] = planar_response(
                    tx_rows, tx_cols, paths.az_aod[c, r], paths.el_aod[c, r]
                )
                a_rx[:, p] = planar_response(
                    rx_rows, rx_cols, paths.az_aoa[c, r], paths.el_aoa[c, r]
                )
                p += 1

        weighted_rx = a_rx * alphas[None, :]
        for d in range(params.n_delay_taps):
            sel = path_taps == d
            if np.any(sel):
                taps[k, d] = gamma * (weighted_rx[:, sel] @ a_tx[:, sel].conj().T)
        f_idx = np.arange(nf)
        phases = np.exp(-2j * np.pi * np.outer(f_idx, path_taps) / nf)
        for f in range(nf):
            h[k, f] = gamma * ((weighted_rx * phases[f][None, :]) @ a_tx.conj().T)

    return ChannelRealization(h=h, seed=seed, realization=realization, taps=taps)


_DUMP_MAGIC = "mmwchan 1"


def save_channel(chan: ChannelRealization, path) -> None:
    """Dump a realization as text: shape header plus row-major re/im pairs."""
    k, f, nr_ant, nt = chan.h.shape
    with open(path, "w") as fh:
        fh.write(f"{_DUMP_MAGIC}\n")
        fh.write(f"{k} {f} {nr_ant} {nt} {chan.seed} {chan.realization}\n")
        flat = chan.h.ravel()
        for z in flat:
            fh.write(f"{z.real:.17g} {z.imag:.17g}\n")


def load_channel(path) -> ChannelRealization:
    """Load a realization written by :func:`save_channel` (taps are not stored)."""
    with open(path) as fh:
        magic = fh.readline().strip()
        if magic != _DUMP_MAGIC:
            raise ValueError(f"unrecognized channel dump header: {magic!r}")
        k, f, nr_ant, nt, seed, realization = (int(t) for t in fh.readline().split())
        count = k * f * nr_ant * nt
        data = np.empty(count, dtype=complex)
        for i in range(count):
            re, im = fh.readline().split()
            data[i] = complex(float(re), float(im))
    return ChannelRealization(
        h=data.reshape(k, f, nr_ant, nt), seed=seed, realization=realization, taps=None
    )
