"""System-level configuration and dimensional feasibility validation."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InfeasibleScenarioError


@dataclass(frozen=True)
class SystemConfig:
    """Dimensions and noise level of one multiuser OFDM downlink.

    The transmitter multiplexes ``n_users * n_streams`` data streams per
    subcarrier through ``n_rf_tx`` RF chains; each user recovers ``n_streams``
    through ``n_rf_rx`` chains. Feasibility of that split is what
    :func:`validate_config` checks.
    """

    n_tx: int                 # BS antennas
    n_rx: int                 # antennas per user
    n_users: int              # number of users
    n_subcarriers: int        # OFDM subcarriers
    n_streams: int            # data streams per user per subcarrier
    n_rf_tx: int              # BS RF chains
    n_rf_rx: int              # RF chains per user
    noise_var: float = 1.0    # sigma_n^2, linear power
    snr_grid_db: tuple[float, ...] = (0.0,)

    @property
    def total_streams(self) -> int:
        """n_users * n_streams * n_subcarriers: columns of the combined precoder."""
        return self.n_users * self.n_streams * self.n_subcarriers

    @property
    def streams_per_carrier(self) -> int:
        return self.n_users * self.n_streams

    @property
    def power_budget(self) -> float:
        """Total transmit power; the symbol covariance is I / power_budget."""
        return float(self.total_streams)


def noise_var_from_snr_db(snr_db: float) -> float:
    """Noise variance for a given SNR in dB, with SNR defined as 1 / sigma_n^2."""
    return float(10.0 ** (-snr_db / 10.0))


def validate_config(cfg: SystemConfig, fixed_mapping: bool = False) -> SystemConfig:
    """Check every dimensional invariant and return the config unchanged.

    Raises :class:`InfeasibleScenarioError` listing each violated inequality.
    ``fixed_mapping=True`` additionally requires ``n_tx`` to be divisible by
    ``n_rf_tx`` so adjacent-antenna blocks of equal size exist.
    """
    violations = []
    counts = {
        "n_tx": cfg.n_tx,
        "n_rx": cfg.n_rx,
        "n_users": cfg.n_users,
        "n_subcarriers": cfg.n_subcarriers,
        "n_streams": cfg.n_streams,
        "n_rf_tx": cfg.n_rf_tx,
        "n_rf_rx": cfg.n_rf_rx,
    }
    for name, value in counts.items():
        if value < 1:
            violations.append(f"{name} must be >= 1 (got {value})")
    if cfg.noise_var <= 0:
        violations.append(f"noise_var must be > 0 (got {cfg.noise_var})")

    ks = cfg.n_users * cfg.n_streams
    if not ks <= cfg.n_rf_tx:
        violations.append(
            f"n_users*n_streams <= n_rf_tx violated ({ks} > {cfg.n_rf_tx})"
        )
    if not cfg.n_rf_tx < cfg.n_tx:
        violations.append(f"n_rf_tx < n_tx violated ({cfg.n_rf_tx} >= {cfg.n_tx})")
    if not cfg.n_streams <= cfg.n_rf_rx:
        violations.append(
            f"n_streams <= n_rf_rx violated ({cfg.n_streams} > {cfg.n_rf_rx})"
        )
    if not cfg.n_rf_rx < cfg.n_rx:
        violations.append(f"n_rf_rx < n_rx violated ({cfg.n_rf_rx} >= {cfg.n_rx})")
    if fixed_mapping and cfg.n_rf_tx >= 1 and cfg.n_tx % cfg.n_rf_tx != 0:
        violations.append(
            "fixed mapping requires n_tx divisible by n_rf_tx "
            f"({cfg.n_tx} mod {cfg.n_rf_tx} = {cfg.n_tx % cfg.n_rf_tx})"
        )

    if violations:
        raise InfeasibleScenarioError(violations)
    return cfg
