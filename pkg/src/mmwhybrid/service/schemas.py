"""Pydantic request/response models for the simulation service."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..channel import ChannelParams
from ..config import SystemConfig
from ..errors import ConfigError
from ..scenarios import Scenario, get_preset
from ..simulate import GapRow, RateSample, SummaryRow


class SystemConfigModel(BaseModel):
    n_tx: int = Field(ge=1)
    n_rx: int = Field(ge=1)
    n_users: int = Field(ge=1)
    n_subcarriers: int = Field(ge=1)
    n_streams: int = Field(ge=1)
    n_rf_tx: int = Field(ge=1)
    n_rf_rx: int = Field(ge=1)
    noise_var: float = 1.0
    snr_grid_db: list[float] = [0.0]

    def to_config(self) -> SystemConfig:
        data = self.model_dump()
        data["snr_grid_db"] = tuple(data["snr_grid_db"])
        return SystemConfig(**data)

    @classmethod
    def from_config(cls, cfg: SystemConfig) -> "SystemConfigModel":
        return cls(
            n_tx=cfg.n_tx,
            n_rx=cfg.n_rx,
            n_users=cfg.n_users,
            n_subcarriers=cfg.n_subcarriers,
            n_streams=cfg.n_streams,
            n_rf_tx=cfg.n_rf_tx,
            n_rf_rx=cfg.n_rf_rx,
            noise_var=cfg.noise_var,
            snr_grid_db=list(cfg.snr_grid_db),
        )


class ChannelParamsModel(BaseModel):
    n_clusters: int = 3
    n_rays: int = 8
    cluster_power: float = 1.0
    angle_spread_deg: float = 10.0
    n_delay_taps: int = 16

    def to_params(self) -> ChannelParams:
        return ChannelParams(**self.model_dump())

    @classmethod
    def from_params(cls, params: ChannelParams) -> "ChannelParamsModel":
        return cls(
            n_clusters=params.n_clusters,
            n_rays=params.n_rays,
            cluster_power=params.cluster_power,
            angle_spread_deg=params.angle_spread_deg,
            n_delay_taps=params.n_delay_taps,
        )


class ScenarioRequest(BaseModel):
    """A preset name and/or a full config, plus field-level overrides."""

    preset: str | None = None
    config: SystemConfigModel | None = None
    channel: ChannelParamsModel | None = None
    algorithms: list[str] | None = None
    realizations: int | None = Field(default=None, ge=1)
    seed: int | None = Field(default=None, ge=0)
    snr_db: list[float] | None = None
    threads: int = Field(default=1, ge=1)

    def resolve(self) -> Scenario:
        if self.preset is not None:
            base = get_preset(self.preset)
        elif self.config is not None:
            base = Scenario(
                name="custom",
                cfg=self.config.to_config(),
                params=ChannelParamsModel().to_params(),
                algorithms=("fully-digital",),
                realizations=1,
                base_seed=0,
            )
        else:
            raise ConfigError("request needs a preset name or a full config")

        cfg = self.config.to_config() if self.config is not None else base.cfg
        if self.snr_db is not None:
            cfg = SystemConfig(
                **{
                    **SystemConfigModel.from_config(cfg).model_dump(),
                    "snr_grid_db": tuple(self.snr_db),
                }
            )
        params = self.channel.to_params() if self.channel is not None else base.params
        return Scenario(
            name=base.name,
            cfg=cfg,
            params=params,
            algorithms=tuple(self.algorithms) if self.algorithms else base.algorithms,
            realizations=self.realizations or base.realizations,
            base_seed=self.seed if self.seed is not None else base.base_seed,
        )


class RateSampleModel(BaseModel):
    realization: int
    snr_db: float
    algorithm: str
    sum_rate_bps_hz: float

    @classmethod
    def from_sample(cls, s: RateSample) -> "RateSampleModel":
        return cls(
            realization=s.realization,
            snr_db=s.snr_db,
            algorithm=s.algorithm,
            sum_rate_bps_hz=s.spectral_efficiency,
        )


class SummaryRowModel(BaseModel):
    scenario: str
    algorithm: str
    snr_db: float
    n: int
    mean_sum_rate_bps_hz: float
    ci95_half_width: float
    mean_rank: int
    kmeans_ge_greedy: bool | None
    greedy_ge_fixed: bool | None
    kmeans_ge_fixed: bool | None

    @classmethod
    def from_row(cls, row: SummaryRow) -> "SummaryRowModel":
        return cls(
            scenario=row.scenario,
            algorithm=row.algorithm,
            snr_db=row.snr_db,
            n=row.n,
            mean_sum_rate_bps_hz=row.mean,
            ci95_half_width=row.ci95_half_width,
            mean_rank=row.mean_rank,
            kmeans_ge_greedy=row.kmeans_ge_greedy,
            greedy_ge_fixed=row.greedy_ge_fixed,
            kmeans_ge_fixed=row.kmeans_ge_fixed,
        )


class SimulateResponse(BaseModel):
    scenario: str
    samples: list[RateSampleModel]
    summary: list[SummaryRowModel]


class GapRowModel(BaseModel):
    realization: int
    f_star_full: float
    f_star_partial: float
    delta: float
    delta_formula: float

    @classmethod
    def from_row(cls, row: GapRow) -> "GapRowModel":
        return cls(
            realization=row.realization,
            f_star_full=row.f_star_full,
            f_star_partial=row.f_star_partial,
            delta=row.delta,
            delta_formula=row.delta_formula,
        )


class GapReportResponse(BaseModel):
    scenario: str
    rows: list[GapRowModel]


class PresetModel(BaseModel):
    name: str
    config: SystemConfigModel
    channel: ChannelParamsModel
    algorithms: list[str]
    realizations: int
    base_seed: int

    @classmethod
    def from_scenario(cls, sc: Scenario) -> "PresetModel":
        return cls(
            name=sc.name,
            config=SystemConfigModel.from_config(sc.cfg),
            channel=ChannelParamsModel.from_params(sc.params),
            algorithms=list(sc.algorithms),
            realizations=sc.realizations,
            base_seed=sc.base_seed,
        )


class ErrorBody(BaseModel):
    code: str
    message: str
