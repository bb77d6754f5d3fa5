"""Hybrid precoder design and Monte-Carlo simulation for multiuser OFDM mm-wave MIMO."""

from .bundles import KFMatrixBundle, PrecoderBundle
from .channel import (
    ChannelParams,
    ChannelRealization,
    array_response,
    generate_channel,
    load_channel,
    sample_path_angles,
    save_channel,
)
from .config import SystemConfig, noise_var_from_snr_db, validate_config
from .digital import FullyDigitalPrecoder, bd_precoder, digital_combiner
from .errors import ConfigError, InfeasibleScenarioError, MmwHybridError, NumericalError
from .fullyconnected import (
    LassoProblem,
    LassoSolution,
    LowRankApproximation,
    PhasePair,
    build_lasso,
    decompose_identity_block,
    factor_double_phase,
    hybrid_lowrank,
    rescale_feasible,
    rf_only_precoder,
    solve_lasso,
    sps_phase_extract,
)
from .partial import (
    KMeansMapping,
    MappingSets,
    SubproblemSolution,
    fixed_block_mapping,
    gap_delta,
    greedy_mapping,
    hybrid_partial,
    kmeans_mapping,
    mapping_objective,
    solve_subproblem,
)
from .pipeline import AlgorithmTag, build_precoders, digital_targets, parse_tag
from .rates import RateSample, interference_matrix, spectral_efficiency, sum_rate
from .scenarios import PRESETS, Scenario, get_preset, list_presets
from .simulate import gap_report, run_scenario, summarize

__version__ = "0.1.0"

__all__ = [
    "AlgorithmTag",
    "ChannelParams",
    "ChannelRealization",
    "ConfigError",
    "FullyDigitalPrecoder",
    "InfeasibleScenarioError",
    "KFMatrixBundle",
    "KMeansMapping",
    "LassoProblem",
    "LassoSolution",
    "LowRankApproximation",
    "MappingSets",
    "MmwHybridError",
    "NumericalError",
    "PhasePair",
    "PrecoderBundle",
    "PRESETS",
    "RateSample",
    "Scenario",
    "SubproblemSolution",
    "SystemConfig",
    "array_response",
    "bd_precoder",
    "build_lasso",
    "build_precoders",
    "decompose_identity_block",
    "digital_combiner",
    "digital_targets",
    "factor_double_phase",
    "fixed_block_mapping",
    "gap_delta",
    "gap_report",
    "generate_channel",
    "get_preset",
    "greedy_mapping",
    "hybrid_lowrank",
    "hybrid_partial",
    "interference_matrix",
    "kmeans_mapping",
    "list_presets",
    "load_channel",
    "mapping_objective",
    "noise_var_from_snr_db",
    "parse_tag",
    "rescale_feasible",
    "rf_only_precoder",
    "run_scenario",
    "sample_path_angles",
    "save_channel",
    "solve_lasso",
    "solve_subproblem",
    "spectral_efficiency",
    "sps_phase_extract",
    "sum_rate",
    "summarize",
    "validate_config",
]
