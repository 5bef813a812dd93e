"""Data-driven load estimation and frequency control for multi-area grids."""

from ._ddfc import (
    ConfigError,
    Dataset,
    Error,
    InfeasibleError,
    IoError,
    PoisonedStateError,
    allocate,
    collect,
    data_driven_response,
    dc_gain_data,
    dc_gain_model,
    hankel,
    load_config,
    persistency_of_excitation,
    pinv,
    predictor_matrix,
    simulate,
    simulate_lti,
    version,
)

__version__ = version()
