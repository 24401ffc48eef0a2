"""Run configuration: dataclass sections, loading and overrides."""

from .config import (
    DiscretizationConfig,
    InitialConfig,
    OutputConfig,
    PhysicsConfig,
    SimConfig,
    TimeConfig,
    apply_overrides,
    config_hash,
    load_config,
    write_config,
)

__all__ = [
    "PhysicsConfig",
    "DiscretizationConfig",
    "TimeConfig",
    "InitialConfig",
    "OutputConfig",
    "SimConfig",
    "load_config",
    "write_config",
    "apply_overrides",
    "config_hash",
]
