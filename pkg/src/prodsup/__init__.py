"""Pilot-based product superposition for a two-user MIMO broadcast channel.

Closed-form effective SNRs and power allocation, Monte Carlo achievable
rates for product superposition and a TDMA baseline, and degrees-of-freedom
helpers.
"""

from .errors import ConfigError, DegenerateGeometryError, DegeneratePilotError, NumericFailure
from .model import (
    BaselinePower,
    RateEstimate,
    RateRegionPoint,
    SuperpositionPower,
    SystemConfig,
    make_config,
    superposition_power_from_budget,
    validate_config,
)
from .montecarlo import McSettings

__all__ = [
    "BaselinePower",
    "ConfigError",
    "DegenerateGeometryError",
    "DegeneratePilotError",
    "McSettings",
    "NumericFailure",
    "RateEstimate",
    "RateRegionPoint",
    "SuperpositionPower",
    "SystemConfig",
    "make_config",
    "superposition_power_from_budget",
    "validate_config",
]
