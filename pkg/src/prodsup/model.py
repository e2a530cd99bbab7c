"""
Domain types, configuration validation and power-budget accounting.

Notation follows the usual two-user setup: the dynamic user has ``n_dynamic``
receive antennas and coherence time ``t_coh_dynamic`` symbols; the static
user has ``n_static`` antennas and knows its channel. The transmitter uses
``m_tx = max(n_dynamic, n_static)`` antennas.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigError

#: Relative tolerance used when checking that a power split respects its budget.
BUDGET_RTOL = 1e-10


@dataclass(frozen=True)
class SystemConfig:
    n_dynamic: int
    n_static: int
    t_coh_dynamic: int
    t_coh_static: Optional[int] = None
    m_tx: Optional[int] = None

    @property
    def data_slots(self) -> int:
        """Symbols per block left for data after the ``n_dynamic`` pilot slots."""
        return self.t_coh_dynamic - self.n_dynamic


def _check_positive_int(name, value):
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError("nonpositive-dimension", f"{name} must be a positive integer, got {value!r}")


def validate_config(cfg: SystemConfig) -> SystemConfig:
    """Check ``cfg`` and return a copy with ``m_tx`` derived.

    Raises
    ------
    ConfigError
        Tagged with the violated constraint.
    """
    _check_positive_int("n_dynamic", cfg.n_dynamic)
    _check_positive_int("n_static", cfg.n_static)
    _check_positive_int("t_coh_dynamic", cfg.t_coh_dynamic)
    if cfg.t_coh_dynamic < 2 * cfg.n_dynamic:
        raise ConfigError(
            "coherence-too-short",
            f"t_coh_dynamic={cfg.t_coh_dynamic} < 2*n_dynamic={2 * cfg.n_dynamic}",
        )
    if cfg.t_coh_static is not None:
        _check_positive_int("t_coh_static", cfg.t_coh_static)
        if cfg.t_coh_static < cfg.t_coh_dynamic:
            raise ConfigError(
                "static-coherence-shorter",
                f"t_coh_static={cfg.t_coh_static} < t_coh_dynamic={cfg.t_coh_dynamic}",
            )
    m_tx = max(cfg.n_dynamic, cfg.n_static)
    if cfg.m_tx is not None and cfg.m_tx != m_tx:
        raise ConfigError("m-tx-mismatch", f"m_tx must equal max(n_dynamic, n_static)={m_tx}, got {cfg.m_tx}")
    return dataclasses.replace(cfg, m_tx=m_tx)


def make_config(n_dynamic, n_static, t_coh_dynamic, t_coh_static=None) -> SystemConfig:
    """Shorthand for ``validate_config(SystemConfig(...))``."""
    return validate_config(SystemConfig(n_dynamic, n_static, t_coh_dynamic, t_coh_static))


@dataclass(frozen=True)
class SuperpositionPower:
    c_tau: float
    c_delta: float
    rho: float


@dataclass(frozen=True)
class BaselinePower:
    rho_tau: float
    rho_delta: float
    rho: float


def superposition_energy(cfg: SystemConfig, c_tau, c_delta):
    """Expected transmit energy per block, ``M N_d (c_tau + (T_d - N_d) c_delta)``."""
    cfg = validate_config(cfg)
    return cfg.m_tx * cfg.n_dynamic * (c_tau + cfg.data_slots * c_delta)


def baseline_energy(cfg: SystemConfig, rho_tau, rho_delta):
    cfg = validate_config(cfg)
    return rho_tau * cfg.n_dynamic + rho_delta * cfg.data_slots


def _within_budget(used, budget):
    return used <= budget + BUDGET_RTOL * max(abs(budget), 1.0)


def check_superposition_power(cfg: SystemConfig, power: SuperpositionPower) -> SuperpositionPower:
    if min(power.c_tau, power.c_delta, power.rho) < 0:
        raise ConfigError("negative-power", f"power coefficients must be nonnegative: {power}")
    budget = power.rho * cfg.t_coh_dynamic
    if not _within_budget(superposition_energy(cfg, power.c_tau, power.c_delta), budget):
        raise ConfigError("power-budget-exceeded", f"{power} exceeds rho*T_d={budget}")
    return power


def check_baseline_power(cfg: SystemConfig, power: BaselinePower) -> BaselinePower:
    if min(power.rho_tau, power.rho_delta, power.rho) < 0:
        raise ConfigError("negative-power", f"power coefficients must be nonnegative: {power}")
    budget = power.rho * cfg.t_coh_dynamic
    if not _within_budget(baseline_energy(cfg, power.rho_tau, power.rho_delta), budget):
        raise ConfigError("power-budget-exceeded", f"{power} exceeds rho*T_d={budget}")
    return power


def max_data_coefficient(cfg: SystemConfig, rho) -> float:
    """Largest feasible ``c_delta`` (all budget on data, zero pilot power)."""
    cfg = validate_config(cfg)
    return rho * cfg.t_coh_dynamic / (cfg.n_dynamic * cfg.m_tx * cfg.data_slots)


def superposition_power_from_budget(cfg: SystemConfig, rho, c_delta) -> SuperpositionPower:
    """Pilot coefficient that spends the rest of the budget once ``c_delta`` is fixed.

    ``c_tau = rho T_d / (N_d M) - c_delta (T_d - N_d)``.
    """
    cfg = validate_config(cfg)
    if rho < 0:
        raise ConfigError("negative-power", f"rho must be nonnegative, got {rho}")
    a = max_data_coefficient(cfg, rho)
    if c_delta < 0 or c_delta > a * (1 + BUDGET_RTOL) + 1e-300:
        raise ConfigError("c-delta-infeasible", f"c_delta={c_delta} outside [0, {a}]")
    c_tau = rho * cfg.t_coh_dynamic / (cfg.n_dynamic * cfg.m_tx) - c_delta * cfg.data_slots
    # c_delta == a can leave a rounding-level negative remainder
    if c_tau < 0:
        c_tau = 0.0
    return SuperpositionPower(c_tau=float(c_tau), c_delta=float(c_delta), rho=float(rho))


class EstimateKind(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class RateEstimate:
    """A rate in bits per channel use with its Monte Carlo uncertainty."""

    mean: float
    std_error: float
    n_samples: int
    kind: EstimateKind = EstimateKind.MONTE_CARLO
    log_base: float = 2.0

    def __post_init__(self):
        if self.kind is EstimateKind.CLOSED_FORM and self.std_error != 0:
            raise ValueError("closed-form estimates carry no standard error")
        if not (self.mean >= 0) or not math.isfinite(self.mean):
            raise ValueError(f"rate mean must be finite and nonnegative, got {self.mean}")
        if self.n_samples < 1:
            raise ValueError("n_samples must be positive")

    @classmethod
    def exact(cls, value=0.0):
        return cls(float(value), 0.0, 1, EstimateKind.CLOSED_FORM)

    def scaled(self, factor) -> "RateEstimate":
        return dataclasses.replace(self, mean=self.mean * factor, std_error=self.std_error * factor)


@dataclass(frozen=True)
class RateRegionPoint:
    r_dynamic: float
    r_static: float
    share_p: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        if self.r_dynamic < 0 or self.r_static < 0:
            raise ValueError("region points must have nonnegative rates")
        if self.share_p is not None and not 0.0 <= self.share_p <= 1.0:
            raise ValueError(f"share_p must lie in [0, 1], got {self.share_p}")
