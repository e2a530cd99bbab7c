"""Degrees of freedom and low/high-SNR rate approximations (bits per channel use)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .model import SystemConfig, validate_config
from .powalloc import asymptotic_allocation

LN2 = math.log(2.0)


@dataclass(frozen=True)
class DofPair:
    d_dynamic: float
    d_static: float


def dof(cfg: SystemConfig) -> DofPair:
    """``d_d = N_d (1 - N_d/T_d)`` and ``d_s = N_d N_s / T_d``."""
    cfg = validate_config(cfg)
    nd, ns, t = cfg.n_dynamic, cfg.n_static, cfg.t_coh_dynamic
    return DofPair(nd * (1 - nd / t), nd * ns / t)


def dof_exact(cfg: SystemConfig):
    cfg = validate_config(cfg)
    nd, ns, t = cfg.n_dynamic, cfg.n_static, cfg.t_coh_dynamic
    return Fraction(nd) * (1 - Fraction(nd, t)), Fraction(nd * ns, t)


def dof_region_sum(cfg: SystemConfig) -> Fraction:
    """``d_d/N_d + d_s/N_s`` in exact arithmetic; equals 1 on the coherent outer bound."""
    d_d, d_s = dof_exact(cfg)
    return d_d / cfg.n_dynamic + d_s / cfg.n_static


def low_snr_rates(cfg: SystemConfig, rho):
    """``(T_d rho^2 / 4, N_s rho / 2)`` converted from nats to bits."""
    cfg = validate_config(cfg)
    return cfg.t_coh_dynamic * rho**2 / 4 / LN2, cfg.n_static * rho / 2 / LN2


def high_snr_rates(cfg: SystemConfig, rho):
    """Leading ``d log2(SNR)`` terms at the high-SNR optimized allocation.

    The bounded ``E[sum log lambda^2]`` offsets are dropped, so only slopes
    are meaningful.
    """
    cfg = validate_config(cfg)
    nd, ns, t = cfg.n_dynamic, cfg.n_static, cfg.t_coh_dynamic
    rho_d, rho_s = asymptotic_allocation(cfg, rho, "high")
    r_dyn = (1 - nd / t) * nd * math.log2(rho_d / nd)
    r_stat = (nd / t) * ns * math.log2(rho_s / ns)
    return r_dyn, r_stat
