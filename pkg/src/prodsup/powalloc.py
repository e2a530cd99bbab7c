"""
Pilot/data power split that maximizes the dynamic user's effective SNR.

With the budget spent in full, ``c_tau = (T_d - N_d)(a - c_delta)`` and

    rho_d(c_delta) = K * c_delta (a - c_delta) / (b - c_delta),
    K = N_d M (T_d - N_d) / (T_d - 2 N_d),

which is unimodal on ``[0, a]`` with maximizer ``b - sqrt(b^2 - a b)``.
When ``T_d == 2 N_d`` the reduction breaks down (``b`` is infinite) and a
golden-section search is used instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateGeometryError
from .model import (
    BaselinePower,
    SystemConfig,
    max_data_coefficient,
    superposition_power_from_budget,
    validate_config,
)
from .rates import snr_dynamic_ps

GOLDEN_TOL = 1e-10
GOLDEN_MAX_ITER = 200
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class AllocationResult:
    c_delta_star: float
    c_tau_star: float
    snr_dynamic_star: float
    snr_static_star: float
    a: float
    b: float


def ab_constants(cfg: SystemConfig, rho):
    """Return ``(a, b)`` with ``a = rho T / (N_d M (T - N_d))``, ``b = (N_d + rho T) / (N_d M (T - 2 N_d))``."""
    cfg = validate_config(cfg)
    nd, m, t = cfg.n_dynamic, cfg.m_tx, cfg.t_coh_dynamic
    if t == 2 * nd:
        raise DegenerateGeometryError("T_d == 2 N_d: b is unbounded, use the numeric optimizer")
    a = max_data_coefficient(cfg, rho)
    b = (nd + rho * t) / (nd * m * (t - 2 * nd))
    return a, b


def dynamic_snr_along_budget(cfg: SystemConfig, rho, c_delta) -> float:
    """Dynamic effective SNR when ``c_delta`` is chosen and ``c_tau`` takes the rest."""
    power = superposition_power_from_budget(cfg, rho, c_delta)
    return snr_dynamic_ps(power.c_tau, power.c_delta, cfg.n_dynamic, cfg.m_tx).value


def golden_section_max(f, lo, hi, tol=GOLDEN_TOL, max_iter=GOLDEN_MAX_ITER):
    """Maximizer of a unimodal ``f`` on ``[lo, hi]``."""
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, abs(hi)):
            break
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = f(x1)
    return 0.5 * (lo + hi)


def numeric_allocation(cfg: SystemConfig, rho) -> AllocationResult:
    """Golden-section maximization of the dynamic SNR over ``c_delta in [0, a]``."""
    cfg = validate_config(cfg)
    a = max_data_coefficient(cfg, rho)
    try:
        _, b = ab_constants(cfg, rho)
    except DegenerateGeometryError:
        b = math.inf
    if a == 0:
        return _result(cfg, rho, 0.0, a, b)
    c = golden_section_max(lambda x: dynamic_snr_along_budget(cfg, rho, x), 0.0, a)
    return _result(cfg, rho, c, a, b)


def _result(cfg, rho, c_delta, a, b):
    power = superposition_power_from_budget(cfg, rho, min(c_delta, a))
    return AllocationResult(
        c_delta_star=power.c_delta,
        c_tau_star=power.c_tau,
        snr_dynamic_star=snr_dynamic_ps(power.c_tau, power.c_delta, cfg.n_dynamic, cfg.m_tx).value,
        snr_static_star=power.c_tau * cfg.n_static,
        a=a,
        b=b,
    )


def optimal_allocation(cfg: SystemConfig, rho) -> AllocationResult:
    """Closed-form optimum ``c_delta* = b - sqrt(b^2 - a b)``; numeric at ``T_d == 2 N_d``."""
    cfg = validate_config(cfg)
    if cfg.t_coh_dynamic == 2 * cfg.n_dynamic:
        return numeric_allocation(cfg, rho)
    a, b = ab_constants(cfg, rho)
    # b - sqrt(b^2 - ab) == a b / (b + sqrt(b^2 - ab)), which avoids cancellation
    c_delta = a * b / (b + math.sqrt(b * b - a * b))
    return _result(cfg, rho, c_delta, a, b)


def closed_form_snrs(cfg: SystemConfig, rho):
    """Optimized ``(rho_d*, rho_s*)`` straight from the closed-form expressions."""
    cfg = validate_config(cfg)
    nd, ns, m, t = cfg.n_dynamic, cfg.n_static, cfg.m_tx, cfg.t_coh_dynamic
    a, b = ab_constants(cfg, rho)
    root = math.sqrt(b * b - a * b)
    rho_d = nd * m * (t - nd) / (t - 2 * nd) * (2 * b - a - 2 * root)
    rho_s = ns * (rho * t / (nd * m) - (t - nd) * (b - root))
    return rho_d, rho_s


def optimal_baseline_allocation(cfg: SystemConfig, rho) -> BaselinePower:
    """TDMA training/data powers inherited through ``rho_tau = c_tau N_s``, ``rho_delta = c_delta N_d N_s``.

    Here the mapping uses ``M`` for ``N_s`` so that the baseline budget
    ``rho_tau N_d + rho_delta (T_d - N_d) = rho T_d`` is met exactly.
    """
    cfg = validate_config(cfg)
    alloc = optimal_allocation(cfg, rho)
    return BaselinePower(
        rho_tau=alloc.c_tau_star * cfg.m_tx,
        rho_delta=alloc.c_delta_star * cfg.n_dynamic * cfg.m_tx,
        rho=float(rho),
    )


def asymptotic_allocation(cfg: SystemConfig, rho, regime: str):
    """Low- or high-SNR approximations of ``(rho_d*, rho_s*)``.

    low:  ``rho^2 T^2 / (4 N_d (T - N_d))`` and ``N_s rho T / (2 N_d M)``
    high: ``rho T / (sqrt(T - N_d) + sqrt(N_d))^2`` and
          ``(N_s/M) rho T (sqrt(T/N_d - 1) - 1) / (T - 2 N_d)``
    """
    cfg = validate_config(cfg)
    nd, ns, m, t = cfg.n_dynamic, cfg.n_static, cfg.m_tx, cfg.t_coh_dynamic
    if regime == "low":
        return rho**2 * t**2 / (4 * nd * (t - nd)), ns * rho * t / (2 * nd * m)
    if regime == "high":
        if t == 2 * nd:
            raise DegenerateGeometryError("T_d == 2 N_d: high-SNR closed forms are undefined")
        rho_d = rho * t / (math.sqrt(t - nd) + math.sqrt(nd)) ** 2
        rho_s = (ns / m) * rho * t * (math.sqrt(t / nd - 1) - 1) / (t - 2 * nd)
        return rho_d, rho_s
    raise ValueError(f"regime must be 'low' or 'high', got {regime!r}")
