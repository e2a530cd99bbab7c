"""
Achievable-rate evaluators for the TDMA baseline and product superposition.

Every expectation over channel realizations is a Monte Carlo average computed
by :mod:`prodsup.montecarlo`. The dynamic user's rates simulate the whole
pilot phase (observation, MMSE estimate, normalization) per sample instead of
assuming a Gaussian normalized estimate. Rates are in bits per channel use.

All evaluators draw from the same per-sample channel layout
(:func:`prodsup.randmat.sample_channels`), so evaluators run with one seed
share channel draws; differences between schemes are then paired.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import montecarlo
from .errors import ConfigError, DegeneratePilotError
from .estimator import mmse_estimate, pilot_observation
from .model import (
    BaselinePower,
    EstimateKind,
    RateEstimate,
    RateRegionPoint,
    SuperpositionPower,
    SystemConfig,
    check_baseline_power,
    check_superposition_power,
    validate_config,
)
from .montecarlo import McResult, McSettings
from .randmat import sample_channels, unitary_pilot

LN2 = math.log(2.0)


class User(str, enum.Enum):
    DYNAMIC = "dynamic"
    STATIC = "static"


class Scheme(str, enum.Enum):
    BASELINE = "baseline"
    PRODSUP = "prodsup"
    PRODSUP_IC = "prodsup_ic"


@dataclass(frozen=True)
class EffectiveSnr:
    value: float
    user: User
    scheme: Scheme

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError(f"effective SNR must be nonnegative, got {self.value}")


def snr_dynamic_ps(c_tau, c_delta, n_dynamic, n_tx) -> EffectiveSnr:
    """Dynamic user's effective SNR under product superposition.

    ``c_tau c_delta N_d n^2 / (1 + c_tau n + c_delta N_d n)`` where ``n`` is
    the transmit-antenna count (``N_s`` in the usual ``M = N_s`` setting).
    """
    num = c_tau * c_delta * n_dynamic * n_tx**2
    den = 1.0 + c_tau * n_tx + c_delta * n_dynamic * n_tx
    return EffectiveSnr(num / den, User.DYNAMIC, Scheme.PRODSUP)


def snr_static_ps(c_tau, n_static) -> EffectiveSnr:
    return EffectiveSnr(c_tau * n_static, User.STATIC, Scheme.PRODSUP)


def snr_baseline(rho_tau, rho_delta) -> EffectiveSnr:
    """Training-based effective SNR ``rho_delta rho_tau / (1 + rho_delta + rho_tau)``."""
    return EffectiveSnr(rho_delta * rho_tau / (1.0 + rho_delta + rho_tau), User.DYNAMIC, Scheme.BASELINE)


def logdet2_gram(a, scale):
    """``log2 det(I + scale * A A^H)`` over a batch, via the smaller Gram matrix."""
    a = np.asarray(a)
    ah = np.conj(np.swapaxes(a, -1, -2))
    gram = ah @ a if a.shape[-2] > a.shape[-1] else a @ ah
    eye = np.eye(gram.shape[-1])
    _, logdet = np.linalg.slogdet(eye + scale * gram)
    return logdet / LN2


def _as_rate(result: McResult, prefactor) -> RateEstimate:
    # negative means are impossible for log det(I + PSD); clip rounding at zero
    mean = max(result.mean, 0.0) * prefactor
    return RateEstimate(mean, result.std_error * prefactor, result.n, EstimateKind.MONTE_CARLO)


def _mc(mc):
    return mc if mc is not None else McSettings(root_seed=montecarlo.default_seed())


def dynamic_estimate_ps(cfg: SystemConfig, c_tau, samples):
    """Normalized MMSE estimate of ``H_d X_s / sqrt(M)`` for a batch of samples."""
    m = cfg.m_tx
    pilot = unitary_pilot(cfg.n_dynamic)
    h_eq = samples.h_dynamic @ samples.x_s / math.sqrt(m)
    y = pilot_observation(h_eq, pilot, samples.w_train, c_tau, m)
    return mmse_estimate(y, pilot, c_tau, m)


def static_estimate_ps(cfg: SystemConfig, c_tau, samples):
    """Normalized MMSE estimate of ``H_s X_s / sqrt(M)`` at the static user."""
    m = cfg.m_tx
    pilot = unitary_pilot(cfg.n_dynamic)
    h_eq = samples.h_static @ samples.x_s / math.sqrt(m)
    y = pilot_observation(h_eq, pilot, samples.w_train_static, c_tau, m)
    return mmse_estimate(y, pilot, c_tau, m)


def rate_dynamic_ps(cfg: SystemConfig, power: SuperpositionPower, mc: McSettings = None) -> RateEstimate:
    """Dynamic user's rate, ``(1 - N_d/T_d) E[log det(I + rho_d/N_d Hbar Hbar^H)]``."""
    cfg = validate_config(cfg)
    check_superposition_power(cfg, power)
    mc = _mc(mc)
    if power.c_delta == 0:
        return RateEstimate.exact(0.0)
    if power.c_tau == 0:
        raise DegeneratePilotError("c_tau = 0 with c_delta > 0: the dynamic user cannot estimate its channel")
    nd = cfg.n_dynamic
    scale = snr_dynamic_ps(power.c_tau, power.c_delta, nd, cfg.m_tx).value / nd

    def sample(idx):
        est = dynamic_estimate_ps(cfg, power.c_tau, sample_channels(cfg, mc.root_seed, idx))
        return logdet2_gram(est.h_bar, scale)

    return _as_rate(montecarlo.estimate(sample, mc), 1.0 - nd / cfg.t_coh_dynamic)


def rate_static_ps(cfg: SystemConfig, power: SuperpositionPower, mc: McSettings = None) -> RateEstimate:
    """Static user's rate without interference cancellation.

    ``(N_d/T_d) E[log det(I + c_tau H_s H_s^H)]``; only the pilot slots carry
    the static user's data.
    """
    cfg = validate_config(cfg)
    check_superposition_power(cfg, power)
    return _static_rate(cfg, power.c_tau, _mc(mc))


def _static_rate(cfg, scale, mc, scale_se=0.0):
    if scale == 0:
        return RateEstimate.exact(0.0)

    def sample(idx):
        return logdet2_gram(sample_channels(cfg, mc.root_seed, idx).h_static, scale)

    prefactor = cfg.n_dynamic / cfg.t_coh_dynamic
    rate = _as_rate(montecarlo.estimate(sample, mc), prefactor)
    if scale_se == 0:
        return rate
    # delta method for the uncertainty of the estimated SNR scale
    def slope(idx):
        h = sample_channels(cfg, mc.root_seed, idx).h_static
        gram = h @ np.conj(np.swapaxes(h, -1, -2))
        eye = np.eye(gram.shape[-1])
        return np.real(np.trace(np.linalg.solve(eye + scale * gram, gram), axis1=-2, axis2=-1)) / LN2

    dr_ds = prefactor * montecarlo.estimate(slope, mc).mean
    se = math.hypot(rate.std_error, dr_ds * scale_se)
    return RateEstimate(rate.mean, se, rate.n_samples, rate.kind)


def rate_dynamic_baseline(cfg: SystemConfig, power: BaselinePower, mc: McSettings = None) -> RateEstimate:
    """Dynamic user's TDMA rate with training on ``N_d`` active antennas."""
    cfg = validate_config(cfg)
    check_baseline_power(cfg, power)
    mc = _mc(mc)
    if power.rho_delta == 0:
        return RateEstimate.exact(0.0)
    if power.rho_tau == 0:
        raise DegeneratePilotError("rho_tau = 0 with rho_delta > 0: the dynamic user cannot estimate its channel")
    nd = cfg.n_dynamic
    scale = snr_baseline(power.rho_tau, power.rho_delta).value / nd
    pilot = unitary_pilot(nd)

    def sample(idx):
        s = sample_channels(cfg, mc.root_seed, idx)
        h = s.h_dynamic[:, :, :nd]
        # S_tau = sqrt(N_d) X_tau, so the observation is sqrt(rho_tau) H X_tau + W
        y = pilot_observation(h, pilot, s.w_train, power.rho_tau, 1)
        return logdet2_gram(mmse_estimate(y, pilot, power.rho_tau, 1).h_bar, scale)

    return _as_rate(montecarlo.estimate(sample, mc), 1.0 - nd / cfg.t_coh_dynamic)


def rate_static_coherent(cfg: SystemConfig, rho, mc: McSettings = None) -> RateEstimate:
    """Single-user static rate with full CSIR and equal power ``rho/M`` per antenna."""
    cfg = validate_config(cfg)
    if rho < 0:
        raise ConfigError("negative-power", f"rho must be nonnegative, got {rho}")
    mc = _mc(mc)
    if rho == 0:
        return RateEstimate.exact(0.0)
    scale = rho / cfg.m_tx

    def sample(idx):
        return logdet2_gram(sample_channels(cfg, mc.root_seed, idx).h_static, scale)

    return _as_rate(montecarlo.estimate(sample, mc), 1.0)


def tdma_region(r_dyn: RateEstimate, r_stat: RateEstimate, grid_size: int = 11) -> list:
    """Time-sharing points ``(p R_d, (1 - p) R_s)`` for ``p`` on a uniform grid in [0, 1]."""
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2 to include both endpoints")
    return [
        RateRegionPoint(p * r_dyn.mean, (1.0 - p) * r_stat.mean, share_p=float(p), label="tdma")
        for p in np.linspace(0.0, 1.0, grid_size)
    ]


def _require_ic_geometry(cfg):
    if cfg.n_static < cfg.n_dynamic:
        raise ConfigError(
            "static-fewer-antennas",
            f"interference cancellation needs n_static >= n_dynamic, got {cfg.n_static} < {cfg.n_dynamic}",
        )


def dynamic_signal_eigenvalues(c_tau, c_delta, x_delta):
    """Eigenvalues ``c_tau + c_delta gamma_i^2`` of ``X_d X_d^H`` (ascending, batched)."""
    gamma2 = np.linalg.eigvalsh(x_delta @ np.conj(np.swapaxes(x_delta, -1, -2)))
    return c_tau + c_delta * np.clip(gamma2, 0.0, None)


def inverse_power_mean(cfg: SystemConfig, power: SuperpositionPower, mc: McSettings = None) -> McResult:
    """Monte Carlo estimate of ``E[lambda^-2]`` over unordered eigenvalues of ``X_d X_d^H``.

    All ``N_d`` eigenvalues of each draw are pooled.
    """
    cfg = validate_config(cfg)
    mc = _mc(mc)
    if power.c_tau == 0 and power.c_delta == 0:
        raise DegeneratePilotError("c_tau = c_delta = 0: the dynamic signal has no power")

    def sample(idx):
        x_delta = sample_channels(cfg, mc.root_seed, idx).x_delta
        lam2 = dynamic_signal_eigenvalues(power.c_tau, power.c_delta, x_delta)
        return np.mean(1.0 / lam2, axis=-1)

    return montecarlo.estimate(sample, mc)


def snr_static_ic(cfg: SystemConfig, power: SuperpositionPower, mc: McSettings = None) -> EffectiveSnr:
    """``N_s / E[lambda^-2]``."""
    cfg = validate_config(cfg)
    if power.c_delta == 0:
        return EffectiveSnr(power.c_tau * cfg.n_static, User.STATIC, Scheme.PRODSUP_IC)
    mu = inverse_power_mean(cfg, power, mc)
    return EffectiveSnr(cfg.n_static / mu.mean, User.STATIC, Scheme.PRODSUP_IC)


def rate_static_ic(cfg: SystemConfig, power: SuperpositionPower, mc: McSettings = None) -> RateEstimate:
    """Static user's rate after decoding and cancelling the dynamic user's signal.

    ``(N_d/T_d) E[log det(I + H_s H_s^H / E[lambda^-2])]``. The reported
    standard error includes the uncertainty of the estimated ``E[lambda^-2]``.
    """
    cfg = validate_config(cfg)
    _require_ic_geometry(cfg)
    check_superposition_power(cfg, power)
    mc = _mc(mc)
    if power.c_tau == 0 and power.c_delta == 0:
        raise DegeneratePilotError("c_tau = c_delta = 0: the dynamic signal has no power")
    if power.c_delta == 0:
        return _static_rate(cfg, power.c_tau, mc)
    mu = inverse_power_mean(cfg, power, mc)
    scale = 1.0 / mu.mean
    return _static_rate(cfg, scale, mc, scale_se=mu.std_error / mu.mean**2)


def decodability_margin(cfg: SystemConfig, power: SuperpositionPower, mc: McSettings = None) -> McResult:
    """How much more the static user can learn about ``X_delta`` than the dynamic user.

    Per data slot, the static user's bound ``log det(I + rho_d/N_d Hbar_s^H Hbar_s)``
    (its full normalized equivalent-channel estimate, ``N_s x N_d``) minus the
    dynamic user's ``log det(I + rho_d/N_d Hbar_d Hbar_d^H)``. Both users see the
    same ``X_s`` in each sample, so the difference is paired. Nonnegative in
    expectation; zero in distribution when ``N_s == N_d``.
    """
    cfg = validate_config(cfg)
    _require_ic_geometry(cfg)
    check_superposition_power(cfg, power)
    mc = _mc(mc)
    if power.c_delta == 0:
        return McResult(0.0, 0.0, mc.n_samples)
    if power.c_tau == 0:
        raise DegeneratePilotError("c_tau = 0 with c_delta > 0: no channel estimate to decode with")
    nd = cfg.n_dynamic
    scale = snr_dynamic_ps(power.c_tau, power.c_delta, nd, cfg.m_tx).value / nd

    def sample(idx):
        s = sample_channels(cfg, mc.root_seed, idx)
        static = logdet2_gram(static_estimate_ps(cfg, power.c_tau, s).h_bar, scale)
        dynamic = logdet2_gram(dynamic_estimate_ps(cfg, power.c_tau, s).h_bar, scale)
        return static - dynamic

    return montecarlo.estimate(sample, mc)
