"""
Linear MMSE estimation of the equivalent channel from the pilot phase.

The pilot observation is ``Y = sqrt(c_tau n) H_eq X_tau + W`` with a unitary
pilot ``X_tau`` and ``H_eq`` having uncorrelated unit-variance entries. Here
``n`` is the equivalent-channel normalization: ``H_eq = H X_s / sqrt(n)``
with ``n`` the number of transmit antennas (which is ``N_s`` whenever
``N_s >= N_d``). All functions accept a leading batch axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePilotError


@dataclass(frozen=True)
class EquivalentChannelEstimate:
    h_hat: np.ndarray
    h_bar: np.ndarray
    alpha2: float


def alpha2(c_tau, n_tx) -> float:
    """Per-entry variance of the MMSE estimate, ``c_tau n / (1 + c_tau n)``."""
    snr = c_tau * n_tx
    return snr / (1.0 + snr)


def _herm(a):
    return np.conj(np.swapaxes(a, -1, -2))


def mmse_estimate(y_train, x_pilot, c_tau, n_tx) -> EquivalentChannelEstimate:
    """MMSE estimate ``Y C_YY^{-1} C_YH`` with ``C_YY = (1 + c_tau n) I``.

    Raises
    ------
    DegeneratePilotError
        If ``c_tau == 0``; the normalized estimate divides by ``alpha``.
    """
    if c_tau <= 0:
        raise DegeneratePilotError("zero pilot power: normalized channel estimate is undefined")
    snr = c_tau * n_tx
    h_hat = (np.sqrt(snr) / (1.0 + snr)) * (np.asarray(y_train) @ _herm(np.asarray(x_pilot)))
    a2 = alpha2(c_tau, n_tx)
    return EquivalentChannelEstimate(h_hat=h_hat, h_bar=h_hat / np.sqrt(a2), alpha2=a2)


def mmse_estimate_static_equiv(y_train, x_pilot, c_tau, n_tx) -> EquivalentChannelEstimate:
    """Estimate of ``H_s X_s / sqrt(n)`` at the static user (``N_s x N_d``).

    The pilot covariance is diagonal, so the same linear map applies row by
    row regardless of how many receive antennas there are.
    """
    return mmse_estimate(y_train, x_pilot, c_tau, n_tx)


def pilot_observation(h_eq, x_pilot, noise, c_tau, n_tx):
    """``sqrt(c_tau n) H_eq X_tau + W``."""
    return np.sqrt(c_tau * n_tx) * (h_eq @ x_pilot) + noise
