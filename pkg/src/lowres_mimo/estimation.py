"""Quantized pilot training and per-user LMMSE channel estimation.

With orthogonal (DFT) pilots and the AQNM pilot-phase noise covariance
``alpha*kappa*(p_p*sum(d) + 1)*I`` the vectorized LMMSE estimator decouples
across users; each estimate is a scalar multiple of the despread pilot
observation ``Z_p conj(F)[:, k]``.  The full Kronecker-structured estimator is
never formed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import SystemConfig, complex_normal
from .errors import ParameterError
from .quantizer import QuantizerModel, aqnm_noise_variance_approx


@dataclass(frozen=True)
class PilotMatrix:
    F: np.ndarray = field(repr=False)

    @property
    def tau(self) -> int:
        return self.F.shape[0]

    @property
    def K(self) -> int:
        return self.F.shape[1]


@dataclass(frozen=True)
class ChannelEstimate:
    Ghat: np.ndarray = field(repr=False)
    sigma2_hat: np.ndarray
    sigma2_err: np.ndarray

    @property
    def sum_err(self) -> float:
        return math.fsum(self.sigma2_err)


def dft_pilots(tau: int, K: int) -> PilotMatrix:
    """First ``K`` columns of the ``tau``-point DFT matrix (unnormalized)."""
    if K > tau:
        raise ParameterError(f"need K <= tau for orthogonal pilots (K={K}, tau={tau})")
    n = np.arange(tau)
    # reduce the exponent mod tau so entries are exact at the symmetric points
    F = np.exp(-2j * np.pi * (np.outer(n, np.arange(K)) % tau) / tau)
    return PilotMatrix(F)


def pilot_noise_variance(cfg: SystemConfig) -> float:
    """Scalar ``sigma2_qp = p_p * sum(d) + 1`` of the pilot-phase quantizer noise."""
    return aqnm_noise_variance_approx(cfg.sum_d, cfg.p_p)


def _lmmse_denominator(d, cfg: SystemConfig, q: QuantizerModel):
    k, a = q.kappa, q.alpha
    return k * k * cfg.tau * cfg.p_p * d + k * k + k * a * pilot_noise_variance(cfg)


def estimate_variance(d_k, cfg: SystemConfig, q: QuantizerModel):
    """Per-entry variance of the LMMSE estimate of a user with fading ``d_k``."""
    d = np.asarray(d_k, dtype=float)
    if np.any(d <= 0):
        raise ParameterError("d_k must be positive")
    k = q.kappa
    out = k * k * cfg.tau * cfg.p_p * d * d / _lmmse_denominator(d, cfg, q)
    return float(out) if out.ndim == 0 else out


def error_variance(d_k, cfg: SystemConfig, q: QuantizerModel):
    """Per-entry variance of the estimation error, ``d_k - estimate_variance``."""
    d = np.asarray(d_k, dtype=float)
    out = d - estimate_variance(d, cfg, q)
    return float(out) if np.ndim(out) == 0 else out


def quantized_pilot_signal(G: np.ndarray, F: PilotMatrix | np.ndarray, p_p: float,
                           q: QuantizerModel, seed, sum_d: float | None = None) -> np.ndarray:
    """AQNM pilot observation ``kappa*sqrt(p_p)*G F^T + kappa*N_p + Q_p``.

    ``Q_p`` is drawn from its Gaussian model with per-entry variance
    ``alpha*kappa*(p_p*sum_d + 1)``.  ``sum_d`` defaults to the number of
    users (unit large-scale fading).

    ``seed`` may be an int or a ``Generator``.  The thermal noise is drawn
    before the quantizer noise, so at ``alpha = 0`` the result is the
    unquantized observation for the same seed.
    """
    F = F.F if isinstance(F, PilotMatrix) else np.asarray(F)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    M, tau = G.shape[0], F.shape[0]
    if sum_d is None:
        sum_d = float(G.shape[1])
    N_p = complex_normal(rng, (M, tau))
    Z = q.kappa * (math.sqrt(p_p) * (G @ F.T) + N_p)
    if q.alpha > 0:
        var_q = q.alpha * q.kappa * aqnm_noise_variance_approx(sum_d, p_p)
        Z = Z + complex_normal(rng, (M, tau), var_q)
    return Z


def lmmse_estimate(Z_p: np.ndarray, F: PilotMatrix | np.ndarray, cfg: SystemConfig,
                   q: QuantizerModel) -> ChannelEstimate:
    """Per-user LMMSE estimate ``ghat_k = c_k * Z_p conj(F)[:, k]``."""
    F = F.F if isinstance(F, PilotMatrix) else np.asarray(F)
    if F.shape != (cfg.tau, cfg.K):
        raise ParameterError(f"pilot matrix shape {F.shape} != (tau, K) = {(cfg.tau, cfg.K)}")
    if Z_p.shape != (cfg.M, cfg.tau):
        raise ParameterError(f"pilot observation shape {Z_p.shape} != (M, tau) = {(cfg.M, cfg.tau)}")
    d = cfg.d_array
    c = q.kappa * math.sqrt(cfg.p_p) * d / _lmmse_denominator(d, cfg, q)
    Ghat = (Z_p @ F.conj()) * c[None, :]
    s_hat = np.atleast_1d(estimate_variance(d, cfg, q))
    return ChannelEstimate(Ghat=Ghat, sigma2_hat=s_hat, sigma2_err=d - s_hat)
