"""Quantization-aware MMSE receiver, per-user SINR and the Monte-Carlo rate."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .channel import SystemConfig, sample_channel, trial_rng
from .errors import ParameterError
from .estimation import ChannelEstimate, dft_pilots, lmmse_estimate, quantized_pilot_signal
from .quantizer import QuantizerModel, aqnm_noise_covariance_diag, aqnm_noise_variance_approx


class NoiseMode(str, enum.Enum):
    APPROX_DIAGONAL = "approx"
    EXACT_DIAGONAL = "exact"


class Method(str, enum.Enum):
    MONTE_CARLO = "mc"
    THEOREM1 = "theorem1"
    PROP1 = "prop1"
    REMARK1 = "remark1"
    REMARK2 = "remark2"


@dataclass(frozen=True)
class EffectiveNoiseParams:
    """Regularizer of the MMSE receiver and the statistics it was built from.

    ``theta = sum(sigma2_err) + (kappa + alpha*sigma2_qu) / (kappa*p_u)``.
    """

    theta: float
    sigma2_qu: float
    mode: NoiseMode
    sum_err: float
    p_u: float
    quantizer: QuantizerModel

    def with_theta(self, theta: float) -> "EffectiveNoiseParams":
        """Same noise statistics, different receiver regularizer."""
        return replace(self, theta=float(theta))


@dataclass(frozen=True)
class RateResult:
    per_user: np.ndarray = field(repr=False)
    average: float
    stderr: float
    method: Method
    trials: int = 0


def effective_noise(cfg: SystemConfig, est: ChannelEstimate, q: QuantizerModel,
                    mode: NoiseMode = NoiseMode.APPROX_DIAGONAL) -> EffectiveNoiseParams:
    if cfg.p_u <= 0:
        raise ParameterError("p_u must be positive for the receiver regularizer")
    sigma2_qu = aqnm_noise_variance_approx(cfg.sum_d, cfg.p_u)
    sum_err = math.fsum(est.sigma2_err)
    theta = sum_err + (q.kappa + q.alpha * sigma2_qu) / (q.kappa * cfg.p_u)
    return EffectiveNoiseParams(theta=theta, sigma2_qu=sigma2_qu, mode=NoiseMode(mode),
                                sum_err=sum_err, p_u=cfg.p_u, quantizer=q)


def _factor(Ghat: np.ndarray, theta: float):
    if not theta > 0:
        raise ParameterError(f"theta must be positive, got {theta}")
    A = Ghat @ Ghat.conj().T
    A[np.diag_indices_from(A)] += theta
    return cho_factor(A, lower=True, check_finite=False)


def mmse_receiver(Ghat: np.ndarray, theta: float) -> np.ndarray:
    """Columns ``r_k = (Ghat Ghat^H + theta I)^{-1} ghat_k``."""
    return cho_solve(_factor(Ghat, theta), Ghat, check_finite=False)


def sinr_per_user(Ghat: np.ndarray, est: ChannelEstimate | None, noise: EffectiveNoiseParams,
                  G_true: np.ndarray | None = None) -> np.ndarray:
    """Per-user SINR of the MMSE receiver built with ``noise.theta``.

    In approximate-diagonal mode the quantizer noise covariance is replaced
    by its scalar approximation, which collapses all noise terms into
    ``theta * ghat^H A^{-2} ghat``.  Exact-diagonal mode keeps the
    realization-dependent diagonal computed from the true channel and the
    estimation-error variance from ``noise.sum_err``.
    """
    mode = NoiseMode(noise.mode)
    if mode is NoiseMode.EXACT_DIAGONAL and G_true is None:
        raise ParameterError("exact-diagonal SINR needs the true channel G_true")
    R = mmse_receiver(Ghat, noise.theta)
    S = Ghat.conj().T @ R  # S[j, k] = ghat_j^H A^{-1} ghat_k
    signal = np.abs(np.diag(S)) ** 2
    interference = np.sum(np.abs(S) ** 2, axis=0) - signal
    r_norm2 = np.sum(np.abs(R) ** 2, axis=0)

    if mode is NoiseMode.APPROX_DIAGONAL:
        denom = interference + noise.theta * r_norm2
    else:
        q = noise.quantizer
        sig_q = aqnm_noise_covariance_diag(G_true, noise.p_u, q)
        aqn = q.kappa ** 2 * r_norm2 + sig_q @ (np.abs(R) ** 2)
        scale = q.kappa ** 2 * noise.p_u
        signal = scale * signal
        denom = scale * interference + scale * noise.sum_err * r_norm2 + aqn
    with np.errstate(divide="ignore", invalid="ignore"):
        sinr = np.where(denom > 0, signal / denom, 0.0)
    return sinr


def _trial_rates(cfg: SystemConfig, q: QuantizerModel, F, base_seed: int, index: int,
                 mode: NoiseMode) -> np.ndarray:
    G = sample_channel(cfg, trial_rng(base_seed, index, 0)).G
    Z_p = quantized_pilot_signal(G, F, cfg.p_p, q, trial_rng(base_seed, index, 1), sum_d=cfg.sum_d)
    est = lmmse_estimate(Z_p, F, cfg, q)
    noise = effective_noise(cfg, est, q, mode)
    return np.log2(1.0 + sinr_per_user(est.Ghat, est, noise, G_true=G))


def map_ordered(fn, items, workers: int = 1):
    """``list(map(fn, items))``, optionally on a thread pool, in input order."""
    if workers is None or workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def monte_carlo_rate(cfg: SystemConfig, trials: int, base_seed: int = 0,
                     mode: NoiseMode = NoiseMode.APPROX_DIAGONAL,
                     q: QuantizerModel | None = None, workers: int = 1) -> RateResult:
    """Ergodic per-user rate ``E[log2(1 + SINR_k)]`` over ``trials`` block-fading draws.

    Each trial draws its channel and pilot noise from generators derived from
    ``(base_seed, trial_index)``, so the result does not depend on
    ``workers``.  ``stderr`` is the standard error over trials of the
    user-averaged rate.
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    q = cfg.quantizer() if q is None else q
    F = dft_pilots(cfg.tau, cfg.K)
    mode = NoiseMode(mode)
    rates = map_ordered(lambda i: _trial_rates(cfg, q, F, base_seed, i, mode), range(trials), workers)
    rates = np.asarray(rates)  # trials x K
    per_user = np.array([math.fsum(col) / trials for col in rates.T])
    per_trial = np.array([math.fsum(row) / cfg.K for row in rates])
    average = math.fsum(per_trial) / trials
    if trials > 1:
        var = math.fsum((per_trial - average) ** 2) / (trials - 1)
        stderr = math.sqrt(var / trials)
    else:
        stderr = 0.0
    return RateResult(per_user=per_user, average=average, stderr=stderr,
                      method=Method.MONTE_CARLO, trials=trials)
