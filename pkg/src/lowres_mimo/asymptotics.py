"""Deterministic equivalents of the MMSE-receiver rate.

Two routes to the same quantities:

* general large-scale fading: the fixed point ``psi`` of
  ``psi = sum_k s_k / (1 + M s_k / (theta + psi))`` gives
  ``(1/M) tr A^{-1} -> 1/(theta + psi)`` and, through
  ``lambda = -M/(theta+psi)^2 * sum_k s_k^2 / (1 + M s_k/(theta+psi))^2 <= 0``,
  ``(1/M) tr A^{-2} -> 1 / ((1 + lambda)(theta + psi)^2)``;
* equal fading: the Marchenko-Pastur closed forms ``a`` and ``b = -da/dtheta``.

All formulas are evaluated at finite ``M`` and ``K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .channel import SystemConfig
from .errors import NumericalError, ParameterError
from .estimation import error_variance, estimate_variance
from .quantizer import QuantizerModel
from .receiver import Method, RateResult

PSI_RTOL = 1e-12
PSI_MAX_ITER = 200


@dataclass(frozen=True)
class AsymptoticState:
    theta: float
    psi: float
    lam: float
    Dhat: np.ndarray
    M: int
    K: int

    @property
    def trace_inv(self) -> float:
        """Deterministic equivalent of ``(1/M) tr A^{-1}``."""
        return 1.0 / (self.theta + self.psi)

    @property
    def trace_inv2(self) -> float:
        """Deterministic equivalent of ``(1/M) tr A^{-2}``."""
        return 1.0 / ((1.0 + self.lam) * (self.theta + self.psi) ** 2)


@dataclass(frozen=True)
class StieltjesPair:
    a: float
    b: float
    xi: float
    sigma2: float


def psi_residual(psi: float, Dhat: np.ndarray, theta: float, M: int) -> float:
    """``f(psi) = psi - sum_k s_k (theta+psi) / ((theta+psi) + M s_k)``."""
    t = theta + psi
    return psi - float(np.sum(Dhat * t / (t + M * Dhat)))


def solve_psi(Dhat, theta: float, M: int) -> float:
    """Unique positive root of :func:`psi_residual` on ``(0, sum(Dhat)]``."""
    Dhat = np.atleast_1d(np.asarray(Dhat, dtype=float))
    if theta <= 0:
        raise ParameterError(f"theta must be positive, got {theta}")
    if np.any(Dhat < 0):
        raise ParameterError("estimate variances must be nonnegative")
    upper = float(np.sum(Dhat))
    if upper == 0.0:
        return 0.0
    f = lambda x: psi_residual(x, Dhat, theta, M)  # noqa: E731
    # f(0) < 0 < f(sum(Dhat)) whenever sum(Dhat) > 0
    try:
        psi, info = brentq(f, 0.0, upper, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                           maxiter=PSI_MAX_ITER, full_output=True, disp=False)
    except ValueError as exc:
        raise NumericalError(f"psi is not bracketed on (0, {upper}]: {exc}") from exc
    if not info.converged:
        raise NumericalError(f"psi root search did not converge: {info.flag}")
    if abs(f(psi)) > PSI_RTOL * max(1.0, upper):
        raise NumericalError(f"psi residual {f(psi):.3e} above tolerance")
    return float(psi)


def lambda_param(Dhat, theta: float, M: int, psi: float) -> float:
    """Nonpositive ``lambda``; ``1 + lambda = 1 / (1 + d psi / d theta)``."""
    Dhat = np.atleast_1d(np.asarray(Dhat, dtype=float))
    t = theta + psi
    # D^2 (I + M/t D)^{-2} = (t D / (t + M D))^2
    return -M / t ** 2 * float(np.sum((t * Dhat / (t + M * Dhat)) ** 2))


def receiver_theta(cfg: SystemConfig, q: QuantizerModel) -> float:
    """Closed-form regularizer from the estimation and AQNM statistics."""
    if cfg.p_u <= 0:
        raise ParameterError("p_u must be positive")
    sum_err = float(np.sum(error_variance(cfg.d_array, cfg, q)))
    sigma2_qu = cfg.p_u * cfg.sum_d + 1.0
    return sum_err + (q.kappa + q.alpha * sigma2_qu) / (q.kappa * cfg.p_u)


def asymptotic_state(cfg: SystemConfig, q: QuantizerModel | None = None) -> AsymptoticState:
    q = cfg.quantizer() if q is None else q
    Dhat = np.atleast_1d(estimate_variance(cfg.d_array, cfg, q))
    theta = receiver_theta(cfg, q)
    psi = solve_psi(Dhat, theta, cfg.M)
    lam = lambda_param(Dhat, theta, cfg.M, psi)
    return AsymptoticState(theta=theta, psi=psi, lam=lam, Dhat=Dhat, M=cfg.M, K=cfg.K)


def theorem1_sinr(state: AsymptoticState) -> np.ndarray:
    """Per-user deterministic-equivalent SINR.

    Written in terms of ``g = -lambda`` so that ``(1/M) tr A^{-2}`` enters as
    ``1/((1 - g)(theta+psi)^2)``, the negative theta-derivative of
    ``1/(theta+psi)``.  Plugging the nonpositive ``lambda`` itself into that
    slot breaks the derivative identity and the agreement with the
    equal-fading closed form.
    """
    th, psi, M, K = state.theta, state.psi, state.M, state.K
    g = -state.lam
    s2 = state.Dhat
    s4 = s2 * s2
    t = th + psi
    num = s4 * M * K * t ** 2 * (g - 1.0)
    den = (g * th + psi * (g - 1.0)) * (s4 * M ** 2 * th + th * t ** 2
                                            + s2 * t * (K * th + K * psi + 2 * M * th))
    with np.errstate(divide="ignore", invalid="ignore"):
        sinr = num / den
    if not np.all(np.isfinite(sinr)) or np.any(sinr < 0):
        raise NumericalError(
            "per-user deterministic-equivalent SINR is not positive: "
            f"theta={th!r}, psi={psi!r}, lambda={state.lam!r}, M={M}, K={K}, "
            f"numerator={num!r}, denominator={den!r}"
        )
    return sinr


def resolvent_sinr(state: AsymptoticState) -> np.ndarray:
    """Per-user SINR equivalent ``M * Dhat_k / (theta + psi)``.

    Follows from removing user ``k`` from ``A`` (rank-one update): with the
    receiver regularizer equal to the noise level, the SINR collapses to
    ``ghat_k^H A_k^{-1} ghat_k``.  Equals :func:`theorem1_sinr` when all
    users share one large-scale fading value; unlike it, this form tracks
    Monte-Carlo per user when they do not.
    """
    return state.M * state.Dhat * state.trace_inv


def _rate_result(sinr: np.ndarray, method: Method) -> RateResult:
    per_user = np.log2(1.0 + np.atleast_1d(sinr))
    return RateResult(per_user=per_user, average=float(np.mean(per_user)), stderr=0.0,
                      method=method, trials=0)


def theorem1_rate(cfg: SystemConfig, q: QuantizerModel | None = None) -> RateResult:
    """Per-user deterministic-equivalent rate for arbitrary large-scale fading."""
    return _rate_result(theorem1_sinr(asymptotic_state(cfg, q)), Method.THEOREM1)


def _stieltjes_terms(theta, M, K, sigma2):
    xi = K / M
    ms = M * sigma2
    disc = (1 - xi) ** 2 / theta ** 2 + 2 * (1 + xi) / (ms * theta) + 1 / ms ** 2
    return xi, ms, disc


def stieltjes_a(theta: float, M: int, K: int, sigma2: float) -> float:
    """Equal-variance limit of ``(1/M) tr (Ghat Ghat^H + theta I)^{-1}``."""
    if theta <= 0 or sigma2 <= 0:
        raise ParameterError("theta and sigma2 must be positive")
    xi, ms, disc = _stieltjes_terms(theta, M, K, sigma2)
    return 0.5 * (math.sqrt(disc) + (1 - xi) / theta - 1 / ms)


def stieltjes_b(theta: float, M: int, K: int, sigma2: float) -> float:
    """Equal-variance limit of ``(1/M) tr A^{-2}``, i.e. ``-d a / d theta``."""
    if theta <= 0 or sigma2 <= 0:
        raise ParameterError("theta and sigma2 must be positive")
    xi, ms, disc = _stieltjes_terms(theta, M, K, sigma2)
    d_disc = 2 * (1 - xi) ** 2 / theta ** 3 + 2 * (1 + xi) / (ms * theta ** 2)
    return 0.5 * (0.5 * d_disc / math.sqrt(disc) + (1 - xi) / theta ** 2)


def stieltjes_pair(theta: float, M: int, K: int, sigma2: float) -> StieltjesPair:
    return StieltjesPair(a=stieltjes_a(theta, M, K, sigma2), b=stieltjes_b(theta, M, K, sigma2),
                         xi=K / M, sigma2=sigma2)


def equal_fading_sinr(sigma2: float, theta: float, M: int, K: int) -> float:
    """Closed-form SINR for common estimate variance ``sigma2``."""
    a = stieltjes_a(theta, M, K, sigma2)
    b = stieltjes_b(theta, M, K, sigma2)
    gap = a - theta * b
    if not gap > 0:
        raise NumericalError(f"a - theta*b = {gap!r} is not positive (theta={theta}, M={M}, K={K}, "
                             f"sigma2={sigma2})")
    return M * K * sigma2 ** 2 * a ** 2 / (gap * (K * sigma2 + theta * (1 + sigma2 * M * a) ** 2))


def _equal_result(sinr: float, K: int, method: Method) -> RateResult:
    return _rate_result(np.full(K, sinr), method)


def prop1_rate(cfg: SystemConfig, q: QuantizerModel | None = None) -> RateResult:
    """Closed-form rate when every user has the same large-scale fading."""
    if not cfg.equal_fading:
        raise ParameterError("prop1_rate needs equal large-scale fading; use theorem1_rate")
    q = cfg.quantizer() if q is None else q
    sigma2 = estimate_variance(cfg.d[0], cfg, q)
    theta = receiver_theta(cfg, q)
    return _equal_result(equal_fading_sinr(sigma2, theta, cfg.M, cfg.K), cfg.K, Method.PROP1)


def remark1_params(cfg: SystemConfig) -> tuple[float, float]:
    """``(sigma2, theta)`` in the infinite-resolution limit."""
    tp = cfg.tau * cfg.p_p
    return tp / (tp + 1.0), cfg.K / (tp + 1.0) + 1.0 / cfg.p_u


def remark2_params(cfg: SystemConfig, q: QuantizerModel) -> tuple[float, float]:
    """``(sigma2, theta)`` in the limit ``p_p = p_u -> inf`` at fixed resolution."""
    if q.alpha <= 0:
        raise ParameterError("the high-power limit needs a finite-resolution quantizer")
    k, a, K, tau = q.kappa, q.alpha, cfg.K, cfg.tau
    return k * tau / (k * tau + K * a), K * K * a / (k * tau + K * a) + K * a / k


def remark1_rate(cfg: SystemConfig) -> RateResult:
    sigma2, theta = remark1_params(cfg)
    return _equal_result(equal_fading_sinr(sigma2, theta, cfg.M, cfg.K), cfg.K, Method.REMARK1)


def remark2_rate(cfg: SystemConfig, q: QuantizerModel | None = None) -> RateResult:
    q = cfg.quantizer() if q is None else q
    sigma2, theta = remark2_params(cfg, q)
    return _equal_result(equal_fading_sinr(sigma2, theta, cfg.M, cfg.K), cfg.K, Method.REMARK2)


ASYMPTOTIC_METHODS = {
    Method.THEOREM1: theorem1_rate,
    Method.PROP1: prop1_rate,
    Method.REMARK1: lambda cfg, q=None: remark1_rate(cfg),
    Method.REMARK2: remark2_rate,
}
