"""Low-resolution ADC models.

Two views of the same b-bit ADC live here:

* the additive quantization noise model (AQNM), ``Q(y) ~ kappa*y + q`` with
  ``kappa = 1 - alpha`` and ``q`` Gaussian, which is what the rate analysis
  works with, and
* an exact Lloyd-Max scalar quantizer for a unit-variance Gaussian, applied
  separately to the in-phase and quadrature parts, which is used to check
  that the linearization is sensible.

``alpha`` is the normalized mean-square error of the Lloyd-Max quantizer per
real dimension.  Infinite resolution is spelled ``math.inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.linalg import solve_banded
from scipy.special import ndtr, ndtri

from .errors import NumericalError, ParameterError

Bits = Union[int, float]
INF_BITS: float = math.inf

MAX_BITS = 12
LLOYD_TOL = 1e-12
LLOYD_MAX_ITER = 10_000
# plain alternation converges slowly beyond a few bits; after this many sweeps
# the remaining iterations are Newton steps on the same fixed-point equations
_LLOYD_SWEEPS_BEFORE_NEWTON = 200
# above ~10 bits the Newton system is ill-conditioned enough that level
# movement bottoms out near 1e-11; below this, stagnation counts as converged
_ROUNDOFF_FLOOR = 1e-9
_STAGNATION_STEPS = 10

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _pdf(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return _INV_SQRT_2PI * np.exp(-0.5 * np.square(x))


def validate_bits(bits: Bits) -> Bits:
    """Return ``bits`` as an ``int`` (finite) or ``math.inf``; raise otherwise."""
    if isinstance(bits, float) and math.isinf(bits) and bits > 0:
        return INF_BITS
    if isinstance(bits, (bool, np.bool_)):
        raise ParameterError(f"bits must be a positive integer or inf, got {bits!r}")
    if isinstance(bits, (int, np.integer)) or (isinstance(bits, float) and bits.is_integer()):
        b = int(bits)
        if b >= 1:
            return b
    raise ParameterError(f"bits must be a positive integer or inf, got {bits!r}")


def parse_bits(text: str) -> Bits:
    """Parse ``"3"`` or ``"inf"`` into a bit depth."""
    t = text.strip().lower()
    if t in ("inf", "infinity", "∞"):
        return INF_BITS
    try:
        return validate_bits(int(t))
    except ValueError:
        raise ParameterError(f"cannot parse bit depth {text!r}") from None


def format_bits(bits: Bits) -> str:
    return "inf" if math.isinf(bits) else str(int(bits))


@dataclass(frozen=True)
class QuantizerModel:
    """AQNM parameters for a given ADC resolution."""

    bits: Bits
    alpha: float
    kappa: float

    @classmethod
    def for_bits(cls, bits: Bits) -> "QuantizerModel":
        bits = validate_bits(bits)
        if math.isinf(bits):
            return cls(bits=INF_BITS, alpha=0.0, kappa=1.0)
        alpha = distortion_factor(bits)
        return cls(bits=bits, alpha=alpha, kappa=1.0 - alpha)

    @classmethod
    def from_alpha(cls, alpha: float, bits: Bits = INF_BITS) -> "QuantizerModel":
        """Build a model from an explicit distortion factor (for sensitivity studies)."""
        if not 0.0 <= alpha < 1.0:
            raise ParameterError(f"alpha must lie in [0, 1), got {alpha}")
        return cls(bits=bits, alpha=float(alpha), kappa=1.0 - float(alpha))

    @property
    def is_ideal(self) -> bool:
        return self.alpha == 0.0


@dataclass(frozen=True)
class ScalarQuantizer:
    """Lloyd-Max quantizer for a unit-variance real Gaussian input.

    ``thresholds`` has ``2**bits - 1`` entries and ``levels`` has ``2**bits``.
    Level ``i`` is used for inputs in ``[thresholds[i-1], thresholds[i])``.
    """

    bits: int
    thresholds: np.ndarray
    levels: np.ndarray
    mse: float
    iterations: int

    def __post_init__(self):
        self.thresholds.setflags(write=False)
        self.levels.setflags(write=False)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        # side="right": a value sitting exactly on a threshold maps upward
        idx = np.searchsorted(self.thresholds, x, side="right")
        return self.levels[idx]


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
# closed-form cell moments cancel badly on narrow cells; quadrature below this width
_QUAD_MAX_WIDTH = 1.0


def _half_cells(t_pos: np.ndarray):
    lo = np.concatenate(([0.0], t_pos))
    hi = np.concatenate((t_pos, [np.inf]))
    # upper-tail probabilities keep precision far from the origin
    prob = ndtr(-lo) - ndtr(-hi)
    first = _pdf(lo) - _pdf(hi)
    narrow = (hi - lo) <= _QUAD_MAX_WIDTH
    if np.any(narrow):
        a, b = lo[narrow], hi[narrow]
        half = 0.5 * (b - a)
        x = (0.5 * (a + b))[:, None] + half[:, None] * _GL_NODES
        w = half[:, None] * _GL_WEIGHTS * _pdf(x)
        prob[narrow] = w.sum(axis=1)
        first[narrow] = (w * x).sum(axis=1)
    centroid = first / prob
    return lo, hi, prob, centroid


def _newton_step(t_pos: np.ndarray) -> np.ndarray:
    """One Newton step on ``t_i = (c_i + c_{i+1}) / 2`` for the positive half."""
    lo, hi, prob, c = _half_cells(t_pos)
    # d c_j / d(lower edge) and d c_j / d(upper edge)
    dc_dlo = _pdf(lo) * (c - lo) / prob
    hi_f = np.where(np.isinf(hi), 0.0, hi)
    dc_dhi = np.where(np.isinf(hi), 0.0, _pdf(hi_f) * (hi_f - c) / prob)
    n = t_pos.size
    resid = t_pos - 0.5 * (c[:-1] + c[1:])
    diag = 1.0 - 0.5 * (dc_dhi[:-1] + dc_dlo[1:])
    # t_{i-1} is the lower edge of cell i (cell 0's lower edge is the fixed 0)
    lower = -0.5 * dc_dlo[1:n]
    upper = -0.5 * dc_dhi[1:n]
    ab = np.zeros((3, n))
    ab[0, 1:] = upper
    ab[1] = diag
    ab[2, :-1] = lower
    return t_pos - solve_banded((1, 1), ab, resid)


@lru_cache(maxsize=None)
def _lloyd_max_half(bits: int):
    n_half = 2 ** (bits - 1)
    if n_half == 1:
        t_pos = np.empty(0)
        _, _, prob, c = _half_cells(t_pos)
        return t_pos, c, 1.0 - 2.0 * float(np.sum(prob * c * c)), 0

    # companding start: optimal point density for N(0,1) is N(0,3)
    t_pos = math.sqrt(3.0) * ndtri(0.5 + 0.5 * np.arange(1, n_half) / n_half)
    prev = None
    best, stalled = math.inf, 0
    for it in range(1, LLOYD_MAX_ITER + 1):
        _, _, _, c = _half_cells(t_pos)
        if prev is not None:
            move = float(np.max(np.abs(c - prev)))
            if move < LLOYD_TOL:
                break
            if move < _ROUNDOFF_FLOOR:
                stalled = stalled + 1 if move >= best else 0
                best = min(best, move)
                if stalled >= _STAGNATION_STEPS:
                    break
        prev = c
        if it <= _LLOYD_SWEEPS_BEFORE_NEWTON:
            t_pos = 0.5 * (c[:-1] + c[1:])
        else:
            t_new = _newton_step(t_pos)
            if not np.all(np.diff(np.concatenate(([0.0], t_new))) > 0):
                t_new = 0.5 * (c[:-1] + c[1:])
            t_pos = t_new
    else:
        raise NumericalError(
            f"Lloyd-Max iteration for {bits} bits did not converge in {LLOYD_MAX_ITER} iterations"
        )
    _, _, prob, c = _half_cells(t_pos)
    mse = 1.0 - 2.0 * float(np.sum(prob * c * c))
    return t_pos, c, mse, it


def build_scalar_quantizer(bits: int) -> ScalarQuantizer:
    """Design the Lloyd-Max quantizer for a unit-variance Gaussian.

    Alternates the centroid and nearest-neighbour conditions until the levels
    move by less than ``LLOYD_TOL``; Newton steps on the same equations take
    over after ``_LLOYD_SWEEPS_BEFORE_NEWTON`` sweeps.
    """
    bits = validate_bits(bits)
    if math.isinf(bits) or not 1 <= bits <= MAX_BITS:
        raise ParameterError(f"bits must be in [1, {MAX_BITS}], got {bits}")
    t_pos, c_pos, mse, it = _lloyd_max_half(bits)
    thresholds = np.concatenate((-t_pos[::-1], [0.0], t_pos))
    levels = np.concatenate((-c_pos[::-1], c_pos))
    return ScalarQuantizer(bits=bits, thresholds=thresholds, levels=levels, mse=mse, iterations=it)


def distortion_factor(bits: int) -> float:
    """Normalized MSE of the optimal ``bits``-bit quantizer for N(0, 1).

    ``distortion_factor(1) == 1 - 2/pi``.
    """
    return build_scalar_quantizer(bits).mse


def agc_gain(power: float, sum_d: float) -> float:
    """Per-dimension input standard deviation used as the AGC scale."""
    return math.sqrt((power * sum_d + 1.0) / 2.0)


def quantize_exact(y: np.ndarray, q: ScalarQuantizer, gain: float) -> np.ndarray:
    """Quantize real and imaginary parts of ``y / gain`` and scale back by ``gain``."""
    if gain <= 0:
        raise ParameterError(f"gain must be positive, got {gain}")
    y = np.asarray(y)
    re = q(np.real(y) / gain)
    im = q(np.imag(y) / gain)
    return gain * (re + 1j * im)


def aqnm_noise_covariance_diag(G: np.ndarray, p_u: float, q: QuantizerModel) -> np.ndarray:
    """Diagonal of ``alpha*kappa*diag(p_u G G^H + I)`` for one realization."""
    row_power = np.sum(np.abs(G) ** 2, axis=1)
    return q.alpha * q.kappa * (p_u * row_power + 1.0)


def aqnm_noise_variance_approx(sum_d: float, p: float, q: QuantizerModel | None = None) -> float:
    """Scalar ``p * sum(d) + 1`` such that ``Sigma_q ~ alpha*kappa*sigma2*I``.

    ``q`` is accepted for signature symmetry with the exact covariance; the
    scalar itself does not depend on the resolution.
    """
    return p * sum_d + 1.0
