"""How many extra antennas make up for low-resolution ADCs.

For a common power ``p`` (``p_p = p_u = p``, ``tau = K``) find the smallest
``M_low`` whose closed-form rate with ``bits_low``-bit ADCs reaches the rate
of an ideal-ADC array with ``M_conv`` antennas.  The rate is increasing in
``M``, so integer bisection applies; the monotonicity is spot-checked on the
bracket rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .asymptotics import prop1_rate
from .channel import SystemConfig
from .errors import NumericalError, ParameterError
from .quantizer import INF_BITS, Bits, QuantizerModel, validate_bits
from .receiver import map_ordered


@dataclass(frozen=True)
class CompensationQuery:
    M_conv: int
    K: int
    p: float
    bits_low: Bits
    M_max: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "bits_low", validate_bits(self.bits_low))
        if self.M_max is None:
            object.__setattr__(self, "M_max", 64 * self.M_conv)
        if self.K < 1 or self.M_conv < self.K:
            raise ParameterError(f"need M_conv >= K >= 1 (M_conv={self.M_conv}, K={self.K})")
        if self.M_max < self.M_conv:
            raise ParameterError(f"M_max={self.M_max} is below M_conv={self.M_conv}")
        if not self.p > 0:
            raise ParameterError("p must be positive")

    @classmethod
    def from_snr(cls, M_conv: int, K: int, snr_db: float, bits_low: Bits,
                 M_max: int | None = None) -> "CompensationQuery":
        return cls(M_conv=M_conv, K=K, p=10.0 ** (snr_db / 10.0), bits_low=bits_low, M_max=M_max)


@dataclass(frozen=True)
class CompensationResult:
    """``M_low`` is ``None`` when even ``M_max`` antennas fall short."""

    M_low: Optional[int]
    target_rate: float
    query: CompensationQuery

    @property
    def attainable(self) -> bool:
        return self.M_low is not None

    @property
    def eta(self) -> float:
        return self.M_low / self.query.M_conv if self.attainable else math.inf


def _rate(M: int, query: CompensationQuery, q: QuantizerModel) -> float:
    cfg = SystemConfig(M=M, K=query.K, tau=query.K, p_p=query.p, p_u=query.p, bits=q.bits)
    return prop1_rate(cfg, q).average


def min_antennas(query: CompensationQuery) -> CompensationResult:
    q_low = QuantizerModel.for_bits(query.bits_low)
    target = _rate(query.M_conv, query, QuantizerModel.for_bits(INF_BITS))
    rate = lambda M: _rate(M, query, q_low)  # noqa: E731

    lo, hi = query.K, query.M_max
    r_lo, r_hi = rate(lo), rate(hi)
    if r_hi < target:
        return CompensationResult(None, target, query)
    if r_lo >= target:
        return CompensationResult(lo, target, query)
    mid = (lo + hi) // 2
    if not r_lo <= rate(mid) <= r_hi:
        raise NumericalError(f"rate is not monotone in M on [{lo}, {hi}] for {query}")
    # invariant: rate(lo) < target <= rate(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if rate(mid) >= target:
            hi = mid
        else:
            lo = mid
    return CompensationResult(hi, target, query)


@dataclass(frozen=True)
class EtaRow:
    snr_db: float
    bits: Bits
    M_conv: int
    K: int
    M_low: Optional[int]
    eta: float

    @property
    def attainable(self) -> bool:
        return self.M_low is not None


def eta_sweep(M_conv: int, K: int, bits_list, snr_grid_db, M_max: int | None = None,
              workers: int = 1) -> list[EtaRow]:
    """One :func:`min_antennas` solve per (SNR, bits) pair, ordered by SNR then bits."""
    points = [(float(s), validate_bits(b)) for s in snr_grid_db for b in bits_list]
    if any(not math.isfinite(s) for s, _ in points):
        raise ParameterError("SNR grid must be finite")

    def solve(point):
        snr, bits = point
        res = min_antennas(CompensationQuery.from_snr(M_conv, K, snr, bits, M_max))
        return EtaRow(snr_db=snr, bits=bits, M_conv=M_conv, K=K, M_low=res.M_low, eta=res.eta)

    return map_ordered(solve, points, workers)
