"""Scenario configuration and Rayleigh block-fading channel draws."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError
from .quantizer import Bits, QuantizerModel, validate_bits


@dataclass(frozen=True)
class SystemConfig:
    """One uplink scenario.

    Powers are normalized to unit noise variance.  ``d`` holds the
    large-scale fading coefficient of every user; leave it as ``None`` for
    ``d_k = 1``.
    """

    M: int
    K: int
    tau: int
    p_p: float
    p_u: float
    d: tuple[float, ...] | None = None
    bits: Bits = math.inf

    def __post_init__(self):
        for name in ("M", "K", "tau"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ParameterError(f"{name} must be a positive integer, got {v!r}")
        if self.K > self.tau:
            raise ParameterError(f"orthogonal pilots need tau >= K (tau={self.tau}, K={self.K})")
        if self.p_p < 0 or self.p_u < 0:
            raise ParameterError("powers must be nonnegative")
        d = (1.0,) * self.K if self.d is None else tuple(float(x) for x in self.d)
        if len(d) != self.K:
            raise ParameterError(f"d has {len(d)} entries, expected K={self.K}")
        if any(x <= 0 for x in d):
            raise ParameterError("large-scale fading coefficients must be positive")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "bits", validate_bits(self.bits))

    @classmethod
    def from_snr(cls, M: int, K: int, snr_db: float, bits: Bits = math.inf,
                 tau: int | None = None, d=None) -> "SystemConfig":
        """Common-power scenario: ``p_p = p_u = 10**(snr_db/10)`` and ``tau = K`` by default."""
        p = 10.0 ** (snr_db / 10.0)
        return cls(M=M, K=K, tau=K if tau is None else tau, p_p=p, p_u=p, d=d, bits=bits)

    @property
    def d_array(self) -> np.ndarray:
        return np.asarray(self.d, dtype=float)

    @property
    def sum_d(self) -> float:
        return math.fsum(self.d)

    @property
    def equal_fading(self) -> bool:
        return len(set(self.d)) == 1

    def quantizer(self) -> QuantizerModel:
        return QuantizerModel.for_bits(self.bits)

    def with_(self, **changes) -> "SystemConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class ChannelRealization:
    G: np.ndarray = field(repr=False)
    seed_tag: int

    def __post_init__(self):
        self.G.setflags(write=False)


def trial_rng(base_seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for trial ``index`` of a run seeded with ``base_seed``.

    ``stream`` separates the random inputs drawn within one trial (channel,
    pilot noise, ...), so that changing how much one consumer draws does not
    shift the others.
    """
    return np.random.default_rng(np.random.SeedSequence([base_seed, index, stream]))


def complex_normal(rng: np.random.Generator, shape, var: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with per-entry variance ``var``."""
    s = math.sqrt(var / 2.0)
    return s * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_channel(cfg: SystemConfig, seed: int | np.random.Generator) -> ChannelRealization:
    """Draw ``G = H D^{1/2}`` with i.i.d. CN(0, 1) entries in ``H``."""
    if isinstance(seed, np.random.Generator):
        rng, tag = seed, -1
    else:
        rng, tag = np.random.default_rng(seed), int(seed)
    H = complex_normal(rng, (cfg.M, cfg.K))
    G = H * np.sqrt(cfg.d_array)[None, :]
    return ChannelRealization(G=G, seed_tag=tag)


def gram_diag_mean(G: np.ndarray) -> float:
    """Mean of ``diag(G G^H)``, i.e. the average squared row norm."""
    G = np.asarray(G)
    if G.size == 0:
        return 0.0
    return float(np.mean(np.sum(np.abs(G) ** 2, axis=1)))
