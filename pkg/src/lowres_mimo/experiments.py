"""Experiment recipes behind the command-line tool, and their table output."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .asymptotics import ASYMPTOTIC_METHODS
from .channel import SystemConfig, complex_normal, sample_channel, trial_rng
from .compensation import eta_sweep
from .errors import ParameterError
from .estimation import dft_pilots, lmmse_estimate
from .quantizer import (
    INF_BITS,
    Bits,
    QuantizerModel,
    agc_gain,
    aqnm_noise_covariance_diag,
    build_scalar_quantizer,
    format_bits,
    quantize_exact,
    validate_bits,
)
from .receiver import (
    Method,
    NoiseMode,
    effective_noise,
    map_ordered,
    mmse_receiver,
    monte_carlo_rate,
    sinr_per_user,
)

RATE_COLUMNS = ("snr_db", "bits", "method", "m", "k", "tau", "trials", "seed", "avg_rate", "stderr")
COMPENSATION_COLUMNS = ("snr_db", "bits", "m_conv", "k", "m_low", "eta", "attainable")
VALIDATION_COLUMNS = ("snr_db", "bits", "m", "k", "tau", "trials", "seed",
                      "exact_rate", "aqnm_rate", "analytic_rate", "rel_gap")
ALPHA_COLUMNS = ("bits", "alpha", "kappa")

VALIDATION_MAX_M = 64


def frange(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic grid; ``stop`` is included when it lies on the grid."""
    if step <= 0:
        raise ParameterError("grid step must be positive")
    if stop < start:
        raise ParameterError("grid stop must not be below start")
    n = int(math.floor((stop - start) / step + 1e-9))
    return [start + i * step for i in range(n + 1)]


@dataclass
class SweepSpec:
    """Parameters of one experiment run; defaults follow the reference scenario."""

    snr_grid: Sequence[float] = field(default_factory=lambda: frange(-20, 20, 5))
    m_grid: Sequence[int] = field(default_factory=lambda: list(range(50, 501, 25)))
    bits: Sequence[Bits] = (1, 2, 3, INF_BITS)
    M: int = 100
    K: int = 50
    tau: int | None = None
    trials: int = 500
    seed: int = 0
    methods: Sequence[Method] = (Method.MONTE_CARLO, Method.PROP1)
    mode: NoiseMode = NoiseMode.APPROX_DIAGONAL
    M_max: int | None = None
    workers: int = 1
    n_symbols: int = 2000

    def __post_init__(self):
        self.bits = tuple(validate_bits(b) for b in self.bits)
        self.methods = tuple(Method(m) for m in self.methods)
        if self.tau is None:
            self.tau = self.K
        if not self.bits:
            raise ParameterError("bits list is empty")
        if not self.snr_grid or not self.m_grid:
            raise ParameterError("grids must be nonempty")
        if self.tau < self.K:
            raise ParameterError(f"tau={self.tau} must be >= K={self.K}")
        if Method.MONTE_CARLO in self.methods and self.trials < 1:
            raise ParameterError("trials must be >= 1 for Monte-Carlo")


def _rate_rows(spec: SweepSpec, cfg: SystemConfig, snr_db: float) -> list[dict]:
    q = cfg.quantizer()
    rows = []
    for method in spec.methods:
        if method is Method.MONTE_CARLO:
            res = monte_carlo_rate(cfg, spec.trials, spec.seed, spec.mode, q, workers=spec.workers)
        elif method is Method.REMARK2 and q.is_ideal:
            continue  # the high-power limit is only defined for finite resolution
        else:
            res = ASYMPTOTIC_METHODS[method](cfg, q)
        rows.append(dict(snr_db=snr_db, bits=cfg.bits, method=method.value, m=cfg.M, k=cfg.K,
                         tau=cfg.tau, trials=res.trials, seed=spec.seed, avg_rate=res.average,
                         stderr=res.stderr))
    return rows


def run_rate_vs_snr(spec: SweepSpec) -> list[dict]:
    rows = []
    for snr in spec.snr_grid:
        for bits in spec.bits:
            cfg = SystemConfig.from_snr(spec.M, spec.K, snr, bits=bits, tau=spec.tau)
            rows.extend(_rate_rows(spec, cfg, snr))
    return rows


def run_rate_vs_antennas(spec: SweepSpec, snr_db: float = 0.0) -> list[dict]:
    rows = []
    for M in spec.m_grid:
        for bits in spec.bits:
            cfg = SystemConfig.from_snr(int(M), spec.K, snr_db, bits=bits, tau=spec.tau)
            rows.extend(_rate_rows(spec, cfg, snr_db))
    return rows


def run_compensation(spec: SweepSpec) -> list[dict]:
    table = eta_sweep(spec.M, spec.K, spec.bits, spec.snr_grid, spec.M_max, workers=spec.workers)
    return [dict(snr_db=r.snr_db, bits=r.bits, m_conv=r.M_conv, k=r.K, m_low=r.M_low,
                 eta=r.eta if r.attainable else None, attainable=r.attainable) for r in table]


def alpha_table(bits_list: Iterable[int] = range(1, 6)) -> list[dict]:
    rows = []
    for b in bits_list:
        q = QuantizerModel.for_bits(b)
        rows.append(dict(bits=q.bits, alpha=q.alpha, kappa=q.kappa))
    return rows


# --- AQNM validation --------------------------------------------------------

def _empirical_rate(xhat: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Per-user ``log2(1 + SINR)`` from the best linear fit of ``xhat`` on ``x``."""
    px = np.sum(np.abs(x) ** 2, axis=1)
    beta = np.sum(xhat * x.conj(), axis=1) / px
    err = xhat - beta[:, None] * x
    sinr = np.abs(beta) ** 2 * px / np.sum(np.abs(err) ** 2, axis=1)
    return np.log2(1.0 + sinr)


def validation_trial(cfg: SystemConfig, base_seed: int, index: int, n_symbols: int,
                     q: QuantizerModel | None = None):
    """One block with the exact quantizer and the same block under AQNM.

    Both paths share the channel, thermal noise and data symbols; only the
    ADC differs.  Returns per-user rates ``(exact, aqnm, analytic)`` where
    ``analytic`` is the exact-diagonal SINR formula on the AQNM estimate.
    """
    q = cfg.quantizer() if q is None else q
    F = dft_pilots(cfg.tau, cfg.K).F
    G = sample_channel(cfg, trial_rng(base_seed, index, 0)).G
    rng_noise = trial_rng(base_seed, index, 1)
    N_p = complex_normal(rng_noise, (cfg.M, cfg.tau))
    x = complex_normal(rng_noise, (cfg.K, n_symbols))
    n_u = complex_normal(rng_noise, (cfg.M, n_symbols))
    Y_p = math.sqrt(cfg.p_p) * (G @ F.T) + N_p
    Y_u = math.sqrt(cfg.p_u) * (G @ x) + n_u

    if q.is_ideal:
        Zp_exact, Zu_exact = Y_p, Y_u
        Zp_aqnm, Zu_aqnm = Y_p, Y_u
    else:
        sq = build_scalar_quantizer(int(q.bits))
        Zp_exact = quantize_exact(Y_p, sq, agc_gain(cfg.p_p, cfg.sum_d))
        Zu_exact = quantize_exact(Y_u, sq, agc_gain(cfg.p_u, cfg.sum_d))
        rng_q = trial_rng(base_seed, index, 2)
        var_p = q.alpha * q.kappa * (cfg.p_p * cfg.sum_d + 1.0)
        Zp_aqnm = q.kappa * Y_p + complex_normal(rng_q, Y_p.shape, var_p)
        var_u = aqnm_noise_covariance_diag(G, cfg.p_u, q)
        Zu_aqnm = q.kappa * Y_u + np.sqrt(var_u)[:, None] * complex_normal(rng_q, Y_u.shape)

    rates = []
    for Zp, Zu in ((Zp_exact, Zu_exact), (Zp_aqnm, Zu_aqnm)):
        est = lmmse_estimate(Zp, F, cfg, q)
        noise = effective_noise(cfg, est, q)
        R = mmse_receiver(est.Ghat, noise.theta)
        rates.append(_empirical_rate(R.conj().T @ Zu, x))
    noise = effective_noise(cfg, est, q, NoiseMode.EXACT_DIAGONAL)
    analytic = np.log2(1.0 + sinr_per_user(est.Ghat, est, noise, G_true=G))
    return rates[0], rates[1], analytic


def run_validate_aqnm(spec: SweepSpec, snr_db: float | None = None) -> list[dict]:
    """Exact-quantizer vs AQNM end-to-end rates, one row per bit depth."""
    if spec.M > VALIDATION_MAX_M:
        raise ParameterError(f"validate-aqnm is limited to M <= {VALIDATION_MAX_M} (got {spec.M})")
    if spec.trials < 1:
        raise ParameterError("trials must be >= 1")
    snr = 0.0 if snr_db is None else snr_db

    rows = []
    for bits in spec.bits:
        cfg = SystemConfig.from_snr(spec.M, spec.K, snr, bits=bits, tau=spec.tau)
        q = cfg.quantizer()
        out = map_ordered(lambda i: validation_trial(cfg, spec.seed, i, spec.n_symbols, q),
                          range(spec.trials), spec.workers)
        exact, aqnm, analytic = (math.fsum(np.mean(o[j]) for o in out) / spec.trials for j in range(3))
        rows.append(dict(snr_db=snr, bits=bits, m=cfg.M, k=cfg.K, tau=cfg.tau, trials=spec.trials,
                         seed=spec.seed, exact_rate=exact, aqnm_rate=aqnm, analytic_rate=analytic,
                         rel_gap=abs(exact - aqnm) / aqnm))
    return rows


# --- output -----------------------------------------------------------------

def _fmt(key: str, value) -> str:
    if value is None:
        return ""
    if key == "bits":
        return format_bits(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    if key == "snr_db":
        return f"{value:g}"
    return f"{value:.6g}"


def _json_value(key: str, value):
    if value is None or isinstance(value, (bool, str)):
        return value
    if key == "bits":
        return format_bits(value) if math.isinf(value) else int(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    v = float(f"{value:.6g}")
    return v if math.isfinite(v) else None


def render(rows: list[dict], columns: Sequence[str], fmt: str = "csv") -> str:
    """Serialize rows in a fixed column order (CSV with header, or a JSON array)."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(c, r.get(c)) for c in columns])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([{c: _json_value(c, r.get(c)) for c in columns} for r in rows], indent=2) + "\n"
    raise ParameterError(f"unknown output format {fmt!r}")
