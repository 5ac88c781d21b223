"""Uplink rates of massive MIMO with low-resolution ADCs and a quantization-aware MMSE receiver."""

from .asymptotics import (
    AsymptoticState,
    StieltjesPair,
    asymptotic_state,
    lambda_param,
    prop1_rate,
    remark1_rate,
    remark2_rate,
    resolvent_sinr,
    solve_psi,
    stieltjes_a,
    stieltjes_b,
    theorem1_rate,
)
from .channel import ChannelRealization, SystemConfig, gram_diag_mean, sample_channel
from .compensation import CompensationQuery, CompensationResult, eta_sweep, min_antennas
from .errors import NumericalError, ParameterError
from .estimation import (
    ChannelEstimate,
    PilotMatrix,
    dft_pilots,
    error_variance,
    estimate_variance,
    lmmse_estimate,
    quantized_pilot_signal,
)
from .quantizer import (
    INF_BITS,
    QuantizerModel,
    ScalarQuantizer,
    aqnm_noise_covariance_diag,
    aqnm_noise_variance_approx,
    build_scalar_quantizer,
    distortion_factor,
    quantize_exact,
)
from .receiver import (
    EffectiveNoiseParams,
    Method,
    NoiseMode,
    RateResult,
    effective_noise,
    mmse_receiver,
    monte_carlo_rate,
    sinr_per_user,
)

__version__ = "0.1.0"

__all__ = [
    "AsymptoticState",
    "ChannelEstimate",
    "ChannelRealization",
    "CompensationQuery",
    "CompensationResult",
    "EffectiveNoiseParams",
    "INF_BITS",
    "Method",
    "NoiseMode",
    "NumericalError",
    "ParameterError",
    "PilotMatrix",
    "QuantizerModel",
    "RateResult",
    "ScalarQuantizer",
    "StieltjesPair",
    "SystemConfig",
    "aqnm_noise_covariance_diag",
    "aqnm_noise_variance_approx",
    "asymptotic_state",
    "build_scalar_quantizer",
    "dft_pilots",
    "distortion_factor",
    "effective_noise",
    "error_variance",
    "estimate_variance",
    "eta_sweep",
    "gram_diag_mean",
    "lambda_param",
    "lmmse_estimate",
    "min_antennas",
    "mmse_receiver",
    "monte_carlo_rate",
    "prop1_rate",
    "quantize_exact",
    "quantized_pilot_signal",
    "remark1_rate",
    "remark2_rate",
    "resolvent_sinr",
    "sample_channel",
    "sinr_per_user",
    "solve_psi",
    "stieltjes_a",
    "stieltjes_b",
    "theorem1_rate",
]
