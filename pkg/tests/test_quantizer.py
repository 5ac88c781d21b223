import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lowres_mimo.errors import ParameterError
from lowres_mimo.quantizer import (
    INF_BITS,
    QuantizerModel,
    agc_gain,
    aqnm_noise_covariance_diag,
    aqnm_noise_variance_approx,
    build_scalar_quantizer,
    distortion_factor,
    parse_bits,
    quantize_exact,
)

from oracles import lloyd_max_quad

# frozen from oracles.lloyd_max_quad (adaptive quadrature, plain Lloyd alternation)
ALPHA_ORACLE = {1: 0.36338022763241973, 2: 0.11748184782932927, 3: 0.034547760788503745}


def test_one_bit_closed_form():
    assert distortion_factor(1) == pytest.approx(1 - 2 / math.pi, abs=1e-14)
    q = build_scalar_quantizer(1)
    np.testing.assert_array_equal(q.thresholds, [0.0])
    np.testing.assert_allclose(q.levels, [-math.sqrt(2 / math.pi), math.sqrt(2 / math.pi)], rtol=1e-14)


@pytest.mark.parametrize("bits", [1, 2, 3])
def test_alpha_matches_quadrature_oracle(bits):
    assert distortion_factor(bits) == pytest.approx(ALPHA_ORACLE[bits], abs=1e-10)
    assert f"{distortion_factor(bits):.4g}" == f"{ALPHA_ORACLE[bits]:.4g}"


def test_oracle_levels_agree():
    t, lv, _ = lloyd_max_quad(2)
    q = build_scalar_quantizer(2)
    np.testing.assert_allclose(q.thresholds, t, atol=1e-8)
    np.testing.assert_allclose(q.levels, lv, atol=1e-8)


def test_alpha_strictly_decreasing():
    alphas = [distortion_factor(b) for b in range(1, 6)]
    assert all(a > b for a, b in zip(alphas, alphas[1:]))


@pytest.mark.parametrize("bits", range(1, 13))
def test_quantizer_structure(bits):
    q = build_scalar_quantizer(bits)
    n = 2 ** bits
    assert q.thresholds.shape == (n - 1,) and q.levels.shape == (n,)
    assert np.all(np.diff(q.thresholds) > 0) and np.all(np.diff(q.levels) > 0)
    # each level lies strictly inside its cell
    edges = np.concatenate(([-np.inf], q.thresholds, [np.inf]))
    assert np.all(q.levels > edges[:-1]) and np.all(q.levels < edges[1:])
    np.testing.assert_allclose(q.levels, -q.levels[::-1], atol=1e-12)
    # nearest-neighbour condition
    np.testing.assert_allclose(q.thresholds, 0.5 * (q.levels[:-1] + q.levels[1:]), atol=1e-8)
    assert q.mse == pytest.approx(distortion_factor(bits), abs=1e-6)


def test_high_resolution_panter_dite():
    # alpha * 4^b -> sqrt(3) pi / 2 as bits grow
    assert distortion_factor(12) * 4 ** 12 == pytest.approx(math.sqrt(3) * math.pi / 2, rel=0.01)


@pytest.mark.parametrize("bits", [0, 13, -1, 2.5])
def test_bits_out_of_range(bits):
    with pytest.raises(ParameterError):
        distortion_factor(bits)


def test_model_for_bits():
    q = QuantizerModel.for_bits(INF_BITS)
    assert (q.alpha, q.kappa) == (0.0, 1.0)
    for b in (1, 2, 3, 4, 5):
        q = QuantizerModel.for_bits(b)
        assert q.kappa == 1.0 - q.alpha
    assert parse_bits("inf") == INF_BITS and parse_bits(" 3 ") == 3
    with pytest.raises(ParameterError):
        parse_bits("x")


@pytest.mark.parametrize("bits", [1, 2, 3])
def test_monte_carlo_mse(bits):
    rng = np.random.default_rng(7)
    x = rng.standard_normal(1_000_000)
    q = build_scalar_quantizer(bits)
    assert np.mean((q(x) - x) ** 2) == pytest.approx(distortion_factor(bits), abs=1e-3)


def test_quantize_zero_and_signs():
    q1 = build_scalar_quantizer(1)
    c = math.sqrt(2 / math.pi)
    out = quantize_exact(np.zeros(3, complex), q1, 2.0)
    np.testing.assert_allclose(out, 2.0 * c * (1 + 1j))
    assert quantize_exact(np.array([3 + 4j]), q1, 1.0)[0] == pytest.approx(c + 1j * c)
    assert quantize_exact(np.array([-3 + 4j]), q1, 1.0)[0] == pytest.approx(-c + 1j * c)
    with pytest.raises(ParameterError):
        quantize_exact(np.zeros(1, complex), q1, 0.0)


def test_twelve_bits_is_nearly_transparent():
    rng = np.random.default_rng(1)
    gain = 1.7
    y = gain * (rng.uniform(-3, 3, 5000) + 1j * rng.uniform(-3, 3, 5000))
    out = quantize_exact(y, build_scalar_quantizer(12), gain)
    assert np.max(np.abs(out.real - y.real)) < 0.01 * gain
    assert np.max(np.abs(out.imag - y.imag)) < 0.01 * gain


@pytest.mark.parametrize("bits", [1, 2, 3])
def test_aqnm_moments(bits):
    """Linear gain of the exact quantizer is kappa; residual power is alpha*kappa*E|y|^2."""
    rng = np.random.default_rng(11 + bits)
    n = 400_000
    var = 3.0
    y = np.sqrt(var / 2) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    z = quantize_exact(y, build_scalar_quantizer(bits), agc_gain(var - 1.0, 1.0))
    qm = QuantizerModel.for_bits(bits)
    gain = np.vdot(y, z).real / np.vdot(y, y).real
    assert gain == pytest.approx(qm.kappa, abs=1e-2)
    resid = z - qm.kappa * y
    assert np.mean(np.abs(resid) ** 2) == pytest.approx(qm.alpha * qm.kappa * var, rel=0.05)


def test_noise_covariance_examples():
    G = np.array([[1.0 + 0j]])
    q1 = QuantizerModel.for_bits(1)
    # hand evaluation: alpha*kappa*(1*1 + 1)
    assert aqnm_noise_covariance_diag(G, 1.0, q1)[0] == pytest.approx(0.4626700755964605, rel=1e-12)
    np.testing.assert_array_equal(
        aqnm_noise_covariance_diag(np.ones((4, 2)), 3.0, QuantizerModel.for_bits(INF_BITS)), 0.0)
    q2 = QuantizerModel.for_bits(2)
    np.testing.assert_allclose(aqnm_noise_covariance_diag(np.zeros((5, 3)), 2.0, q2),
                               q2.alpha * q2.kappa)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.floats(0.1, 10), st.integers(0, 2**31))
def test_noise_covariance_bounds_and_linearity(bits, p, seed):
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3))
    q = QuantizerModel.for_bits(bits)
    base = q.alpha * q.kappa
    d1 = aqnm_noise_covariance_diag(G, p, q)
    d2 = aqnm_noise_covariance_diag(G, 2 * p, q)
    assert np.all(d1 >= base)
    np.testing.assert_allclose(d2 - base, 2 * (d1 - base), rtol=1e-12)


def test_noise_variance_approx():
    assert aqnm_noise_variance_approx(50, 1.0) == 51
    assert aqnm_noise_variance_approx(50, 0.0) == 1.0


def test_noise_variance_approx_concentrates():
    rng = np.random.default_rng(3)
    M, K = 64, 16
    q = QuantizerModel.for_bits(2)
    means = []
    for _ in range(100):
        G = (rng.standard_normal((M, K)) + 1j * rng.standard_normal((M, K))) / math.sqrt(2)
        means.append(np.mean(aqnm_noise_covariance_diag(G, 1.0, q)) / (q.alpha * q.kappa))
    assert np.mean(means) == pytest.approx(aqnm_noise_variance_approx(K, 1.0), rel=0.05)
