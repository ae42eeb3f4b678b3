import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate
from scipy.special import gammaln

from kerrparity.analytic import (
    BiasedProjection,
    DephasingChannel,
    GateParams,
    LossParams,
    ModeOverlapParams,
    SelfKerrParams,
    coherent_fock_amplitudes,
    default_cutoff,
    gaussian_mode_overlap,
    gaussian_offset_for_overlap,
    loss_dephasing,
    loss_gamma,
    loss_gamma_small_theta,
    loss_product_threshold,
    loss_threshold,
    mismatch_dephasing,
    mismatch_lambda,
    mode_mismatch_error,
    postselect_error_point,
    postselect_error_window,
    self_kerr_error,
    self_kerr_gamma,
    separation_d,
)
from kerrparity.errors import NumericalError, UsageError
from kerrparity.numerics import NORMALIZED, PAPER, quadrature_amplitude

# ---------------------------------------------------------------- post-selection


def test_point_error_at_zero_separation_is_half():
    assert postselect_error_point(0.0, PAPER) == 0.5
    assert postselect_error_point(0.0, NORMALIZED) == 0.5


@given(st.floats(0, 30))
def test_point_conventions_related_by_rescaled_separation(d):
    assert postselect_error_point(d, NORMALIZED) == pytest.approx(postselect_error_point(d / math.sqrt(2), PAPER), rel=1e-12)


@given(st.floats(0, 10), st.floats(0, 10))
def test_point_error_decreases_with_separation(d1, d2):
    lo, hi = min(d1, d2), max(d1, d2)
    for conv in (PAPER, NORMALIZED):
        assert postselect_error_point(hi, conv) <= postselect_error_point(lo, conv)


def test_separation():
    assert separation_d(10.0, math.pi / 6) == pytest.approx(10.0)


def _gauss_window(x0, centre):
    val, _ = sp_integrate.quad(lambda p: math.exp(-((p - centre) ** 2)) / math.sqrt(math.pi), -x0, x0, epsabs=1e-14, epsrel=1e-13)
    return val


@pytest.mark.parametrize("x0", [0.05, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("d", [0.3, 1.0, 2.5, 4.0])
def test_window_normalized_matches_gaussian_integrals(x0, d):
    # conditional outcome densities of the normalised convention are unit Gaussians centred at 0 and +-d/sqrt(2)
    c = d / math.sqrt(2)
    odd = _gauss_window(x0, c) + _gauss_window(x0, -c)
    even = 2 * _gauss_window(x0, 0.0)
    assert postselect_error_window(x0, d, NORMALIZED) == pytest.approx(odd / (odd + even), rel=1e-9)


@pytest.mark.parametrize("x0,d", [(0.1, 0.5), (1.0, 1.0), (2.0, 4.0), (0.5, 6.0)])
def test_window_paper_matches_erf_expression(x0, d):
    num = math.erf(x0 + d) + math.erf(x0 - d)
    assert postselect_error_window(x0, d, PAPER) == pytest.approx(num / (2 * math.erf(x0) + num), rel=1e-12)


@given(st.floats(0.01, 3), st.floats(0.01, 3), st.floats(0, 5))
def test_window_error_grows_with_width(a, b, d):
    lo, hi = min(a, b), max(a, b)
    assert postselect_error_window(lo, d) <= postselect_error_window(hi, d) * (1 + 1e-12)


def test_window_cancellation_free_for_large_separation():
    v = postselect_error_window(0.5, 12.0)
    assert 0.0 < v < 1e-50


def test_window_rejects_zero_and_negative_width():
    with pytest.raises(UsageError):
        postselect_error_window(0.0, 1.0)
    with pytest.raises(UsageError):
        postselect_error_window(-1.0, 1.0)
    with pytest.raises(UsageError):
        postselect_error_point(-1.0)


# ---------------------------------------------------------------- loss


@given(st.floats(0, 200), st.floats(0, 0.05), st.floats(0, 1))
def test_loss_small_theta_form_close(alpha, theta, ep):
    assert loss_gamma(alpha, theta, ep) == pytest.approx(loss_gamma_small_theta(alpha, theta, ep), abs=(alpha * ep) ** 2 * theta**4 / 24 + 1e-15)


@given(st.floats(0, 50), st.floats(-3, 3), st.floats(0, 1))
def test_loss_gamma_bounded(alpha, theta, ep):
    g = loss_gamma(alpha, theta, ep)
    assert 0.0 <= g <= 1.0
    assert 0.0 <= loss_dephasing(g).p_flip <= 0.5


def test_loss_gamma_equals_coherent_overlap_modulus():
    alpha, theta, ep = 30.0, 0.05, 0.2
    a = ep * alpha
    overlap = cmath.exp(-abs(a) ** 2 + a * a * cmath.exp(1j * theta))
    assert loss_gamma(alpha, theta, ep) == pytest.approx(abs(overlap), rel=1e-12)


def test_loss_product_threshold_value():
    assert loss_product_threshold(0.01) == pytest.approx(math.sqrt(-2 * math.log(0.98)), rel=1e-15)
    assert loss_product_threshold(0.01) == pytest.approx(0.20101, abs=1e-5)


def test_loss_threshold_worked_example():
    res = loss_threshold(107.2, 0.01, 0.01)
    assert not res.saturated
    assert res.loss_fraction == pytest.approx(0.03516, abs=1e-4)
    assert loss_gamma_small_theta(107.2, 0.01, res.eta_prime) == pytest.approx(0.98, rel=1e-12)


def test_loss_threshold_saturates():
    res = loss_threshold(1.0, 0.01, 0.01)
    assert res.saturated and res.eta_prime == 1.0


def test_loss_params_validation():
    assert LossParams(0.6).eta == pytest.approx(0.8)
    with pytest.raises(UsageError):
        LossParams(1.2)
    with pytest.raises(UsageError):
        loss_product_threshold(0.5)


# ---------------------------------------------------------------- mismatch


def test_mismatch_lambda_conventions():
    assert mismatch_lambda(1.3, 0.4, PAPER) == pytest.approx(cmath.exp(1.69 * (cmath.exp(0.8j) - 1)))
    assert mismatch_lambda(1.3, 0.4, NORMALIZED) == pytest.approx(cmath.exp(0.845 * (cmath.exp(0.8j) - 1)))


@pytest.mark.parametrize("conv", [PAPER, NORMALIZED])
@pytest.mark.parametrize("alpha,delta0", [(0.5, 0.2), (1.0, 0.64), (2.0, 0.8)])
def test_mismatch_against_scipy(conv, alpha, delta0):
    k = 1.0 if conv is PAPER else 0.5
    lam = lambda t: np.exp(k * alpha**2 * (np.exp(2j * t) - 1))
    mean_re, _ = sp_integrate.quad(lambda t: lam(t).real, -delta0, delta0, epsabs=1e-14)
    mean_abs2, _ = sp_integrate.quad(lambda t: abs(lam(t)) ** 2, -delta0, delta0, epsabs=1e-14)
    mean_re /= 2 * delta0
    mean_abs2 /= 2 * delta0
    r = mismatch_dephasing(alpha, delta0, conv)
    assert r.mu == pytest.approx(math.sqrt(mean_abs2), abs=1e-10)
    assert r.p == pytest.approx(0.5 * (1 - mean_re / math.sqrt(mean_abs2)), abs=1e-10)
    assert r.mu_printed == pytest.approx(math.sqrt(mean_abs2 * 2 * delta0) / (2 * delta0), abs=1e-10)
    assert isinstance(r.mean_lambda, float)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 3), st.floats(0.01, 1.5))
def test_mismatch_identity_and_ranges(alpha, delta0):
    for conv in (PAPER, NORMALIZED):
        r = mismatch_dephasing(alpha, delta0, conv)
        assert 1 - 2 * r.p == pytest.approx(r.mean_lambda / r.mu, abs=1e-12)
        assert r.p >= -1e-12
        assert 0.0 < r.mu <= 1.0 + 1e-12


def test_mismatch_zero_width():
    r = mismatch_dephasing(2.0, 0.0)
    assert (r.p, r.mu) == (0.0, 1.0)


def test_mismatch_printed_mu_equals_rms_only_at_half():
    r = mismatch_dephasing(1.0, 0.5)
    assert r.mu_printed == pytest.approx(r.mu, rel=1e-12)
    r = mismatch_dephasing(1.0, 0.2)
    assert abs(r.mu_printed - r.mu) > 0.1


# ---------------------------------------------------------------- mode mismatch


def test_mode_mismatch_limits():
    assert mode_mismatch_error(ModeOverlapParams(1.0, 1.0)) == 0.0
    assert mode_mismatch_error(ModeOverlapParams(0.0, 0.0)) == 1.0


@given(st.floats(0, 1), st.floats(0, 1))
def test_mode_mismatch_symmetric_and_bounded(a, b):
    p = mode_mismatch_error(ModeOverlapParams(a, b))
    assert p == pytest.approx(mode_mismatch_error(ModeOverlapParams(b, a)), abs=1e-15)
    assert 0.0 <= p <= 1.0


@given(st.floats(0.01, 1), st.floats(0.01, 1))
def test_mode_mismatch_decreases_with_overlap(x, y):
    lo, hi = min(x, y), max(x, y)
    assert mode_mismatch_error(ModeOverlapParams(hi, hi)) <= mode_mismatch_error(ModeOverlapParams(lo, lo)) + 1e-15


def test_mode_mismatch_printed_level():
    p = mode_mismatch_error(ModeOverlapParams(0.995, 0.995))
    # (1 - l^2)^2 + 2 (1 - l^2) + (1 - l^2)^2 over 2 l^4 plus the same
    l2 = 0.995**2
    rest = (1 - l2) ** 2 + 2 * (1 - l2) + (1 - l2) ** 2
    assert p == pytest.approx(rest / (2 * l2**2 + rest), rel=1e-14)
    assert p == pytest.approx(0.010174, abs=1e-6)


@given(st.floats(0.001, 0.999), st.floats(0.1, 10))
def test_gaussian_overlap_roundtrip(overlap, sigma):
    assert gaussian_mode_overlap(gaussian_offset_for_overlap(overlap, sigma), sigma) == pytest.approx(overlap, rel=1e-12)


def test_gaussian_overlap_matches_integral():
    sigma, dt = 1.3, 0.7
    f = lambda t: (math.pi * sigma**2) ** -0.5 * math.exp(-(t**2) / (2 * sigma**2) - (t - dt) ** 2 / (2 * sigma**2))
    val, _ = sp_integrate.quad(f, -40, 40)
    assert gaussian_mode_overlap(dt, sigma) == pytest.approx(val, rel=1e-10)
    assert gaussian_mode_overlap(2 * sigma, sigma) == pytest.approx(math.exp(-1))


# ---------------------------------------------------------------- self-Kerr


def test_coherent_fock_amplitudes_against_direct_formula():
    beta = 3.0 * cmath.exp(0.3j)
    amps = coherent_fock_amplitudes(beta, 60)
    n = np.arange(61)
    ref = np.exp(-abs(beta) ** 2 / 2 + n * math.log(abs(beta)) - 0.5 * gammaln(n + 1)) * np.exp(0.3j * n)
    assert np.allclose(amps, ref, rtol=1e-12, atol=1e-300)
    assert np.sum(np.abs(amps) ** 2) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p,alpha,theta", [(0.0, 2.0, 0.1), (0.7, 4.0, -0.3), (-1.2, 5.0, 1.0), (2.0, 0.0, 0.0)])
def test_self_kerr_gamma_reduces_to_normalized_amplitude(p, alpha, theta):
    val = self_kerr_gamma(p, alpha, theta, SelfKerrParams(0.0))
    ref = quadrature_amplitude(p, alpha * cmath.exp(1j * theta), NORMALIZED)
    assert val == pytest.approx(ref, abs=1e-12)


def test_self_kerr_phase_periodic():
    a = self_kerr_error(3.0, 0.2, SelfKerrParams(0.0))
    b = self_kerr_error(3.0, 0.2, SelfKerrParams(2 * math.pi))
    assert a == pytest.approx(b, abs=1e-10)


def test_self_kerr_passes_scale_the_phase():
    one = self_kerr_error(2.0, 0.1, SelfKerrParams(0.02, passes=2))
    two = self_kerr_error(2.0, 0.1, SelfKerrParams(0.04, passes=1))
    assert one == pytest.approx(two, abs=1e-14)


def test_self_kerr_small_cutoff_raises():
    with pytest.raises(NumericalError) as info:
        self_kerr_gamma(0.0, 5.0, 0.1, SelfKerrParams(0.0, n_cutoff=10))
    assert info.value.estimate is not None


def test_default_cutoff_tail():
    for alpha in (1.0, 4.0, 8.0):
        amps = coherent_fock_amplitudes(alpha, default_cutoff(alpha))
        assert np.abs(amps[-1]) ** 2 < 1e-15


# ---------------------------------------------------------------- parameter records


def test_dephasing_channel_apply():
    psi = np.array([1, 0, 0, 1]) / math.sqrt(2)
    rho = np.outer(psi, psi)
    out = DephasingChannel(0.5).apply(rho)
    assert np.trace(out) == pytest.approx(1.0)
    assert abs(out[0, 3]) < 1e-15
    out = DephasingChannel(0.1).apply(rho)
    assert out[0, 3] == pytest.approx(0.4)
    with pytest.raises(UsageError):
        DephasingChannel(0.6)


def test_param_validation():
    assert GateParams(10.0, 0.1, 0.08).delta == pytest.approx(0.02)
    with pytest.raises(UsageError):
        GateParams(-1.0, 0.1, 0.1)
    with pytest.raises(UsageError):
        GateParams(1.0, 4.0, 0.1)
    with pytest.raises(UsageError):
        ModeOverlapParams(1.1, 0.5)
    with pytest.raises(UsageError):
        BiasedProjection(-0.1)
    assert ModeOverlapParams(0.6, 0.8).lambda0_a == pytest.approx(0.8)
