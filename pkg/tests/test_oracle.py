import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kerrparity import oracle as orc
from kerrparity.analytic import (
    ModeOverlapParams,
    SelfKerrParams,
    mismatch_dephasing,
    mode_mismatch_error,
    postselect_error_point,
    postselect_error_window,
    self_kerr_error,
)
from kerrparity.errors import ConventionError, UsageError
from kerrparity.numerics import NORMALIZED, PAPER
from kerrparity.oracle.measure import K00, K11
from kerrparity.oracle.states import Level

Z, O, X = Level.ZERO, Level.ONE_MATCHED, Level.ONE_ORTHOGONAL
EQ = orc.EQUAL_COEFFICIENTS
IDEAL = orc.ideal_parity_density(EQ)

coeffs = st.tuples(*[st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False)] * 4).filter(
    lambda c: sum(abs(x) ** 2 for x in c) > 1e-3
)


def _normalize(c):
    n = math.sqrt(sum(abs(x) ** 2 for x in c))
    return tuple(x / n for x in c)


def _gate(alpha, theta, c=EQ):
    return orc.parity_gate(orc.prepare_input(c, alpha), theta)


@settings(max_examples=40, deadline=None)
@given(coeffs, st.floats(0.1, 6), st.floats(0.02, 1.0), st.floats(-2, 2), st.sampled_from([PAPER, NORMALIZED]), st.floats(0, 0.5))
def test_conditional_states_are_valid_densities(c, alpha, theta, p, conv, ep):
    c = _normalize(c)
    state = orc.parity_gate(orc.apply_loss(orc.apply_cross_kerr(orc.prepare_input(c, alpha), "A", theta), math.sqrt(1 - ep * ep)), 0.0, theta)
    out = orc.homodyne_point(state, p, conv)
    if out.probability < 1e-200:
        return
    rho = out.density
    assert rho.hermiticity_error() <= 1e-12
    assert rho.min_eigenvalue() >= -1e-10
    assert rho.trace == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("alpha,theta", [(1.0, 0.3), (2.5, 0.1), (4.0, 0.2)])
@pytest.mark.parametrize("p", [0.0, 0.8, -1.5])
def test_coherent_and_fock_backends_agree(alpha, theta, p):
    c = _normalize((0.3, 0.5j, -0.4, 0.6))
    state = _gate(alpha, theta, c)
    coh = orc.conditional_matrix(state, p, NORMALIZED)
    fock = orc.conditional_matrix(orc.to_fock(state), p, NORMALIZED)
    assert np.allclose(coh, fock, atol=1e-8, rtol=0)


def test_fock_backend_is_normalized_only():
    state = orc.to_fock(_gate(2.0, 0.1))
    with pytest.raises(ConventionError):
        orc.homodyne_point(state, 0.0, PAPER)


@pytest.mark.parametrize("conv", [PAPER, NORMALIZED])
@pytest.mark.parametrize("eta", [0.9, 0.5])
def test_loss_before_first_interaction_does_not_dephase(conv, eta):
    alpha, theta = 3.0, 0.2
    lossy = orc.parity_gate(orc.apply_loss(orc.prepare_input(EQ, alpha), eta), theta)
    clean = _gate(eta * alpha, theta)
    for p in (0.0, 0.4):
        a = orc.conditional_matrix(lossy, p, conv)
        b = orc.conditional_matrix(clean, p, conv)
        assert np.allclose(a, b, atol=1e-10, rtol=0)
    rho = orc.homodyne_point(lossy, 0.0, conv).density
    assert abs(orc.coherence_ratio(rho)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("alpha,theta,ep", [(3.0, 0.1, 0.3), (50.0, 0.01, 0.1), (1.0, 0.5, 0.6)])
def test_loss_phase_is_deterministic_and_correctable(alpha, theta, ep):
    state = orc.prepare_input(EQ, alpha)
    state = orc.apply_cross_kerr(state, "A", theta)
    state = orc.apply_loss(state, math.sqrt(1 - ep * ep))
    state = orc.apply_cross_kerr(state, "B", -theta)
    ratio = orc.coherence_ratio(orc.homodyne_point(state, 0.0, NORMALIZED).unnormalized)
    phase = -((ep * alpha) ** 2) * math.sin(theta)
    corrected = ratio * cmath.exp(-1j * phase)
    assert abs(corrected.imag) < 1e-12
    assert corrected.real == pytest.approx(math.exp((alpha * ep) ** 2 * (math.cos(theta) - 1)), rel=1e-9)


def test_loss_modes_traced_by_gram_matrix():
    state = orc.apply_loss(_gate(2.0, 0.3), 0.8)
    g = state.gram_matrix()
    assert np.allclose(g, g.conj().T)
    assert np.all(np.linalg.eigvalsh(g) > -1e-12)
    assert state.norm_squared() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("l1a,l1b", [(1.0, 1.0), (0.995, 0.995), (0.9, 0.7), (0.3, 1.0)])
def test_projector_weights_term_by_term(l1a, l1b):
    w = orc.projector_weights(l1a, l1b)
    l0a, l0b = math.sqrt(1 - l1a**2), math.sqrt(1 - l1b**2)
    expected = {
        (Z, Z): 1.0,
        (O, O): l1a * l1b,
        (Z, X): l0b,
        (X, Z): l0a,
        (X, X): l0a * l0b,
    }
    for (a, b), val in expected.items():
        assert w[orc.QubitBranchKey(a, b)] == pytest.approx(val, abs=1e-12)
    # matched odd-parity branches are displaced far from p = 0 at alpha = 10, theta = 0.6
    for key in [(Z, O), (O, Z), (X, O), (O, X)]:
        assert abs(w[orc.QubitBranchKey(*key)]) < 1e-12
    r = orc.regroup(w)
    assert r.residual_00 == pytest.approx(1 - l1a * l1b, abs=1e-12)
    assert r.error_probability == pytest.approx(mode_mismatch_error(ModeOverlapParams(l1a, l1b)), abs=1e-12)


def test_mode_mismatch_outcome_population_error():
    out = orc.mode_mismatch_outcome(0.995, 0.995)
    rep = orc.extract_report(out.unnormalized, IDEAL)
    assert 0.0099 < rep.parity_error < 0.0102
    traced = out.density.trace_mode_tags()
    assert traced.trace == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("conv", [PAPER, NORMALIZED])
@pytest.mark.parametrize("alpha,theta", [(1.0, 0.4), (3.0, 0.1), (110.0, 0.01)])
def test_point_postselection_matches_formula(conv, alpha, theta):
    rep = orc.extract_report(orc.homodyne_point(_gate(alpha, theta), 0.0, conv).unnormalized, IDEAL)
    d = 2 * alpha * math.sin(theta)
    assert rep.parity_error == pytest.approx(postselect_error_point(d, conv), abs=1e-12)
    assert rep.dephasing_p == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("x0,alpha,theta", [(0.3, 2.0, 0.3), (1.0, 4.0, 0.25), (2.0, 10.0, 0.1)])
def test_window_postselection_matches_normalized_formula(x0, alpha, theta):
    out = orc.homodyne_window(_gate(alpha, theta), x0, NORMALIZED)
    rep = orc.extract_report(out.unnormalized, IDEAL)
    d = 2 * alpha * math.sin(theta)
    assert rep.parity_error == pytest.approx(postselect_error_window(x0, d, NORMALIZED), abs=1e-8)
    assert 0.0 < out.probability <= 1.0


def test_ideal_limit_fidelity():
    rep = orc.extract_report(orc.homodyne_point(_gate(20.0, 0.5), 0.0).unnormalized, IDEAL)
    assert rep.fidelity_ideal == pytest.approx(1.0, abs=1e-12)
    assert rep.bias_mu == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("alpha,theta,lam", [(2.0, 0.1, 0.01), (3.0, 0.05, 0.02)])
def test_fock_self_kerr_matches_series(alpha, theta, lam):
    state = orc.apply_self_kerr(orc.to_fock(_gate(alpha, theta)), lam, passes=2)
    rep = orc.extract_report(orc.homodyne_point(state, 0.0).unnormalized, IDEAL)
    assert rep.parity_error == pytest.approx(self_kerr_error(alpha, theta, SelfKerrParams(lam, passes=2)), abs=1e-10)


def test_mismatch_mixture_reads_back_analytic_parameters():
    for conv in (PAPER, NORMALIZED):
        mix = orc.mixture_over_delta(1.0, 0.5, conv=conv)
        p, mu = orc.mixture_dephasing(mix)
        r = mismatch_dephasing(1.0, 0.5, conv)
        assert p == pytest.approx(r.p, abs=1e-9)
        assert mu == pytest.approx(r.mu, abs=1e-9)
        assert orc.reconstruction_residual(mix, r.p, r.mu) < 1e-8


def test_usage_errors():
    with pytest.raises(UsageError):
        orc.prepare_input((1, 1, 0, 0), 1.0)
    with pytest.raises(UsageError):
        orc.to_fock(_gate(9.0, 0.1))
    with pytest.raises(UsageError):
        orc.apply_loss(orc.to_fock(_gate(1.0, 0.1)), 0.5)
    with pytest.raises(UsageError):
        orc.apply_self_kerr(_gate(1.0, 0.1), 0.01)
    with pytest.raises(UsageError):
        orc.mixture_over_delta(1.0, 0.5, n_grid=100)
    with pytest.raises(UsageError):
        orc.homodyne_window(_gate(1.0, 0.1), 0.0)
    with pytest.raises(UsageError):
        orc.apply_cross_kerr(orc.prepare_input(EQ, 1.0), "A", 0.1, overlap=1.5)


def test_density_keys_and_embedding():
    rho = orc.homodyne_point(orc.mode_mismatch_state(0.9, 0.8, 3.0, 0.3), 0.0).density
    assert rho.population(K00) > 0 and rho.population(K11) > 0
    ideal = IDEAL.embed(rho.keys)
    assert ideal.trace == pytest.approx(1.0)
    assert ideal.element(K00, K11) == pytest.approx(0.5)
