"""Two-qubit correlated dephasing: unitary phases, analytics, Monte Carlo."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nmrqreg.dephasing import NoiseChannel, decrement
from nmrqreg.twoqubit import (
    CorrelatedPhaseModel,
    TwoQubitDensity,
    averaged_bell,
    averaged_epr,
    averaged_partial_pair,
    bell_decrement,
    bell_density,
    conjugate_density,
    epr_decrement,
    epr_density,
    monte_carlo_average,
    monte_carlo_factors,
    pair_purity_loss,
    partial_pair_density,
    phase_unitary,
    sample_correlated_phases,
)

GENERIC = CorrelatedPhaseModel.constant(1.1 ** 2, 0.7 ** 2, 0.4, 0.8 ** 2)


def test_zero_phases_give_identity():
    np.testing.assert_array_equal(phase_unitary(0.0, 0.0, 0.0), np.eye(4))


def test_unitarity_over_random_triples():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for phi1, phi2, phi_i in rng.uniform(-30.0, 30.0, size=(10000, 3)):
        u = phase_unitary(phi1, phi2, phi_i)
        worst = max(worst, np.abs(u.conj().T @ u - np.eye(4)).max())
    assert worst < 1e-14


def test_epr_conjugation_carries_difference_phase_only():
    rho = epr_density()
    phi1, phi2 = 0.83, -1.91
    out = conjugate_density(rho, phi1, phi2, 0.37)
    assert out[1, 2] == pytest.approx(
        0.5 * np.exp(-1j * (phi1 - phi2)), abs=1e-15)
    # pair-coupling phase drops out entirely
    for phi_i in (-2.0, 0.0, 5.5):
        np.testing.assert_allclose(
            conjugate_density(rho, phi1, phi2, phi_i), out, atol=1e-15)
    np.testing.assert_allclose(np.diag(out), np.diag(rho.matrix), atol=0.0)


def test_bell_conjugation_carries_sum_phase_only():
    rho = bell_density(1)
    phi1, phi2 = 1.21, 0.44
    out = conjugate_density(rho, phi1, phi2, 0.0)
    assert out[0, 3] == pytest.approx(
        0.5 * np.exp(-1j * (phi1 + phi2)), abs=1e-15)
    for phi_i in (-1.0, 3.3):
        np.testing.assert_allclose(
            conjugate_density(rho, phi1, phi2, phi_i), out, atol=1e-15)


def test_presets_match_printed_matrices():
    m = epr_density().matrix
    expected = np.zeros((4, 4), dtype=complex)
    expected[1:3, 1:3] = 0.5
    np.testing.assert_array_equal(m, expected)
    b = bell_density(-1).matrix
    assert b[0, 3] == -0.5 and b[0, 0] == 0.5
    with pytest.raises(ValueError):
        bell_density(2)


def test_uncorrelated_equal_noise_doubles_single_qubit_decrement():
    sigma_sq = 0.9
    model = CorrelatedPhaseModel.constant(sigma_sq, sigma_sq, 0.0)
    gamma_one = sigma_sq / 2.0   # <exp(i phi)> = exp(-sigma^2/2)
    assert epr_decrement(model, 0.0) == pytest.approx(2.0 * gamma_one,
                                                      rel=1e-14)
    assert bell_decrement(model, 0.0) == pytest.approx(2.0 * gamma_one,
                                                       rel=1e-14)


def test_fully_correlated_equal_noise_spares_epr_and_quadruples_bell():
    sigma_sq = 1.7
    model = CorrelatedPhaseModel.constant(sigma_sq, sigma_sq, 1.0)
    assert epr_decrement(model, 0.0) == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_array_equal(averaged_epr(model, 0.0).matrix,
                                  epr_density().matrix)
    gamma_one = sigma_sq / 2.0
    assert bell_decrement(model, 0.0) == pytest.approx(4.0 * gamma_one,
                                                       rel=1e-14)


def test_single_channel_limit():
    model = CorrelatedPhaseModel.constant(1.3, 0.0, 0.7)
    assert epr_decrement(model, 0.0) == pytest.approx(1.3 / 2.0, rel=1e-14)
    assert bell_decrement(model, 0.0) == pytest.approx(1.3 / 2.0, rel=1e-14)


def test_decrements_interpolate_monotonically_in_correlation():
    rhos = np.linspace(0.0, 1.0, 21)
    eprs = [epr_decrement(CorrelatedPhaseModel.constant(1.0, 1.0, r), 0.0)
            for r in rhos]
    bells = [bell_decrement(CorrelatedPhaseModel.constant(1.0, 1.0, r), 0.0)
             for r in rhos]
    assert np.all(np.diff(eprs) < 0.0)
    assert np.all(np.diff(bells) > 0.0)
    assert max(abs(np.diff(eprs))) < 0.11   # continuity on the 0.05 grid


def test_channel_backed_model_accumulates_decrements():
    ch = NoiseChannel(variance=4.0e2, corr_time=0.3)
    model = CorrelatedPhaseModel.from_channels(ch, ch, 0.0)
    for t in (1e-3, 0.1, 1.0):
        assert epr_decrement(model, t) == pytest.approx(
            2.0 * decrement(ch, t), rel=1e-14)


def test_degenerate_fully_correlated_sampler():
    model = CorrelatedPhaseModel.constant(1.0, 1.0, 1.0)
    pairs = sample_correlated_phases(model, 0.0, 2000, seed=3)
    np.testing.assert_array_equal(pairs[:, 0], pairs[:, 1])


def test_sampler_is_deterministic_and_validates():
    a = sample_correlated_phases(GENERIC, 0.0, 500, seed=77)
    b = sample_correlated_phases(GENERIC, 0.0, 500, seed=77)
    np.testing.assert_array_equal(a, b)
    with pytest.raises(ValueError):
        sample_correlated_phases(GENERIC, 0.0, 0, seed=1)
    bad = CorrelatedPhaseModel.constant(1.0, 1.0, 1.2)
    with pytest.raises(ValueError):
        sample_correlated_phases(bad, 0.0, 10, seed=1)
    with pytest.raises(ValueError):
        CorrelatedPhaseModel.constant(-1.0, 1.0, 0.5).at(0.0)


def test_sample_covariance_matches_target():
    pairs = sample_correlated_phases(GENERIC, 0.0, 1_000_000, seed=11)
    cov = np.cov(pairs.T, bias=True)
    s1s2 = 1.1 * 0.7
    target = np.array([[1.1 ** 2, 0.4 * s1s2], [0.4 * s1s2, 0.7 ** 2]])
    assert np.abs(cov - target).max() < 5e-3


def test_sampled_difference_moment_matches_exponent():
    n = 1_000_000
    pairs = sample_correlated_phases(GENERIC, 0.0, n, seed=21)
    moment = np.mean(np.exp(1j * (pairs[:, 0] - pairs[:, 1])))
    assert abs(moment - math.exp(-epr_decrement(GENERIC, 0.0))) \
        < 3.0 / math.sqrt(n)
    moment_sum = np.mean(np.exp(1j * (pairs[:, 0] + pairs[:, 1])))
    assert abs(moment_sum - math.exp(-bell_decrement(GENERIC, 0.0))) \
        < 3.0 / math.sqrt(n)


def test_monte_carlo_matches_analytic_epr_within_three_se():
    n = 1_000_000
    factors, stderr = monte_carlo_factors(GENERIC, 0.0, n, seed=42)
    analytic = averaged_epr(GENERIC, 0.0).matrix
    sampled = epr_density().matrix * factors
    bound = 3.0 * np.maximum(stderr, 1e-9) * np.abs(epr_density().matrix)
    assert np.all(np.abs(sampled - analytic) <= bound + 1e-12)
    # and through the density-returning entry point
    rho = monte_carlo_average(epr_density(), GENERIC, 0.0, n, seed=42)
    assert np.abs(rho.matrix - analytic).max() < 3.0 / math.sqrt(n)


def test_monte_carlo_matches_analytic_bell():
    n = 400_000
    rho = monte_carlo_average(bell_density(1), GENERIC, 0.0, n, seed=8)
    analytic = averaged_bell(GENERIC, 0.0, sign=1).matrix
    assert np.abs(rho.matrix - analytic).max() < 3.0 / math.sqrt(n)


def test_full_correlation_preserves_epr_exactly():
    model = CorrelatedPhaseModel.constant(1.0, 1.0, 1.0, 0.5)
    rho = monte_carlo_average(epr_density(), model, 0.0, 10_000, seed=1)
    np.testing.assert_array_equal(rho.matrix, epr_density().matrix)


def test_diagonal_states_are_immune():
    diag = TwoQubitDensity(np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex))
    rho = monte_carlo_average(diag, GENERIC, 0.0, 5000, seed=9)
    np.testing.assert_array_equal(rho.matrix, diag.matrix)


def test_partial_pair_purity_loss():
    alpha = 0.3
    loss = pair_purity_loss(GENERIC, 0.0, alpha)
    rho = averaged_partial_pair(GENERIC, 0.0, alpha)
    assert 1.0 - rho.purity == pytest.approx(loss, rel=1e-12)
    # alpha-independence of the coherence damping, alpha-dependence of loss
    gamma = epr_decrement(GENERIC, 0.0)
    for a in (0.1, 0.5, 0.9):
        m = averaged_partial_pair(GENERIC, 0.0, a).matrix
        assert abs(m[1, 2]) == pytest.approx(
            math.sqrt(a * (1.0 - a)) * math.exp(-gamma), rel=1e-12)
    assert pair_purity_loss(GENERIC, 0.0, 0.0) == 0.0
    assert pair_purity_loss(GENERIC, 0.0, 1.0) == 0.0
    # Monte-Carlo purity agrees
    n = 1_000_000
    rho_mc = monte_carlo_average(partial_pair_density(alpha), GENERIC,
                                 0.0, n, seed=5)
    assert 1.0 - rho_mc.purity == pytest.approx(loss, abs=5.0 / math.sqrt(n))


def test_equal_phases_act_trivially_on_mixed_block():
    for alpha in (0.0, 0.25, 0.5, 0.8):
        rho = partial_pair_density(alpha)
        out = conjugate_density(rho, 1.3, 1.3, 0.7)
        np.testing.assert_allclose(out, rho.matrix, atol=1e-15)


def test_unequal_correlated_noise_still_decoheres():
    model = CorrelatedPhaseModel.constant(2.0, 0.5, 1.0)
    assert epr_decrement(model, 0.0) == pytest.approx(
        0.5 * (math.sqrt(2.0) - math.sqrt(0.5)) ** 2, rel=1e-12)
    assert epr_decrement(model, 0.0) > 0.0


def test_purity_bounds():
    assert epr_density().purity == pytest.approx(1.0, rel=1e-14)
    damped = averaged_epr(GENERIC, 0.0)
    assert 0.25 <= damped.purity < 1.0
    zero = CorrelatedPhaseModel.constant(0.0, 0.0, 0.0)
    assert averaged_epr(zero, 0.0).purity == pytest.approx(1.0, rel=1e-14)


def test_density_validation():
    with pytest.raises(ValueError):
        TwoQubitDensity(np.eye(4, dtype=complex))        # trace 4
    bad_herm = np.diag([1.0, 0.0, 0.0, 0.0]).astype(complex)
    bad_herm[0, 1] = 1e-3
    with pytest.raises(ValueError):
        TwoQubitDensity(bad_herm)
    neg = np.diag([1.2, -0.2, 0.0, 0.0]).astype(complex)
    with pytest.raises(ValueError):
        TwoQubitDensity(neg)
    with pytest.raises(ValueError):
        partial_pair_density(1.5)


@settings(deadline=None, max_examples=80)
@given(s1sq=st.floats(0.0, 9.0), s2sq=st.floats(0.0, 9.0),
       rho=st.floats(0.0, 1.0))
def test_decrements_nonnegative_and_sum_rule(s1sq, s2sq, rho):
    model = CorrelatedPhaseModel.constant(s1sq, s2sq, rho)
    g_epr = epr_decrement(model, 0.0)
    g_bell = bell_decrement(model, 0.0)
    assert g_epr >= -1e-12
    assert g_bell >= -1e-12
    assert g_epr + g_bell == pytest.approx(s1sq + s2sq, abs=1e-9)
    ev = np.linalg.eigvalsh(averaged_epr(model, 0.0).matrix)
    assert ev.min() >= -1e-12 and ev.max() <= 1.0 + 1e-12
