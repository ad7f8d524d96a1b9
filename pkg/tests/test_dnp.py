"""Four-level pumping kinetics: fixed points, stiff integration, power."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmrqreg import dnp
from nmrqreg.constants import GAMMA_E, GAMMA_P31, MU0, CM3
from nmrqreg.hyperfine import Environment, P31_IN_SI28, transition_frequencies

SP = P31_IN_SI28
COLD = Environment(b_field=2.0, temp_lattice=0.1)
TRANS_COLD = transition_frequencies(SP, COLD)

# forbidden gap pinned to 100 rad GHz for the power-budget numbers
B_100G = 1e11 / (GAMMA_E - GAMMA_P31)
TRANS_100G = transition_frequencies(SP, Environment(b_field=B_100G,
                                                    temp_lattice=0.1))


def test_thermal_state_is_a_detailed_balance_fixed_point():
    env = Environment(b_field=2.0, temp_lattice=4.0)
    trans = transition_frequencies(SP, env)
    pops = dnp.thermal_populations(SP, env)
    rates = dnp.RelaxationRates(tau_b=1e-3, tau_c=2e-3, tau_d=50.0,
                                t_par_a=1e4, w_pump=0.0, temp=4.0)
    deriv = dnp.full_rate_derivative(pops, rates, trans)
    assert np.max(np.abs(deriv)) < 1e-10


def test_uniform_state_is_fixed_at_infinite_temperature():
    rates = dnp.RelaxationRates(tau_b=1e-3, tau_c=2e-3, tau_d=50.0,
                                t_par_a=1e4, w_pump=0.0, temp=math.inf)
    deriv = dnp.full_rate_derivative(dnp.Populations.uniform(), rates,
                                     TRANS_COLD)
    assert np.all(deriv == 0.0)


def test_derivative_conserves_probability():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        pops = dnp.Populations(*rng.dirichlet(np.ones(4)))
        rates = dnp.RelaxationRates(
            tau_b=10 ** rng.uniform(-4, 1), tau_c=10 ** rng.uniform(-4, 1),
            tau_d=10 ** rng.uniform(-1, 5), t_par_a=10 ** rng.uniform(2, 5),
            w_pump=10 ** rng.uniform(-2, 4), temp=10 ** rng.uniform(-1, 1))
        deriv = dnp.full_rate_derivative(pops, rates, TRANS_COLD)
        assert abs(deriv.sum()) < 1e-13 * max(1.0, np.max(np.abs(deriv)))


def test_polarization_projection_of_full_system():
    """In the cold-electron regime the two-variable kinetics reproduce the
    projected four-level derivative."""
    rng = np.random.default_rng(11)
    rates = dnp.RelaxationRates(tau_b=1e-3, tau_c=1e-3, tau_d=math.inf,
                                t_par_a=1e4, w_pump=1e2, temp=0.1)
    for _ in range(200):
        pops = dnp.Populations(*rng.dirichlet(np.ones(4)))
        d11, d10, d1m1, d00 = dnp.full_rate_derivative(pops, rates,
                                                       TRANS_COLD)
        projected = np.array([d11 + d10 - d1m1 - d00,
                              d11 + d00 - d10 - d1m1])
        pair = dnp.PolarizationPair(pops.p_s, pops.p_i)
        reduced = dnp.reduced_rate_derivative(pair, rates)
        scale = np.max(np.abs(projected))
        assert np.max(np.abs(projected - reduced)) < 0.01 * scale


def test_full_and_reduced_trajectories_agree():
    """Pumping trajectories of the complete channel set and of the
    two-variable form stay within 2% of each other in the cold regime."""
    from scipy.integrate import solve_ivp

    rates = dnp.RelaxationRates(tau_b=1e-3, tau_c=1e-3, tau_d=math.inf,
                                t_par_a=1e4, w_pump=1e3, temp=0.1)
    start = dnp.thermal_populations(SP, COLD)
    grid = np.linspace(0.0, 20e-3, 60)
    full = solve_ivp(
        lambda _, y: dnp.full_rate_derivative(y, rates, TRANS_COLD),
        (0.0, grid[-1]), start.as_array(), method="Radau",
        rtol=1e-10, atol=1e-12, t_eval=grid)
    assert full.success
    p = full.y
    ps_full = p[0] + p[1] - p[2] - p[3]
    pi_full = p[0] + p[3] - p[1] - p[2]
    reduced = solve_ivp(
        lambda _, y: dnp.reduced_rate_derivative(
            dnp.PolarizationPair(*np.clip(y, -1.0, 1.0)), rates),
        (0.0, grid[-1]), [start.p_s, start.p_i], method="Radau",
        rtol=1e-10, atol=1e-12, t_eval=grid)
    assert reduced.success
    assert np.max(np.abs(reduced.y[0] - ps_full)) < 0.02
    assert np.max(np.abs(reduced.y[1] - pi_full)) < 0.02


def test_saturated_polarization_pair_is_stationary():
    rates = dnp.RelaxationRates(tau_b=1e-3, tau_c=1e-3, tau_d=math.inf,
                                t_par_a=1e4, w_pump=1e9, temp=0.1)
    deriv = dnp.reduced_rate_derivative(dnp.PolarizationPair(-1.0, 1.0),
                                        rates)
    assert deriv[0] == 0.0
    assert deriv[1] == pytest.approx(-1.0 / rates.t_par_a, rel=1e-15)
    # stationary relative to the pump scale
    assert np.max(np.abs(deriv)) / rates.w_pump < 1e-10


def test_unpolarized_nuclei_with_thermal_electron_at_rest():
    rates = dnp.RelaxationRates(tau_b=1e-3, tau_c=1e-3, tau_d=math.inf,
                                t_par_a=1e4, w_pump=0.0, temp=0.1)
    deriv = dnp.reduced_rate_derivative(dnp.PolarizationPair(-1.0, 0.0),
                                        rates)
    assert np.all(deriv == 0.0)


@settings(deadline=None, max_examples=60)
@given(
    tau_b=st.floats(min_value=1e-4, max_value=10.0),
    t_par_a=st.floats(min_value=1e2, max_value=1e5),
    w_pump=st.floats(min_value=0.0, max_value=1e4),
)
def test_steady_state_solves_the_generator(tau_b, t_par_a, w_pump):
    rates = dnp.RelaxationRates(tau_b=tau_b, tau_c=tau_b, tau_d=math.inf,
                                t_par_a=t_par_a, w_pump=w_pump, temp=0.1)
    ss = dnp.steady_state(rates)
    vec = ss.as_array()
    m = dnp.reduced_rate_matrix(rates)
    residual = m @ vec
    scale = max(np.max(np.abs(m)), 1.0)
    assert np.max(np.abs(residual)) < 1e-11 * scale
    assert vec.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(vec > -1e-12)


def test_generator_columns_sum_to_zero():
    rates = dnp.RelaxationRates(tau_b=0.37, tau_c=0.37, tau_d=math.inf,
                                t_par_a=811.0, w_pump=5.5, temp=0.1)
    m = dnp.reduced_rate_matrix(rates)
    assert np.max(np.abs(m.sum(axis=0))) < 1e-15 * np.max(np.abs(m))


def test_stiff_integration_reaches_the_algebraic_steady_state():
    rates = dnp.RelaxationRates(tau_b=1.0, tau_c=1.0, tau_d=math.inf,
                                t_par_a=1e4, w_pump=1.0, temp=0.1)
    ss = dnp.steady_state(rates)
    assert ss.p_i == pytest.approx(0.9996001599360256, rel=1e-12)
    traj = dnp.integrate_dnp(dnp.Populations.uniform(), rates, 1e5,
                             tol=1e-10)
    assert np.max(np.abs(traj.terminal.as_array() - ss.as_array())) < 1e-6
    sums = traj.populations.sum(axis=1)
    assert np.max(np.abs(sums - 1.0)) < 1e-10
    assert traj.populations.min() > -1e-12


def test_pumping_polarizes_the_nuclei():
    rates = dnp.RelaxationRates(tau_b=1e-3, tau_c=1e-3, tau_d=math.inf,
                                t_par_a=1.0, w_pump=1e3, temp=0.1)
    start = dnp.thermal_populations(SP, COLD)
    assert start.p_s == pytest.approx(-1.0, abs=1e-9)
    assert abs(start.p_i) < 0.05
    traj = dnp.integrate_dnp(start, rates, 10.0, tol=1e-10)
    assert traj.terminal.p_i >= 0.99
    assert traj.terminal.p_s <= -0.99
    # polarization grows monotonically once pumping starts
    assert traj.p_i[-1] > traj.p_i[0]


def test_hard_pumping_equalizes_the_driven_pair():
    rates = dnp.RelaxationRates(tau_b=1e-3, tau_c=1e-3, tau_d=math.inf,
                                t_par_a=1.0, w_pump=1e6, temp=0.1)
    ss = dnp.steady_state(rates)
    assert ss.p11 == pytest.approx(ss.p1m1, rel=1e-2)
    assert ss.p_i > 0.998
    assert ss.p00 > 0.998


def test_equilibrium_stays_put_without_pumping():
    rates = dnp.RelaxationRates(tau_b=1e-3, tau_c=1e-3, tau_d=math.inf,
                                t_par_a=10.0, w_pump=0.0, temp=0.1)
    start = dnp.steady_state(rates)
    traj = dnp.integrate_dnp(start, rates, 100.0, tol=1e-9)
    drift = np.abs(traj.populations - start.as_array()[None, :])
    assert drift.max() < 1e-8


def test_trajectory_export_and_determinism(tmp_path):
    rates = dnp.RelaxationRates(tau_b=1e-3, tau_c=1e-3, tau_d=math.inf,
                                t_par_a=1.0, w_pump=1e3, temp=0.1)
    start = dnp.thermal_populations(SP, COLD)
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    dnp.integrate_dnp(start, rates, 0.1, tol=1e-8).write_csv(a)
    dnp.integrate_dnp(start, rates, 0.1, tol=1e-8).write_csv(b)
    raw = a.read_bytes()
    assert raw == b.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().strip().split("\n")
    assert lines[0] == "t,p11,p10,p1m1,p00,P_S,P_I"
    row = [float(tok) for tok in lines[-1].split(",")]
    assert row[0] == pytest.approx(0.1)
    assert row[1] + row[2] + row[3] + row[4] == pytest.approx(1.0, abs=1e-9)
    assert row[6] == pytest.approx(row[1] + row[4] - row[2] - row[3],
                                   abs=1e-10)


def test_integrator_input_validation():
    rates = dnp.RelaxationRates(tau_b=1.0, tau_c=1.0, tau_d=math.inf,
                                t_par_a=10.0, w_pump=0.0, temp=0.1)
    with pytest.raises(ValueError):
        dnp.integrate_dnp(dnp.Populations.uniform(), rates, -1.0)
    with pytest.raises(ValueError):
        dnp.integrate_dnp(dnp.Populations.uniform(), rates, 1.0, tol=1e-2)
    with pytest.raises(ValueError):
        dnp.Populations(0.7, 0.4, 0.2, -0.3)
    with pytest.raises(ValueError):
        dnp.Populations(0.1, 0.1, 0.1, 0.1)
    with pytest.raises(ValueError):
        dnp.RelaxationRates(tau_b=0.0, tau_c=1.0, tau_d=1.0, t_par_a=1.0)
    with pytest.raises(ValueError):
        dnp.RelaxationRates(tau_b=1.0, tau_c=1.0, tau_d=1.0, t_par_a=1.0,
                            w_pump=-1.0)
    with pytest.raises(ValueError):
        dnp.PolarizationPair(1.5, 0.0)


def test_power_budget_reference_numbers():
    """100 radGHz pump, 1 cm^3 cavity, Q = 1000, 1e8/s linewidth, W = 1e3/s."""
    budget = dnp.saturation_power(COLD, TRANS_100G, 1.0, 1e3, 1e8, 1e3)
    assert budget.power_w == pytest.approx(1.2833351253389557e-4, rel=1e-12)
    assert budget.b_mw_tesla == pytest.approx(np.sqrt(1e3 * 1e8) / GAMMA_E,
                                              rel=1e-12)
    assert budget.saturation_margin == pytest.approx(2.0, rel=1e-12)
    assert budget.saturated
    # closing the loop: the quoted cavity relation returns the power
    back = TRANS_100G.omega_s * budget.b_mw_tesla ** 2 * CM3 \
        / (2.0 * MU0 * budget.power_w)
    assert back == pytest.approx(1e3, rel=1e-12)


def test_power_budget_scalings():
    base = dnp.saturation_power(COLD, TRANS_100G, 1.0, 1e3, 1e8, 1e3)
    wider = dnp.saturation_power(COLD, TRANS_100G, 1.0, 1e3, 2e8, 1e3)
    assert wider.power_w == pytest.approx(2.0 * base.power_w, rel=1e-12)
    better = dnp.saturation_power(COLD, TRANS_100G, 1.0, 2e3, 1e8, 1e3)
    assert better.power_w == pytest.approx(base.power_w / 2.0, rel=1e-12)
    lossless = dnp.saturation_power(COLD, TRANS_100G, 1.0, 1e15, 1e8, 1e3)
    assert lossless.power_w < 1e-12
    with pytest.raises(ValueError):
        dnp.saturation_power(COLD, TRANS_100G, -1.0, 1e3, 1e8, 1e3)
