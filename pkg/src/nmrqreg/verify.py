"""Reproduction suite: the thirteen headline checks behind `verify`.

Each check recomputes one quoted result from the library's public API
and compares it against the quoted value at a pinned tolerance. The
results feed both the CLI exit status and the acceptance tests, so the
pass/fail logic lives here exactly once. Detail strings are fully
deterministic (no wall-clock numbers); measured runtimes are returned
separately so callers can sideline them.
"""

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import dnp
from .automaton import (
    ChainState,
    PulseSpec,
    Site,
    apply_pulse,
    code_distance,
    default_couplings,
    encode_logical,
    logical_patterns,
    resonance_frequency,
)
from .constants import GAMMA_SI29
from .dephasing import (
    ImpuritySpec,
    NoiseChannel,
    allowed_concentration,
    decrement,
    decrement_quadratic,
    hyperfine_variance,
    impurity_variance,
    required_field_over_temp,
    sampled_impurity_variance,
)
from .hyperfine import (
    Environment,
    P31_IN_SI28,
    breit_rabi_levels,
    gain_factor,
    pair_hamiltonian,
    transition_frequencies,
)
from .lattice_signal import continuum_signal, discrete_signal, geometry_factor
from .readout import (
    CoilCircuit,
    RegisterGeometry,
    block_counts,
    n_min_bulk,
    n_min_ensemble,
)
from .twoqubit import (
    CorrelatedPhaseModel,
    bell_decrement,
    epr_decrement,
    monte_carlo_factors,
)

__all__ = ["CheckResult", "check_names", "run_checks"]

SP = P31_IN_SI28
_MHZ = 2.0 * math.pi * 1e6
_SEED = 20260814


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    runtime_s: float
    budget_s: float


def _within_factor(value, quoted, factor):
    return quoted / factor <= value <= quoted * factor


def _best_time(fn, repeats=3):
    best = math.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def _check_01():
    env = Environment(b_field=1.0)
    transition_frequencies(SP, env)
    trans, elapsed = _best_time(lambda: transition_frequencies(SP, env))
    f_plus = trans.omega_a_plus / _MHZ
    f_minus = trans.omega_a_minus / _MHZ
    ok = abs(f_plus / 75.0 - 1.0) < 0.01 and abs(f_minus / 41.0 - 1.0) < 0.01
    detail = ("omega_A+/2pi = %.4f MHz vs 75 quoted, omega_A-/2pi = %.4f "
              "MHz vs 41 quoted, both within 1%%" % (f_plus, f_minus))
    return ok, detail, elapsed


def _check_02():
    rng = np.random.default_rng(_SEED)
    fields = rng.uniform(1e-3, 10.0, size=1000)

    def worst():
        err = 0.0
        for b in fields:
            closed = np.array([lv.energy for lv in
                               breit_rabi_levels(SP, Environment(b))])
            numeric = np.linalg.eigvalsh(pair_hamiltonian(SP, b))
            scale = np.max(np.abs(numeric))
            err = max(err, np.max(np.abs(closed - numeric)) / scale)
        return err

    err, elapsed = _best_time(worst, repeats=1)
    detail = ("closed form vs dense 4x4 eigensolver: max relative "
              "deviation %.3e over 1000 fields in [1e-3, 10] T" % err)
    return err < 1e-10, detail, elapsed


def _check_03():
    def both():
        return (gain_factor(SP, Environment(1.0)).ratio_approx,
                gain_factor(SP, Environment(0.01)).ratio_approx)

    (g_1t, g_001t), elapsed = _best_time(both)
    ok = abs(g_1t / 4.4 - 1.0) < 0.02 and abs(g_001t / 338.0 - 1.0) < 0.02
    detail = ("b_eff/b = %.4f vs 4.4 quoted at 1 T, %.2f vs 338 quoted "
              "at 0.01 T, both within 2%%" % (g_1t, g_001t))
    return ok, detail, elapsed


def _check_04():
    room = Environment(b_field=3.5, temp_lattice=300.0)
    coil = CoilCircuit.from_circuit(1e3, 50.0, 7.855e8, 1.0)
    t0 = time.perf_counter()
    n_star = n_min_bulk(SP, room, coil, 2)
    elapsed = time.perf_counter() - t0
    ok = _within_factor(n_star, 1e16, 3.0)
    detail = ("liquid crossover at S/N = 1: N* = %.3e molecules, within "
              "a factor %.2f of 1e16" % (n_star, max(n_star, 1e16)
                                         / min(n_star, 1e16)))
    return ok, detail, elapsed


def _check_05():
    plate = RegisterGeometry(pitch_x_nm=20.0, pitch_y_nm=50.0,
                             plate_thickness_cm=0.1,
                             qubits_per_molecule=1000,
                             molecules_per_block=100,
                             blocks_n=16, blocks_p=63)
    t0 = time.perf_counter()
    n_min = n_min_ensemble(plate, 1e6)
    n_blk, p_blk = block_counts(n_min, 100, 1000, 20.0, 50.0)
    elapsed = time.perf_counter() - t0
    ok = _within_factor(n_min, 1e5, 3.0) \
        and abs(n_blk - 16) <= 1 and abs(p_blk - 63) <= 1
    detail = ("planar register: N_min = %.3e molecules (1e5 quoted), "
              "square plate blocks n = %d, p = %d (16 x 63 quoted)"
              % (n_min, n_blk, p_blk))
    return ok, detail, elapsed


def _check_06():
    rates = dnp.RelaxationRates(tau_b=1.0, tau_c=1.0, tau_d=math.inf,
                                t_par_a=1e4, w_pump=1.0, temp=0.1)
    start = dnp.thermal_populations(SP, Environment(2.0, 0.1))
    t0 = time.perf_counter()
    traj = dnp.integrate_dnp(start, rates, 1e5, tol=1e-10)
    elapsed = time.perf_counter() - t0
    fixed = dnp.steady_state(rates)
    sum_err = np.max(np.abs(traj.populations.sum(axis=1) - 1.0))
    fp_err = np.max(np.abs(traj.terminal.as_array() - fixed.as_array()))
    p_i = traj.terminal.p_i
    ok = p_i >= 0.99 and sum_err <= 1e-10 and fp_err <= 1e-6 \
        and elapsed < 5.0
    detail = ("stiff pump W T_A = 1e4: terminal P_I = %.6f (>= 0.99), "
              "population sum conserved to %.1e, fixed-point gap %.1e"
              % (p_i, sum_err, fp_err))
    return ok, detail, elapsed


def _check_07():
    cold = Environment(b_field=2.0, temp_lattice=0.1)
    b_100g = 1e11 / (SP.gamma_e - SP.gamma_i)
    trans = transition_frequencies(SP, Environment(b_100g, 0.1))
    t0 = time.perf_counter()
    budget = dnp.saturation_power(cold, trans, 1.0, 1e3, 1e8, 1e3)
    elapsed = time.perf_counter() - t0
    power = budget.power_w
    ok = _within_factor(power, 1e-3, 3.0)
    detail = ("saturation power P = %.4f mW vs 1 mW quoted: factor %.1f"
              % (power * 1e3, max(power, 1e-3) / min(power, 1e-3)))
    return ok, detail, elapsed


def _check_08():
    t0 = time.perf_counter()
    threshold = required_field_over_temp(SP, 1.0)
    rate_at_op = math.sqrt(hyperfine_variance(SP, Environment(2.0, 0.06)))
    elapsed = time.perf_counter() - t0
    ok = 27.0 <= threshold.exact <= 34.0 \
        and 27.0 <= threshold.approx <= 34.0 \
        and 2.0 / 0.06 >= threshold.exact and rate_at_op <= 1.0
    detail = ("B/T for 1/s dephasing: %.3f exact, %.3f exponential "
              "(both in [27, 34]); at 2 T / 0.06 K the static rate is "
              "%.3f/s" % (threshold.exact, threshold.approx, rate_at_op))
    return ok, detail, elapsed


def _check_09():
    imp = ImpuritySpec(4.7e-2, -GAMMA_SI29, 0.8e-3)
    env = Environment(2.0, 0.1)
    t0 = time.perf_counter()
    allowed = allowed_concentration(SP, imp, env, 1.0)
    analytic = impurity_variance(SP, imp, env)
    sampled = sampled_impurity_variance(SP, imp, env,
                                        n_samples=1_000_000, seed=_SEED)
    elapsed = time.perf_counter() - t0
    ratio = sampled / analytic
    ok = _within_factor(allowed, 4.5e-4, 2.0) \
        and _within_factor(ratio, 1.0, 2.0) and elapsed < 30.0
    detail = ("allowed 29Si concentration %.3e vs 4.5e-4 quoted "
              "(factor %.2f); Monte Carlo / closed-form variance ratio "
              "%.3f over 1e6 draws"
              % (allowed, max(allowed, 4.5e-4) / min(allowed, 4.5e-4),
                 ratio))
    return ok, detail, elapsed


def _check_10():
    channel = NoiseChannel(variance=2.3, corr_time=1.7, kind="custom")
    tau = channel.corr_time

    def oracle(t):
        val, err = quad(lambda u: (t - u) * math.exp(-u / tau), 0.0, t,
                        epsabs=1e-14, epsrel=1e-13)
        return channel.variance * val

    t0 = time.perf_counter()
    worst = 0.0
    for t in np.linspace(0.05 * tau, 10.0 * tau, 40):
        exact = decrement(channel, t)
        worst = max(worst, abs(exact / oracle(t) - 1.0))
    t_early = tau / 100.0
    quad_gap = abs(decrement_quadratic(channel, t_early)
                   / decrement(channel, t_early) - 1.0)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-8 and quad_gap < 1e-2
    detail = ("closed-form decrement vs quadrature: max relative error "
              "%.2e on [0.05, 10] tau1; quadratic reduction off by %.2e "
              "at tau1/100" % (worst, quad_gap))
    return ok, detail, elapsed


def _check_11():
    equal = CorrelatedPhaseModel.constant(0.25, 0.25, 1.0)
    uncorr = CorrelatedPhaseModel.constant(0.25, 0.25, 0.0)
    single = 0.25 / 2.0
    t0 = time.perf_counter()
    epr_corr = epr_decrement(equal, 1.0)
    bell_corr = bell_decrement(equal, 1.0)
    epr_unc = epr_decrement(uncorr, 1.0)
    exact = (epr_corr == 0.0 and bell_corr == 4.0 * single
             and epr_unc == 2.0 * single)
    model = CorrelatedPhaseModel.constant(0.81, 0.49, 0.6)
    factors, stderr = monte_carlo_factors(model, 1.0, 1_000_000, _SEED)
    elapsed = time.perf_counter() - t0
    epr_gap = abs(factors[1, 2] - math.exp(-epr_decrement(model, 1.0)))
    bell_gap = abs(factors[0, 3] - math.exp(-bell_decrement(model, 1.0)))
    mc_ok = epr_gap <= 3.0 * stderr[1, 2] and bell_gap <= 3.0 * stderr[0, 3]
    ok = exact and mc_ok and elapsed < 20.0
    detail = ("rho = 1 equal noise: EPR decrement 0, Bell / single = 4; "
              "rho = 0: EPR / single = 2 (all exact); 1e6-sample phase "
              "average within %.2f / %.2f standard errors of exp(-Gamma)"
              % (epr_gap / stderr[1, 2], bell_gap / stderr[0, 3]))
    return ok, detail, elapsed


def _check_12():
    t0 = time.perf_counter()
    state, program = encode_logical(ChainState.ground(8), 0, 0)
    window_ok = state.to_string()[:4] == logical_patterns()[0] \
        and state.to_string()[4:] == "^v^v"
    couplings = default_couplings()
    mismatches = 0
    for bits in itertools.product([False, True], repeat=8):
        chain = ChainState(tuple(
            Site("A" if i % 2 == 0 else "B", excited=b)
            for i, b in enumerate(bits)))
        for sub in "AB":
            for s in (-1.0, -0.5, 0.0, 0.5, 1.0):
                out = apply_pulse(chain, PulseSpec(sub, s), couplings)
                target = resonance_frequency(couplings, sub, s)
                ref = {i for i in range(8)
                       if abs(resonance_frequency(
                           couplings, chain.sites[i].sublattice,
                           chain.neighbor_sum(i)) - target)
                       < couplings.linewidth}
                got = {i for i in range(8)
                       if out.sites[i].excited != chain.sites[i].excited}
                if got != ref:
                    mismatches += 1
    distance = code_distance(logical_patterns()[0], logical_patterns()[1])
    elapsed = time.perf_counter() - t0
    ok = window_ok and mismatches == 0 and distance == 4 and elapsed < 1.0
    detail = ("two-pulse program writes the '0' window %s exactly; "
              "selectivity mismatches over 256 states x 10 classes: %d; "
              "code distance %d"
              % (logical_patterns()[0], mismatches, distance))
    return ok, detail, elapsed


def _check_13():
    demo = RegisterGeometry(pitch_x_nm=20.0, pitch_y_nm=50.0,
                            plate_thickness_cm=30e-7,
                            qubits_per_molecule=16, molecules_per_block=8,
                            blocks_n=8, blocks_p=8)
    coil = CoilCircuit.from_circuit(1e3, 50.0, 7.855e8, 1.0)
    t0 = time.perf_counter()
    ratio = discrete_signal(demo, SP, coil) / continuum_signal(demo, SP,
                                                               coil)
    plate_factor = geometry_factor(320e-6, 315e-6, 1e-3)
    elapsed = time.perf_counter() - t0
    ok = abs(ratio - 1.0) < 0.10 \
        and 0.5 <= abs(plate_factor) <= 20.0 and elapsed < 60.0
    detail = ("lattice sum / smeared limit = %.4f on the 16-qubit demo "
              "register; plate log factor magnitude %.3f in [0.5, 20]"
              % (ratio, abs(plate_factor)))
    return ok, detail, elapsed


_CHECKS = (
    (1, "transition-frequencies", _check_01, 1e-3),
    (2, "level-eigensolver", _check_02, 1.0),
    (3, "rf-gain", _check_03, 1e-3),
    (4, "bulk-molecule-count", _check_04, 1.0),
    (5, "ensemble-molecule-count", _check_05, 1.0),
    (6, "dnp-saturation", _check_06, 5.0),
    (7, "microwave-power", _check_07, 1.0),
    (8, "decoherence-threshold", _check_08, 1.0),
    (9, "impurity-bound", _check_09, 30.0),
    (10, "decrement-quadrature", _check_10, 10.0),
    (11, "entangled-ratios", _check_11, 20.0),
    (12, "automaton-selectivity", _check_12, 1.0),
    (13, "lattice-signal", _check_13, 60.0),
)


def check_names():
    return tuple((number, name) for number, name, _, _ in _CHECKS)


def run_checks(numbers=None):
    """Run the requested checks (all by default), in numeric order.

    Runtime budgets are part of each criterion: a check that computes
    the right numbers too slowly fails.
    """
    wanted = set(range(1, 14)) if numbers is None else set(numbers)
    unknown = wanted - {number for number, _, _, _ in _CHECKS}
    if unknown:
        raise ValueError("unknown check numbers: %s" % sorted(unknown))
    results = []
    for number, name, fn, budget in _CHECKS:
        if number not in wanted:
            continue
        ok, detail, elapsed = fn()
        results.append(CheckResult(number=number, name=name,
                                   passed=bool(ok and elapsed < budget),
                                   detail=detail, runtime_s=elapsed,
                                   budget_s=budget))
    return results
