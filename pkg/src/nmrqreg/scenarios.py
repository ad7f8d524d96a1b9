"""Named reproduction scenarios and their deterministic CSV outputs.

Each scenario recomputes one figure or table from the register design
study and writes per-scenario CSV files: fixed column order, LF line
endings, floats in scientific notation with 12 significant digits.
All randomness derives from the run seed through a documented hash, so
a re-run with the same seed and config is byte-identical.
"""

import csv
import hashlib
import math
from dataclasses import dataclass

import numpy as np

from . import dnp, verify
from .automaton import (
    ChainState,
    apply_pulse,
    default_couplings,
    encode_logical,
    resonance_frequency,
)
from .config import ParamSpec
from .constants import GAMMA_SI29
from .dephasing import (
    ImpuritySpec,
    allowed_concentration,
    hyperfine_variance,
    impurity_variance,
    required_field_over_temp,
    sampled_impurity_variance,
)
from .hyperfine import (
    Environment,
    P31_IN_SI28,
    breit_rabi_levels,
    transition_frequencies,
)
from .lattice_signal import continuum_signal, discrete_signal, geometry_factor
from .readout import (
    CoilCircuit,
    RegisterGeometry,
    block_counts,
    n_min_bulk,
    n_min_ensemble,
    snr_bulk_closed,
    snr_ensemble,
)
from .twoqubit import (
    CorrelatedPhaseModel,
    averaged_bell,
    averaged_epr,
    bell_decrement,
    bell_density,
    epr_decrement,
    epr_density,
    monte_carlo_factors,
)

__all__ = ["SCENARIOS", "ScenarioSpec", "child_seed", "run_scenario",
           "schemas", "write_csv"]

SP = P31_IN_SI28
_NEIGHBOR_SUMS = (-1.0, -0.5, 0.0, 0.5, 1.0)


def child_seed(seed, name):
    """Per-scenario stream key: SHA-256(seed as 8 big-endian bytes ||
    scenario name), truncated to 64 bits. Independent of scenario order
    and of how many scenarios share the run."""
    digest = hashlib.sha256(seed.to_bytes(8, "big")
                            + name.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _cell(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return "%d" % value
    return "%.11e" % value


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(value) for value in row])


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    description: str
    params: dict
    outputs: tuple
    run: object


def _run_breit_rabi_sweep(params, seed, outdir):
    fields = np.geomspace(params["b_min"], params["b_max"],
                          params["points"])
    rows = []
    for b in fields:
        env = Environment(b_field=float(b))
        by_qn = {(lv.f, lv.m_f): lv.energy
                 for lv in breit_rabi_levels(SP, env)}
        trans = transition_frequencies(SP, env)
        rows.append((b, by_qn[(0, 0)], by_qn[(1, -1)], by_qn[(1, 0)],
                     by_qn[(1, 1)], trans.omega_a_plus,
                     trans.omega_a_minus, trans.omega_b, trans.omega_c,
                     trans.omega_d, trans.omega_s))
    write_csv(outdir / "levels.csv",
              ("b_field_t", "e_0_0_j", "e_1_m1_j", "e_1_0_j", "e_1_1_j",
               "omega_a_plus_rad_s", "omega_a_minus_rad_s",
               "omega_b_rad_s", "omega_c_rad_s", "omega_d_rad_s",
               "omega_s_rad_s"),
              rows)


def _run_snr_bulk(params, seed, outdir):
    env = Environment(b_field=params["b_field"],
                      temp_lattice=params["temp"])
    coil = CoilCircuit.from_circuit(params["quality_q"],
                                    params["resistance"], params["omega"],
                                    params["volume"])
    qubits = params["qubits"]
    counts = np.geomspace(10.0 ** params["exp_min"],
                          10.0 ** params["exp_max"], params["points"])
    write_csv(outdir / "sweep.csv", ("n_molecules", "snr"),
              [(n, snr_bulk_closed(SP, env, coil, float(n), qubits))
               for n in counts])
    n_star = n_min_bulk(SP, env, coil, qubits)
    write_csv(outdir / "summary.csv",
              ("n_star", "snr_at_n_star", "quoted_1e16_over_n_star"),
              [(n_star, snr_bulk_closed(SP, env, coil, n_star, qubits),
                1e16 / n_star)])


def _geometry_from(params):
    return RegisterGeometry(pitch_x_nm=params["pitch_x"],
                            pitch_y_nm=params["pitch_y"],
                            plate_thickness_cm=params["thickness"],
                            qubits_per_molecule=params["qubits"],
                            molecules_per_block=params["per_block"],
                            blocks_n=params["blocks_n"],
                            blocks_p=params["blocks_p"])


def _run_snr_ensemble(params, seed, outdir):
    geom = _geometry_from(params)
    q = params["quality_q"]
    n_min = n_min_ensemble(geom, q, params["target"])
    n_blk, p_blk = block_counts(n_min, geom.molecules_per_block,
                                geom.qubits_per_molecule,
                                geom.pitch_x_nm, geom.pitch_y_nm)
    counts = np.geomspace(max(n_min / 30.0, 1.0), 30.0 * n_min, 25)
    write_csv(outdir / "sweep.csv", ("n_molecules", "snr"),
              [(n, snr_ensemble(geom, q, float(n))) for n in counts])
    write_csv(outdir / "summary.csv",
              ("molecule_volume_cm3", "n_min", "blocks_n", "blocks_p",
               "full_plate_molecules", "full_plate_snr",
               "solenoid_length_cm", "plate_width_cm"),
              [(geom.molecule_volume_cm3, n_min, n_blk, p_blk,
                geom.n_molecules, snr_ensemble(geom, q),
                geom.solenoid_length_cm, geom.plate_width_cm)])


def _run_dnp_trajectory(params, seed, outdir):
    env = Environment(b_field=params["b_field"],
                      temp_lattice=params["temp"])
    rates = dnp.RelaxationRates(tau_b=params["tau_b"],
                                tau_c=params["tau_c"],
                                tau_d=params["tau_d"],
                                t_par_a=params["t_par_a"],
                                w_pump=params["w_pump"],
                                temp=params["temp"])
    start = dnp.thermal_populations(SP, env)
    traj = dnp.integrate_dnp(start, rates, params["duration"], tol=1e-10)
    traj.write_csv(outdir / "trajectory.csv")
    fixed = dnp.steady_state(rates)
    sum_err = float(np.max(np.abs(traj.populations.sum(axis=1) - 1.0)))
    write_csv(outdir / "summary.csv",
              ("steady_p_s", "steady_p_i", "terminal_p_s", "terminal_p_i",
               "max_population_sum_error", "pump_times_t_par_a"),
              [(fixed.p_s, fixed.p_i, traj.terminal.p_s,
                traj.terminal.p_i, sum_err,
                params["w_pump"] * params["t_par_a"])])


def _run_decoherence_thresholds(params, seed, outdir):
    ratios = np.linspace(params["ratio_min"], params["ratio_max"],
                         params["points"])
    rows = []
    for ratio in ratios:
        var = hyperfine_variance(SP, Environment(float(ratio), 1.0))
        rows.append((ratio, var, math.sqrt(var)))
    write_csv(outdir / "sweep.csv",
              ("field_over_temp_t_per_k", "variance_rad2_s2",
               "static_rate_per_s"), rows)
    threshold = required_field_over_temp(SP, params["target_rate"])
    operating = params["b_field"] / params["temp"]
    op_rate = math.sqrt(hyperfine_variance(
        SP, Environment(params["b_field"], params["temp"])))
    write_csv(outdir / "summary.csv",
              ("threshold_exact_t_per_k", "threshold_approx_t_per_k",
               "operating_t_per_k", "operating_static_rate_per_s",
               "operating_point_ok"),
              [(threshold.exact, threshold.approx, operating, op_rate,
                operating >= threshold.exact)])


def _run_impurity_bound(params, seed, outdir):
    env = Environment(params["b_field"], params["temp_lattice"])
    temps = np.geomspace(params["t_min"], params["t_max"],
                         params["points"])
    rows = []
    for t_i in temps:
        imp = ImpuritySpec(1.0, -GAMMA_SI29, float(t_i))
        rows.append((t_i, allowed_concentration(SP, imp, env,
                                                params["target_rate"])))
    write_csv(outdir / "sweep.csv",
              ("temp_nuclear_k", "allowed_concentration"), rows)
    imp = ImpuritySpec(4.7e-2, -GAMMA_SI29, params["temp_nuclear"])
    allowed = allowed_concentration(SP, imp, env, params["target_rate"])
    analytic = impurity_variance(SP, imp, env)
    if params["mc_samples"] > 0:
        sampled = sampled_impurity_variance(
            SP, imp, env, n_samples=params["mc_samples"],
            seed=child_seed(seed, "impurity-bound"))
        mc_ratio = sampled / analytic
    else:
        mc_ratio = float("nan")
    write_csv(outdir / "summary.csv",
              ("temp_nuclear_k", "allowed_concentration",
               "natural_over_allowed", "natural_variance_rad2_s2",
               "mc_over_analytic"),
              [(params["temp_nuclear"], allowed, 4.7e-2 / allowed,
                analytic, mc_ratio)])


def _pair_mc(params, seed, outdir, name, rho0, analytic, decrement_value):
    model = CorrelatedPhaseModel.constant(
        params["sigma1"] ** 2, params["sigma2"] ** 2, params["rho12"],
        params["sigma_i"] ** 2)
    t = params["time"]
    factors, stderr = monte_carlo_factors(model, t, params["samples"],
                                          child_seed(seed, name))
    mean = rho0.matrix * factors
    sampled = 0.5 * (mean + mean.conj().T)
    target = analytic(model, t).matrix
    rows = [(j, k, target[j, k].real, target[j, k].imag,
             sampled[j, k].real, sampled[j, k].imag, stderr[j, k])
            for j in range(4) for k in range(4)]
    write_csv(outdir / "density.csv",
              ("row", "col", "analytic_re", "analytic_im", "sampled_re",
               "sampled_im", "stderr"), rows)
    gamma = decrement_value(model, t)
    j, k = (1, 2) if name == "epr-mc" else (0, 3)
    distance = abs(factors[j, k] - math.exp(-gamma)) / stderr[j, k]
    write_csv(outdir / "summary.csv",
              ("gamma_epr", "gamma_bell", "loaded_entry_factor",
               "loaded_entry_sampled_re", "loaded_entry_stderr",
               "sigma_distance"),
              [(epr_decrement(model, t), bell_decrement(model, t),
                math.exp(-gamma), factors[j, k].real, stderr[j, k],
                distance)])


def _run_epr_mc(params, seed, outdir):
    _pair_mc(params, seed, outdir, "epr-mc", epr_density(), averaged_epr,
             epr_decrement)


def _run_bell_mc(params, seed, outdir):
    sign = params["sign"]
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    _pair_mc(params, seed, outdir, "bell-mc", bell_density(sign),
             lambda model, t: averaged_bell(model, t, sign),
             bell_decrement)


def _run_chain_demo(params, seed, outdir):
    bit = params["bit"]
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    couplings = default_couplings()
    write_csv(outdir / "frequencies.csv",
              ("sublattice", "neighbor_sum", "freq_rad_s", "freq_mhz"),
              [(sub, s, resonance_frequency(couplings, sub, s),
                resonance_frequency(couplings, sub, s)
                / (2.0 * math.pi * 1e6))
               for sub in "AB" for s in _NEIGHBOR_SUMS])
    chain = ChainState.ground(params["sites"])
    _, program = encode_logical(chain, 0, bit)
    rows = [(0, "init", "-", chain.to_string())]
    state = chain
    for step, pulse in enumerate(program, start=1):
        state = apply_pulse(state, pulse, couplings)
        rows.append((step, "encode", pulse.to_text(), state.to_string()))
    for step, pulse in enumerate(reversed(program), start=len(program) + 1):
        state = apply_pulse(state, pulse, couplings)
        rows.append((step, "restore", pulse.to_text(), state.to_string()))
    write_csv(outdir / "steps.csv", ("step", "stage", "pulse", "state"),
              rows)


def _run_discrete_signal(params, seed, outdir):
    geom = RegisterGeometry(pitch_x_nm=params["pitch_x"],
                            pitch_y_nm=params["pitch_y"],
                            plate_thickness_cm=params["thickness"] * 1e-7,
                            qubits_per_molecule=params["qubits"],
                            molecules_per_block=params["per_block"],
                            blocks_n=params["blocks_n"],
                            blocks_p=params["blocks_p"])
    coil = CoilCircuit.from_circuit(params["quality_q"],
                                    params["resistance"], params["omega"],
                                    params["volume"])
    discrete = discrete_signal(geom, SP, coil,
                               resolution=params["resolution"])
    continuum = continuum_signal(geom, SP, coil)
    factor = geometry_factor(geom.solenoid_length_cm * 1e-2,
                             geom.plate_width_cm * 1e-2,
                             geom.plate_thickness_cm * 1e-2)
    write_csv(outdir / "signal.csv",
              ("discrete_v", "continuum_v", "discrete_over_continuum",
               "log_factor"),
              [(discrete, continuum, discrete / continuum, factor)])


def _run_paper_numbers(params, seed, outdir):
    results = verify.run_checks()
    write_csv(outdir / "report.csv",
              ("criterion", "name", "passed", "detail"),
              [(r.number, r.name, r.passed, r.detail) for r in results])


def _spec(name, description, params, outputs, run):
    return ScenarioSpec(name=name, description=description, params=params,
                        outputs=outputs, run=run)


SCENARIOS = {spec.name: spec for spec in (
    _spec("breit-rabi-sweep",
          "hyperfine level energies and transition frequencies vs field",
          {"b_min": ParamSpec("T", "float", 0.01),
           "b_max": ParamSpec("T", "float", 10.0),
           "points": ParamSpec(None, "int", 61)},
          ("levels.csv",), _run_breit_rabi_sweep),
    _spec("snr-bulk",
          "room-temperature liquid-sample S/N vs molecule count",
          {"quality_q": ParamSpec(None, "float", 1e3),
           "resistance": ParamSpec("Ohm", "float", 50.0),
           "omega": ParamSpec("rad/s", "float", 7.855e8),
           "volume": ParamSpec("cm3", "float", 1.0),
           "b_field": ParamSpec("T", "float", 3.5),
           "temp": ParamSpec("K", "float", 300.0),
           "qubits": ParamSpec(None, "int", 2),
           "exp_min": ParamSpec(None, "float", 13.0),
           "exp_max": ParamSpec(None, "float", 18.0),
           "points": ParamSpec(None, "int", 26)},
          ("sweep.csv", "summary.csv"), _run_snr_bulk),
    _spec("snr-ensemble",
          "planar-register S/N, minimum molecule count and block grid",
          {"quality_q": ParamSpec(None, "float", 1e6),
           "pitch_x": ParamSpec("nm", "float", 20.0),
           "pitch_y": ParamSpec("nm", "float", 50.0),
           "thickness": ParamSpec("cm", "float", 0.1),
           "qubits": ParamSpec(None, "int", 1000),
           "per_block": ParamSpec(None, "int", 100),
           "blocks_n": ParamSpec(None, "int", 16),
           "blocks_p": ParamSpec(None, "int", 63),
           "target": ParamSpec(None, "float", 1.0)},
          ("sweep.csv", "summary.csv"), _run_snr_ensemble),
    _spec("dnp-trajectory",
          "four-level pumping kinetics from a thermal start",
          {"b_field": ParamSpec("T", "float", 2.0),
           "temp": ParamSpec("K", "float", 0.1),
           "tau_b": ParamSpec("s", "float", 1e-3),
           "tau_c": ParamSpec("s", "float", 1e-3),
           "tau_d": ParamSpec("s", "float", 50.0),
           "t_par_a": ParamSpec("s", "float", 1.0),
           "w_pump": ParamSpec("1/s", "float", 1e3),
           "duration": ParamSpec("s", "float", 10.0)},
          ("trajectory.csv", "summary.csv"), _run_dnp_trajectory),
    _spec("decoherence-thresholds",
          "electron-flip dephasing rate vs B/T and the 1/s threshold",
          {"target_rate": ParamSpec("1/s", "float", 1.0),
           "ratio_min": ParamSpec("T/K", "float", 10.0),
           "ratio_max": ParamSpec("T/K", "float", 60.0),
           "points": ParamSpec(None, "int", 51),
           "b_field": ParamSpec("T", "float", 2.0),
           "temp": ParamSpec("K", "float", 0.06)},
          ("sweep.csv", "summary.csv"), _run_decoherence_thresholds),
    _spec("impurity-bound",
          "allowed 29Si concentration vs bath temperature, with MC check",
          {"b_field": ParamSpec("T", "float", 2.0),
           "temp_lattice": ParamSpec("K", "float", 0.1),
           "temp_nuclear": ParamSpec("K", "float", 0.8e-3),
           "target_rate": ParamSpec("1/s", "float", 1.0),
           "t_min": ParamSpec("K", "float", 0.2e-3),
           "t_max": ParamSpec("K", "float", 3.2e-3),
           "points": ParamSpec(None, "int", 25),
           "mc_samples": ParamSpec(None, "int", 200000)},
          ("sweep.csv", "summary.csv"), _run_impurity_bound),
    _spec("epr-mc",
          "sampled phase averaging of the EPR pair vs the closed form",
          {"sigma1": ParamSpec("rad", "float", 0.9),
           "sigma2": ParamSpec("rad", "float", 0.7),
           "rho12": ParamSpec(None, "float", 0.6),
           "sigma_i": ParamSpec("rad", "float", 0.0),
           "time": ParamSpec("s", "float", 1.0),
           "samples": ParamSpec(None, "int", 200000)},
          ("density.csv", "summary.csv"), _run_epr_mc),
    _spec("bell-mc",
          "sampled phase averaging of the Bell pair vs the closed form",
          {"sigma1": ParamSpec("rad", "float", 0.9),
           "sigma2": ParamSpec("rad", "float", 0.7),
           "rho12": ParamSpec(None, "float", 0.6),
           "sigma_i": ParamSpec("rad", "float", 0.0),
           "time": ParamSpec("s", "float", 1.0),
           "samples": ParamSpec(None, "int", 200000),
           "sign": ParamSpec(None, "int", 1)},
          ("density.csv", "summary.csv"), _run_bell_mc),
    _spec("chain-demo",
          "frequency table plus a logical encode / restore pulse walk",
          {"sites": ParamSpec(None, "int", 8),
           "bit": ParamSpec(None, "int", 0)},
          ("frequencies.csv", "steps.csv"), _run_chain_demo),
    _spec("discrete-signal",
          "lattice-sum readout voltage against the smeared limit",
          {"blocks_n": ParamSpec(None, "int", 8),
           "blocks_p": ParamSpec(None, "int", 8),
           "per_block": ParamSpec(None, "int", 8),
           "qubits": ParamSpec(None, "int", 16),
           "pitch_x": ParamSpec("nm", "float", 20.0),
           "pitch_y": ParamSpec("nm", "float", 50.0),
           "thickness": ParamSpec("nm", "float", 30.0),
           "quality_q": ParamSpec(None, "float", 1e3),
           "resistance": ParamSpec("Ohm", "float", 50.0),
           "omega": ParamSpec("rad/s", "float", 7.855e8),
           "volume": ParamSpec("cm3", "float", 1.0),
           "resolution": ParamSpec(None, "int", 1)},
          ("signal.csv",), _run_discrete_signal),
    _spec("paper-numbers",
          "headline-value reproduction table with pass/fail status",
          {},
          ("report.csv",), _run_paper_numbers),
)}


def schemas():
    """Config schema view consumed by the strict parser."""
    return {name: spec.params for name, spec in SCENARIOS.items()}


def run_scenario(request, seed, outdir):
    """Execute one scenario into its own directory.

    Afterward the directory must contain exactly the declared outputs;
    anything missing or extra is a bug worth failing loudly over.
    """
    spec = SCENARIOS[request.name]
    outdir.mkdir(parents=True, exist_ok=True)
    spec.run(request.params, seed, outdir)
    produced = {p.name for p in outdir.iterdir() if p.is_file()}
    declared = set(spec.outputs)
    if produced != declared:
        raise RuntimeError(
            "scenario '%s' wrote %s but declares %s"
            % (request.name, sorted(produced), sorted(declared)))
