"""Inductive readout: signal, noise, and signal-to-noise estimators.

Covers the one-coil detection model for a bulk (liquid-style) ensemble and
the planar silicon register, plus the steady state of the Bloch equation
with two effective relaxation times. All voltages come out in volts; the
mixed T^2 cm^3/J magnetic constant some of the source estimates use is
numerically identical to SI once volumes are converted, so everything here
is evaluated in SI.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .constants import HBAR, KB, MU0, CM3
from .hyperfine import epsilon_pseudo_pure

__all__ = [
    "CoilCircuit",
    "RegisterGeometry",
    "RelaxationPair",
    "BlochSteadyState",
    "bloch_rate",
    "bloch_steady_state",
    "optimum_drive",
    "snr_bulk",
    "snr_bulk_closed",
    "snr_bulk_estimate",
    "n_min_bulk",
    "snr_ensemble",
    "n_min_ensemble",
    "block_counts",
]


@dataclass(frozen=True)
class CoilCircuit:
    """Resonant pickup circuit parameters.

    turn_area_cm2 is the area of a single turn; the product K*A is what all
    signal formulas consume. For a tank circuit with parallel resistance R
    and quality factor Q = R/(omega L_s), the solenoid inductance
    L_s = mu0 (KA)^2 / V_s fixes KA = sqrt(R V_s / (mu0 Q omega)).
    """

    quality_q: float
    turns_k: int
    turn_area_cm2: float
    solenoid_volume_cm3: float
    resistance_ohm: float
    bandwidth_hz: float
    resonance_omega: float

    def __post_init__(self):
        if self.quality_q <= 0.0 or self.turns_k < 1:
            raise ValueError("need quality_q > 0 and turns_k >= 1")
        if min(self.turn_area_cm2, self.solenoid_volume_cm3,
               self.resistance_ohm, self.bandwidth_hz,
               self.resonance_omega) <= 0.0:
            raise ValueError("circuit parameters must be positive")
        implied = np.sqrt(self.resistance_ohm * self.solenoid_volume_cm3 * CM3
                          / (MU0 * self.quality_q * self.resonance_omega))
        if abs(self.ka_m2 - implied) > 1e-6 * implied:
            raise ValueError(
                "inconsistent circuit: K*A = %.6e m^2 but R, Q, omega imply "
                "%.6e m^2" % (self.ka_m2, implied))

    @property
    def ka_m2(self):
        return self.turns_k * self.turn_area_cm2 * 1e-4

    @classmethod
    def from_circuit(cls, quality_q, resistance_ohm, resonance_omega,
                     solenoid_volume_cm3, turns_k=1, bandwidth_hz=1.0):
        """Build a consistent circuit from (R, Q, omega, V_s)."""
        if min(quality_q, resistance_ohm, resonance_omega,
               solenoid_volume_cm3) <= 0.0:
            raise ValueError("circuit parameters must be positive")
        ka = np.sqrt(resistance_ohm * solenoid_volume_cm3 * CM3
                     / (MU0 * quality_q * resonance_omega))
        return cls(quality_q=quality_q, turns_k=turns_k,
                   turn_area_cm2=ka * 1e4 / turns_k,
                   solenoid_volume_cm3=solenoid_volume_cm3,
                   resistance_ohm=resistance_ohm, bandwidth_hz=bandwidth_hz,
                   resonance_omega=resonance_omega)


@dataclass(frozen=True)
class RegisterGeometry:
    """Planar register layout: n x p blocks of N0 parallel L-qubit chains.

    Pitches in nm, plate thickness in cm (matching how the design numbers
    are usually quoted). The solenoid axis runs along x; chain length
    L * l_x times the block count n gives the solenoid length, p * N0
    parallel chains at pitch l_y give the plate width.
    """

    pitch_x_nm: float
    pitch_y_nm: float
    plate_thickness_cm: float
    qubits_per_molecule: int
    molecules_per_block: int
    blocks_n: int
    blocks_p: int
    depth_nm: float = 0.0

    def __post_init__(self):
        if min(self.pitch_x_nm, self.pitch_y_nm, self.plate_thickness_cm) <= 0.0:
            raise ValueError("geometry lengths must be positive")
        if min(self.qubits_per_molecule, self.molecules_per_block,
               self.blocks_n, self.blocks_p) < 1:
            raise ValueError("counts must be >= 1")

    @property
    def n_molecules(self):
        return self.blocks_n * self.blocks_p * self.molecules_per_block

    @property
    def molecule_volume_cm3(self):
        """delta * l_x * l_y * L with unit filling factor."""
        return (self.plate_thickness_cm * self.pitch_x_nm * 1e-7
                * self.pitch_y_nm * 1e-7 * self.qubits_per_molecule)

    @property
    def sample_volume_cm3(self):
        return self.molecule_volume_cm3 * self.n_molecules

    @property
    def solenoid_length_cm(self):
        return self.blocks_n * self.qubits_per_molecule * self.pitch_x_nm * 1e-7

    @property
    def plate_width_cm(self):
        return (self.blocks_p * self.molecules_per_block
                * self.pitch_y_nm * 1e-7)


@dataclass(frozen=True)
class RelaxationPair:
    """Effective transverse / longitudinal relaxation times, seconds."""

    t_perp: float
    t_par: float

    def __post_init__(self):
        if self.t_perp <= 0.0 or self.t_par <= 0.0:
            raise ValueError("relaxation times must be positive")
        if self.t_perp > self.t_par:
            warnings.warn("t_perp > t_par is unusual for these registers",
                          stacklevel=2)


@dataclass(frozen=True)
class BlochSteadyState:
    mx: float
    my: float
    mz: float

    @property
    def transverse(self):
        """Readout amplitude: magnitude of the rotating-frame transverse
        magnetization (detector phase picks some fixed quadrature of it)."""
        return float(np.hypot(self.mx, self.my))


def bloch_rate(species, m, drive_beff, detuning, relax, m_zm):
    """dM/dt in the frame rotating at the drive frequency.

    The linearly polarized drive 2 b_eff cos(wt) contributes its circular
    component b_eff along the rotating x axis; the detuning omega_a - omega
    appears as the residual z field detuning/gamma_i.
    """
    bx = drive_beff
    bz = detuning / species.gamma_i
    mx, my, mz = m
    g = species.gamma_i
    return np.array([
        g * my * bz - mx / relax.t_perp,
        g * (mz * bx - mx * bz) - my / relax.t_perp,
        -g * my * bx - (mz - m_zm) / relax.t_par,
    ])


def bloch_steady_state(species, env, relax, m_zm, drive_beff, detuning=0.0):
    """Stationary solution of the two-time Bloch equation.

    Solves the 3x3 linear fixed point of bloch_rate directly. At zero
    detuning and the optimum drive 1/(gamma_i sqrt(t_perp t_par)) the
    transverse amplitude reaches m_zm sqrt(t_perp/t_par) / 2.
    """
    g = species.gamma_i
    bx = drive_beff
    bz = detuning / g
    a = np.array([
        [-1.0 / relax.t_perp, g * bz, 0.0],
        [-g * bz, -1.0 / relax.t_perp, g * bx],
        [0.0, -g * bx, -1.0 / relax.t_par],
    ])
    rhs = np.array([0.0, 0.0, -m_zm / relax.t_par])
    mx, my, mz = np.linalg.solve(a, rhs)
    return BlochSteadyState(float(mx), float(my), float(mz))


def optimum_drive(species, relax):
    """Drive amplitude maximizing the steady transverse response, tesla."""
    return 1.0 / (species.gamma_i * np.sqrt(relax.t_perp * relax.t_par))


def _bulk_epsilon(env, coil, l_qubits):
    return epsilon_pseudo_pure(l_qubits, coil.resonance_omega,
                               env.temp_lattice)


def snr_bulk(species, env, coil, n_molecules, l_qubits):
    """S/N of the bulk ensemble through explicit signal and noise voltages.

    Signal: |V| = (mu0/4) Q KA (N/V_s) gamma_i hbar omega eps(L); noise:
    sqrt(4 k T R dnu). The coil is assumed tuned to the nuclear transition,
    so the same omega enters the signal scale and the Boltzmann factor.
    """
    if n_molecules < 0:
        raise ValueError("n_molecules must be >= 0")
    if n_molecules == 0:
        return 0.0
    eps = _bulk_epsilon(env, coil, l_qubits)
    omega = coil.resonance_omega
    density = n_molecules / (coil.solenoid_volume_cm3 * CM3)
    signal = (MU0 / 4.0) * coil.quality_q * coil.ka_m2 * density \
        * species.gamma_i * HBAR * omega * eps
    noise = np.sqrt(4.0 * KB * env.temp_lattice * coil.resistance_ohm
                    * coil.bandwidth_hz)
    return float(signal / noise)


def snr_bulk_closed(species, env, coil, n_molecules, l_qubits):
    """Closed form of the same ratio; the circuit resistance cancels."""
    if n_molecules == 0:
        return 0.0
    eps = _bulk_epsilon(env, coil, l_qubits)
    omega = coil.resonance_omega
    v_m3 = coil.solenoid_volume_cm3 * CM3
    root = np.sqrt(MU0 * HBAR * coil.quality_q * HBAR * omega
                   / (coil.bandwidth_hz * v_m3 * KB * env.temp_lattice))
    return float(root / 8.0 * species.gamma_i * n_molecules * eps)


def snr_bulk_estimate(env, coil, n_molecules, l_qubits):
    """Order-of-magnitude form 0.2 sqrt((Q/V_s)(hbar w/kT)) N eps 1e-9,
    V_s in cm^3. Kept as printed for comparison against the closed form."""
    eps = _bulk_epsilon(env, coil, l_qubits)
    ratio = HBAR * coil.resonance_omega / (KB * env.temp_lattice)
    return float(0.2 * np.sqrt(coil.quality_q / coil.solenoid_volume_cm3
                               * ratio) * n_molecules * eps * 1e-9)


def n_min_bulk(species, env, coil, l_qubits, target=1.0):
    """Molecule count where the bulk S/N crosses the target."""
    per = snr_bulk_closed(species, env, coil, 1, l_qubits)
    return float(target / per)


def snr_ensemble(geom, quality_q, n_molecules=None):
    """Planar-register S/N estimate sqrt(Q N / (delta l_x l_y L)) 1e-10.

    The bracket is the per-molecule volume in cm^3. The folded 1e-10
    constant is the source estimate's shorthand for the noise factors of
    the full circuit expression at a fully polarized register (eps = 1);
    unfolding it against the explicit closed form implies an effective
    noise temperature of order 0.4 K at the quoted frequency, which is
    plausible for a cold Q ~ 1e6 circuit and is kept as given.
    """
    n = geom.n_molecules if n_molecules is None else n_molecules
    if n < 0:
        raise ValueError("molecule count must be >= 0")
    return float(np.sqrt(quality_q * n / geom.molecule_volume_cm3) * 1e-10)


def n_min_ensemble(geom, quality_q, target=1.0):
    """Smallest molecule count with ensemble S/N >= target."""
    return float(target ** 2 * geom.molecule_volume_cm3 * 1e20 / quality_q)


def block_counts(n_molecules, molecules_per_block, l_qubits,
                 pitch_x_nm, pitch_y_nm):
    """Block grid (n, p) making the plate square at a given molecule count.

    Square condition: n L l_x = p N0 l_y with N = n p N0. Returns the
    rounded real solution.
    """
    n_real = np.sqrt(n_molecules * pitch_y_nm / (l_qubits * pitch_x_nm))
    p_real = n_molecules / (n_real * molecules_per_block)
    return int(round(n_real)), int(round(p_real))
