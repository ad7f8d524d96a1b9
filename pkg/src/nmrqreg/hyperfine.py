"""Level structure of a coupled electron-nuclear spin pair in a static field.

Everything downstream (readout, polarization dynamics, decoherence estimates)
consumes the quantities computed here: the Breit-Rabi energies of the four
hyperfine levels, the singlet-triplet mixing angle, the nuclear and electron
transition frequencies, the pseudo-pure preparation probability, and the
RF gain factor that the electron admixture gives the nuclear Rabi frequency.

Internal unit system is SI with angular frequencies in rad/s. Energies are
in joules. Published MHz values are converted only at call boundaries.
"""

from dataclasses import dataclass, field

import numpy as np

from .constants import HBAR, KB, GAMMA_E, GAMMA_P31, A_OMEGA

__all__ = [
    "DonorSpecies",
    "Environment",
    "HyperfineLevel",
    "TransitionSet",
    "GainResult",
    "P31_IN_SI28",
    "field_parameter",
    "mixing_alpha",
    "level_energy",
    "breit_rabi_levels",
    "pair_hamiltonian",
    "transition_frequencies",
    "omega_a_large_x",
    "epsilon_pseudo_pure",
    "max_qubits_dynamic",
    "gain_factor",
    "magnetization_elements",
    "max_magnetization",
]


@dataclass(frozen=True)
class DonorSpecies:
    """Constants of one donor electron / nucleus pair.

    gamma_e, gamma_i are angular gyromagnetic ratios in rad/s/T (gamma_i
    signed, positive for 31P). hyperfine_a is the contact coupling as an
    angular frequency A/hbar in rad/s.
    """

    gamma_e: float
    gamma_i: float
    hyperfine_a: float
    label: str = "custom"

    def __post_init__(self):
        if self.gamma_e <= 0.0:
            raise ValueError("gamma_e must be positive")
        if self.hyperfine_a <= 0.0:
            raise ValueError("hyperfine_a must be positive")


@dataclass(frozen=True)
class Environment:
    """Static working point: field, temperatures, drive amplitudes."""

    b_field: float
    temp_lattice: float = 300.0
    temp_nuclear: float = 0.0    # 0 means "same as lattice"
    rf_amp: float = 0.0
    mw_amp: float = 0.0

    def __post_init__(self):
        if self.b_field <= 0.0:
            raise ValueError("b_field must be positive")
        if self.temp_lattice <= 0.0:
            raise ValueError("temp_lattice must be positive")
        if self.temp_nuclear < 0.0:
            raise ValueError("temp_nuclear must be positive (0 = lattice)")
        if self.rf_amp < 0.0 or self.mw_amp < 0.0:
            raise ValueError("drive amplitudes must be non-negative")

    @property
    def t_nuclear(self):
        return self.temp_nuclear if self.temp_nuclear > 0.0 else self.temp_lattice


@dataclass(frozen=True)
class HyperfineLevel:
    f: int
    m_f: int
    energy: float          # J
    mixing_alpha: float    # singlet-triplet mixing weight, 0 for |1,+-1>


@dataclass(frozen=True)
class TransitionSet:
    """Angular frequencies (rad/s) of the level gaps.

    omega_a_plus / omega_a_minus are the two nuclear (RF) transitions; the
    electron and forbidden gaps follow the level-scheme ordering at X >> 1:
    omega_b = E(1,1)-E(0,0), omega_d = E(1,0)-E(0,0), omega_c =
    E(1,0)-E(1,-1), omega_s = (gamma_e - gamma_i) B (forbidden pump gap).
    """

    omega_a_plus: float
    omega_a_minus: float
    omega_b: float
    omega_c: float
    omega_d: float
    omega_s: float


P31_IN_SI28 = DonorSpecies(GAMMA_E, GAMMA_P31, A_OMEGA, "P31-in-Si28")


def field_parameter(species, env):
    """Dimensionless field X = (gamma_e + gamma_i) hbar B / A.

    With hyperfine_a stored as A/hbar the hbar cancels. No large-X
    approximation: valid down to B -> 0.
    """
    if env.b_field <= 0.0:
        raise ValueError("b_field must be positive")
    return (species.gamma_e + species.gamma_i) * env.b_field / species.hyperfine_a


def mixing_alpha(x):
    """Singlet-triplet mixing weight alpha = (1 - X/sqrt(1+X^2))/2."""
    x = np.asarray(x, dtype=float)
    return 0.5 * (1.0 - x / np.hypot(1.0, x))


def level_energy(species, env, f, m_f):
    """Breit-Rabi energy E(F, m_F) in joules.

    The sign(1 + m_F X) factor is kept literally, so the m_F = -1 branch
    crosses smoothly through X = 1.
    """
    if f not in (0, 1):
        raise ValueError("F must be 0 or 1")
    if (f == 0 and m_f != 0) or (f == 1 and m_f not in (-1, 0, 1)):
        raise ValueError("invalid (F, m_F) pair")
    a_j = HBAR * species.hyperfine_a
    x = field_parameter(species, env)
    root = np.sqrt(1.0 + 2.0 * m_f * x + x * x)
    signed = np.sign(1.0 + m_f * x) if (1.0 + m_f * x) != 0.0 else 0.0
    parity = -1.0 if f == 0 else 1.0
    return (-a_j / 4.0
            - species.gamma_i * HBAR * env.b_field * m_f
            + parity * signed * (a_j / 2.0) * root)


def breit_rabi_levels(species, env):
    """All four hyperfine levels, ordered by increasing energy.

    The mixed pair |0,0>, |1,0> carries alpha of the closed form; the
    stretched states |1,+-1> are exact product states (alpha = 0).
    """
    x = field_parameter(species, env)
    alpha = float(mixing_alpha(x))
    levels = [
        HyperfineLevel(0, 0, level_energy(species, env, 0, 0), alpha),
        HyperfineLevel(1, -1, level_energy(species, env, 1, -1), 0.0),
        HyperfineLevel(1, 0, level_energy(species, env, 1, 0), alpha),
        HyperfineLevel(1, 1, level_energy(species, env, 1, 1), 0.0),
    ]
    return sorted(levels, key=lambda lv: lv.energy)


def pair_hamiltonian(species, b_field):
    """4x4 spin Hamiltonian gamma_e hbar B Sz - gamma_i hbar B Iz + A I.S.

    Product basis order (electron, nucleus): up-up, up-dn, dn-up, dn-dn.
    Used by the verification suite as the independent reference for the
    closed-form levels.
    """
    a_j = HBAR * species.hyperfine_a
    we = species.gamma_e * HBAR * b_field
    wi = species.gamma_i * HBAR * b_field
    h = np.zeros((4, 4))
    # diagonal: we*Ms - wi*mi + A*Ms*mi
    ms = np.array([0.5, 0.5, -0.5, -0.5])
    mi = np.array([0.5, -0.5, 0.5, -0.5])
    np.fill_diagonal(h, we * ms - wi * mi + a_j * ms * mi)
    # flip-flop: (A/2)(S+I- + S-I+) couples up-dn and dn-up
    h[1, 2] = h[2, 1] = a_j / 2.0
    return h


def transition_frequencies(species, env):
    """Nuclear and electron transition frequencies from exact level gaps."""
    e00 = level_energy(species, env, 0, 0)
    e1m = level_energy(species, env, 1, -1)
    e10 = level_energy(species, env, 1, 0)
    e1p = level_energy(species, env, 1, 1)
    return TransitionSet(
        omega_a_plus=(e1m - e00) / HBAR,
        omega_a_minus=(e1p - e10) / HBAR,
        omega_b=(e1p - e00) / HBAR,
        omega_c=(e10 - e1m) / HBAR,
        omega_d=(e10 - e00) / HBAR,
        omega_s=(species.gamma_e - species.gamma_i) * env.b_field,
    )


def omega_a_large_x(species, env):
    """High-field expansions of the two nuclear transitions (rad/s).

    omega_a_plus ~ gamma_i B + A/2 + A^2/(4 gamma_e B),
    omega_a_minus ~ -gamma_i B + A/2 - A^2/(4 gamma_e B),
    with A as angular frequency. The sign of the 1/B correction follows
    from expanding the exact level gaps; it is positive for the plus
    transition and negative for the minus one.
    """
    aw = species.hyperfine_a
    corr = aw * aw / (4.0 * species.gamma_e * env.b_field)
    gb = species.gamma_i * env.b_field
    return gb + aw / 2.0 + corr, -gb + aw / 2.0 - corr


def epsilon_pseudo_pure(l_qubits, omega_a, temp):
    """Pseudo-pure preparation probability for an L-spin homonuclear system.

    epsilon(L) = 2 sinh(L x) / (2^L cosh^L x) with x = hbar*omega/(2kT),
    evaluated in log space so L up to ~1e6 cannot overflow. Monotone
    decreasing in L from L = 2 on (epsilon(1) = epsilon(2) = tanh x), and
    -> 1 for every L as T -> 0.
    """
    l_qubits = int(l_qubits)
    if l_qubits < 1:
        raise ValueError("l_qubits must be >= 1")
    if temp <= 0.0:
        raise ValueError("temp must be positive")
    x = HBAR * omega_a / (2.0 * KB * temp)
    if x < 0.0:
        raise ValueError("omega_a must be non-negative")
    if x == 0.0:
        return 0.0
    # ln eps = ln(1 - exp(-2Lx)) - L ln(1 + exp(-2x))
    log_eps = np.log1p(-np.exp(-2.0 * l_qubits * x)) \
        - l_qubits * np.log1p(np.exp(-2.0 * x))
    return float(np.exp(log_eps))


def max_qubits_dynamic(threshold, scan_max=10000):
    """Largest integer L with L * 2^-L > threshold, by exhaustive scan.

    Returns 0 when no L qualifies (threshold >= 1/2). L*2^-L is strictly
    decreasing for L >= 2, so the scan stops at the first failure past
    L = 2.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must be in (0, 1)")
    best = 0
    for l in range(1, scan_max + 1):
        if l * 2.0 ** (-l) > threshold:
            best = l
        elif l > 2:
            break
    return best


@dataclass(frozen=True)
class GainResult:
    eta: float            # A/(2 gamma_i hbar B)
    ratio_exact: float    # b_eff/b from the mixing-angle matrix element
    ratio_approx: float   # 1 + eta
    b_eff: float          # T, exact ratio times the circular RF amplitude
    b_eff_approx: float   # T
    rabi: float           # rad/s, gamma_i * b_eff


def gain_factor(species, env):
    """Effective RF field on the nucleus and the resulting Rabi frequency.

    The exact ratio b_eff/b = sqrt(alpha) (gamma_e/gamma_i) + sqrt(1-alpha)
    comes from the |0,0> -> |1,-1> matrix element of the transverse drive;
    the familiar gain-factor form (1 + eta) with eta = A/(2 gamma_i B) is
    its intermediate-field approximation (1 << X << gamma_e/gamma_i),
    reported alongside for comparison.
    """
    x = field_parameter(species, env)
    alpha = float(mixing_alpha(x))
    ratio_exact = (np.sqrt(alpha) * (species.gamma_e / species.gamma_i)
                   + np.sqrt(1.0 - alpha))
    eta = species.hyperfine_a / (2.0 * species.gamma_i * env.b_field)
    b = env.rf_amp
    return GainResult(
        eta=eta,
        ratio_exact=float(ratio_exact),
        ratio_approx=1.0 + eta,
        b_eff=float(ratio_exact * b),
        b_eff_approx=(1.0 + eta) * b,
        rabi=float(species.gamma_i * ratio_exact * b),
    )


def magnetization_elements(species, env):
    """Diagonal nuclear magnetization (J/T per atom) of the two lowest levels.

    Ground |0,0>: (X/sqrt(1+X^2)) gamma_i hbar / 2; excited |1,-1>:
    -gamma_i hbar / 2 exactly.
    """
    x = field_parameter(species, env)
    half = species.gamma_i * HBAR / 2.0
    return (x / np.hypot(1.0, x)) * half, -half


def max_magnetization(species, env, volume_cm3, n_atoms, l_qubits):
    """Maximum nuclear magnetization of the pseudo-pure ensemble, J/T/cm^3.

    Population difference of the fully-filled lowest and highest nuclear
    states within the electron-ground manifold, with the ground level's
    X/sqrt(1+X^2) magnetization weight:

        M_zm = gamma_i hbar/2 (N/V) [w p^L(0,0) - p^L(1,-1)]

    For hbar*omega/2kT << 1 and X >> 1 this is the familiar
    gamma_i hbar/2 (N/V) L 2^-L hbar*omega/kT; deep cold it saturates at
    full polarization gamma_i hbar/2 (N/V) (times the ground-level weight).
    """
    if volume_cm3 <= 0.0:
        raise ValueError("volume must be positive")
    if n_atoms < 0:
        raise ValueError("n_atoms must be >= 0")
    if n_atoms == 0:
        return 0.0
    l_qubits = int(l_qubits)
    if l_qubits < 1:
        raise ValueError("l_qubits must be >= 1")
    x = field_parameter(species, env)
    weight = x / np.hypot(1.0, x)
    tr = transition_frequencies(species, env)
    t = env.t_nuclear
    xa = HBAR * tr.omega_a_plus / (2.0 * KB * t)
    # log-space filling probabilities p^L(0,0) = e^{Lx}/(2 cosh x)^L and
    # p^L(1,-1) = e^{-Lx}/(2 cosh x)^L
    log_norm = l_qubits * (xa + np.log1p(np.exp(-2.0 * xa)))
    p_low = np.exp(l_qubits * xa - log_norm)
    p_high = np.exp(-l_qubits * xa - log_norm)
    half = species.gamma_i * HBAR / 2.0
    return half * (n_atoms / volume_cm3) * (weight * p_low - p_high)
