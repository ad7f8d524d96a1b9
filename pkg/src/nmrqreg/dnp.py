"""Dynamic nuclear polarization by pumping the forbidden electron line.

Population kinetics of the four hyperfine levels |1,1>, |1,0>, |1,-1>,
|0,0> under thermal relaxation channels plus a microwave drive that
saturates the |1,1> <-> |1,-1> flip-flip transition. Three tiers:

* full_rate_derivative: every thermal channel with its own time constant
  and Boltzmann up/down asymmetry, kept as the reference dynamics;
* the reduced four-level system (reduced_rate_matrix / integrate_dnp):
  the deep-cold electron / warm nucleus regime with a single electron
  time, which is what parameter studies integrate;
* reduced_rate_derivative: the two-variable polarization form used for
  back-of-envelope saturation analysis.

Saturating the forbidden line drags the nuclei into |0,0>: the stationary
state approaches P_I = -P_S = p00 = 1, an effective nuclear spin
temperature below hbar*omega_a/k ~ 1 mK without cooling the lattice.

Population vectors are ordered (p11, p10, p1m1, p00) everywhere,
matching the trajectory CSV column order.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .constants import GAMMA_E, KB, MU0, CM3, boltzmann_ratio
from .hyperfine import breit_rabi_levels

__all__ = [
    "Populations",
    "RelaxationRates",
    "PolarizationPair",
    "DnpTrajectory",
    "SaturationBudget",
    "IntegrationError",
    "thermal_populations",
    "full_rate_derivative",
    "reduced_rate_matrix",
    "reduced_rate_derivative",
    "steady_state",
    "integrate_dnp",
    "saturation_power",
]


class IntegrationError(RuntimeError):
    """The step controller could not meet the requested tolerance."""


@dataclass(frozen=True)
class Populations:
    """Occupation probabilities of the four hyperfine levels."""

    p11: float
    p10: float
    p1m1: float
    p00: float

    def __post_init__(self):
        vals = self.as_array()
        if np.any(vals < -1e-9) or np.any(vals > 1.0 + 1e-9):
            raise ValueError("populations must lie in [0, 1]")
        if abs(vals.sum() - 1.0) > 1e-3:
            raise ValueError("populations must sum to 1")

    def as_array(self):
        return np.array([self.p11, self.p10, self.p1m1, self.p00])

    @property
    def p_s(self):
        """Electron polarization 2<S_z>."""
        return self.p11 + self.p10 - self.p1m1 - self.p00

    @property
    def p_i(self):
        """Nuclear polarization 2<I_z>."""
        return self.p11 + self.p00 - self.p10 - self.p1m1

    @classmethod
    def uniform(cls):
        return cls(0.25, 0.25, 0.25, 0.25)


@dataclass(frozen=True)
class RelaxationRates:
    """Channel time constants (s), pump rate (1/s) and bath temperature.

    tau_b, tau_c, tau_d act on the electron transitions at omega_b,
    omega_c, omega_d; tau_s is the thermal time of the forbidden line
    (infinite in the printed rate equations, kept for the saturation
    predicate); t_par_a serves both nuclear transitions at omega_a+-.
    w_pump is the induced forbidden-transition rate W_e.
    """

    tau_b: float
    tau_c: float
    tau_d: float
    t_par_a: float
    w_pump: float = 0.0
    temp: float = 0.1
    tau_s: float = math.inf

    def __post_init__(self):
        if min(self.tau_b, self.tau_c, self.tau_d,
               self.t_par_a, self.tau_s) <= 0.0:
            raise ValueError("relaxation times must be positive")
        if self.w_pump < 0.0:
            raise ValueError("w_pump must be >= 0")
        if self.temp <= 0.0:
            raise ValueError("temp must be positive")


@dataclass(frozen=True)
class PolarizationPair:
    """Electron and nuclear polarizations (2<S_z>, 2<I_z>)."""

    p_s: float
    p_i: float

    def __post_init__(self):
        if abs(self.p_s) > 1.0 + 1e-9 or abs(self.p_i) > 1.0 + 1e-9:
            raise ValueError("polarizations must lie in [-1, 1]")


def thermal_populations(species, env, temp=None):
    """Boltzmann equilibrium over the four levels at the bath temperature.

    Uses the exact level energies, so the result is a strict fixed point
    of full_rate_derivative with w_pump = 0 and matching temp.
    """
    t = env.temp_lattice if temp is None else temp
    levels = {(lv.f, lv.m_f): lv.energy for lv in breit_rabi_levels(species, env)}
    order = [(1, 1), (1, 0), (1, -1), (0, 0)]
    e = np.array([levels[k] for k in order])
    w = np.exp(-(e - e.min()) / (KB * t))
    w /= w.sum()
    return Populations(*w)


def full_rate_derivative(pops, rates, transitions):
    """Time derivative of the populations with every channel active.

    Each thermal channel connects one level pair; the downhill rate is
    1/tau and the uphill rate r/tau with r = exp(-hbar*omega/kT), so any
    Boltzmann state at the same temperature is stationary. The pump acts
    symmetrically on the |1,1> <-> |1,-1> pair. Components sum to zero
    identically. Returns d/dt (p11, p10, p1m1, p00). pops may be a
    Populations instance or a bare length-4 vector (handy when this
    derivative is itself fed to an ODE solver).
    """
    if hasattr(pops, "as_array"):
        p11, p10, p1m1, p00 = pops.as_array()
    else:
        p11, p10, p1m1, p00 = np.asarray(pops, dtype=float)
    t = rates.temp
    r_b = boltzmann_ratio(transitions.omega_b, t)
    r_c = boltzmann_ratio(transitions.omega_c, t)
    r_d = boltzmann_ratio(transitions.omega_d, t)
    r_ap = boltzmann_ratio(transitions.omega_a_plus, t)
    r_am = boltzmann_ratio(transitions.omega_a_minus, t)
    w = rates.w_pump

    d00 = (p11 - p00 * r_b) / rates.tau_b \
        + (p10 - p00 * r_d) / rates.tau_d \
        + (p1m1 - p00 * r_ap) / rates.t_par_a
    d1m1 = (p10 - p1m1 * r_c) / rates.tau_c \
        + (p11 - p1m1) * w \
        + (p00 * r_ap - p1m1) / rates.t_par_a
    d10 = (p1m1 * r_c - p10) / rates.tau_c \
        + (p00 * r_d - p10) / rates.tau_d \
        + (p11 - p10 * r_am) / rates.t_par_a
    d11 = (p00 * r_b - p11) / rates.tau_b \
        + (p1m1 - p11) * w \
        + (p10 * r_am - p11) / rates.t_par_a
    return np.array([d11, d10, d1m1, d00])


def reduced_rate_matrix(rates):
    """Linear generator of the deep-cold four-level system.

    Electron transitions fully directional (their Boltzmann factors
    vanish for hbar*omega_(B,C,D)/kT >> 1), both nuclear transitions
    symmetric (hbar*omega_A/kT << 1), the omega_d channel frozen out,
    and a single electron time tau_b standing in for the near-equal
    tau_b and tau_c. Acts on (p11, p10, p1m1, p00); columns sum to zero.
    """
    tb = rates.tau_b
    ta = rates.t_par_a
    w = rates.w_pump
    return np.array([
        [-1.0 / tb - w - 1.0 / ta, 1.0 / ta, w, 0.0],
        [1.0 / ta, -1.0 / tb - 1.0 / ta, 0.0, 0.0],
        [w, 1.0 / tb, -w - 1.0 / ta, 1.0 / ta],
        [1.0 / tb, 0.0, 1.0 / ta, -1.0 / ta],
    ])


def reduced_rate_derivative(pol, rates):
    """Two-variable polarization kinetics under saturation pumping.

    dP_S/dt = -(P_S + P_I) W_e - (P_S + 1)/tau_b
    dP_I/dt = -(P_S + P_I) W_e - P_I / t_par_a

    as printed; the exact projection of the four-level system carries
    2 P_I / t_par_a in the second line, a difference that is suppressed
    whenever the pump dominates the slow nuclear time.
    """
    drive = -(pol.p_s + pol.p_i) * rates.w_pump
    dps = drive - (pol.p_s + 1.0) / rates.tau_b
    dpi = drive - pol.p_i / rates.t_par_a
    return np.array([dps, dpi])


def steady_state(rates):
    """Stationary populations: the unit-sum null vector of the generator."""
    m = reduced_rate_matrix(rates)
    a = m.copy()
    a[3, :] = 1.0
    sol = np.linalg.solve(a, np.array([0.0, 0.0, 0.0, 1.0]))
    return Populations(*sol)


@dataclass(frozen=True)
class DnpTrajectory:
    """Integrated population history on the solver's accepted steps."""

    times: np.ndarray
    populations: np.ndarray     # shape (n_steps, 4)

    @property
    def p_s(self):
        p = self.populations
        return p[:, 0] + p[:, 1] - p[:, 2] - p[:, 3]

    @property
    def p_i(self):
        p = self.populations
        return p[:, 0] + p[:, 3] - p[:, 1] - p[:, 2]

    @property
    def terminal(self):
        return Populations(*self.populations[-1])

    def write_csv(self, path):
        """Columns t, p11, p10, p1m1, p00, P_S, P_I; LF line endings."""
        table = np.column_stack([self.times, self.populations,
                                 self.p_s, self.p_i])
        with open(path, "w", newline="\n") as fh:
            fh.write("t,p11,p10,p1m1,p00,P_S,P_I\n")
            for row in table:
                fh.write(",".join("%.11e" % v for v in row) + "\n")


def integrate_dnp(initial, rates, duration, tol=1e-8):
    """Integrate the four-level system with an implicit stiff solver.

    The generator is linear, so its exact Jacobian is supplied and rate
    ratios spanning many decades (millisecond pumping against 1e4 s
    nuclear relaxation) stay cheap. Normalization is conserved by the
    equations themselves; the solver keeps it to a few times tol.
    """
    if duration <= 0.0:
        raise ValueError("duration must be positive")
    if not 1e-12 < tol < 1e-3:
        raise ValueError("tol must lie in (1e-12, 1e-3)")
    m = reduced_rate_matrix(rates)

    def rhs(_, y):
        return m @ y

    def jac(_, y):
        return m

    sol = solve_ivp(rhs, (0.0, duration), initial.as_array(), method="Radau",
                    rtol=tol, atol=tol * 1e-2, jac=jac)
    if not sol.success:
        raise IntegrationError(sol.message)
    return DnpTrajectory(times=sol.t, populations=sol.y.T)


@dataclass(frozen=True)
class SaturationBudget:
    """Microwave power bound and the implied cavity field.

    saturation_margin is (gamma_e b_mw)^2 tau_perp_eff tau_b; saturated
    means margin > 1. The same inequality written with the forbidden-line
    times (W_e >> 1/tau_s, i.e. (gamma_e b)^2 T*_perp tau_s >> 1) is a
    pure renaming and is not evaluated separately.
    """

    power_w: float
    b_mw_tesla: float
    tau_perp_eff: float
    saturation_margin: float

    @property
    def saturated(self):
        return self.saturation_margin > 1.0


def saturation_power(env, transitions, cavity_volume_cm3, cavity_q,
                     linewidth, pump_rate_target, tau_b=None):
    """Dissipated-power bound for saturating the forbidden transition.

    P = omega_s V_r W sqrt(mean square dw) / (2 mu0 Q_c gamma_e^2), the
    cavity field b_mw implied by that power through
    Q_c = omega_s b^2 V_r / (2 mu0 P), and the saturation margin
    (gamma_e b_mw)^2 tau_perp_eff tau_b with tau_perp_eff = 2/linewidth.
    tau_b defaults to 1/pump_rate_target (the pump is usually budgeted
    to beat the electron relaxation it must outrun). env carries the
    operating point for call-site symmetry; only the forbidden-gap
    frequency of the transition set enters the bound.
    """
    if min(cavity_volume_cm3, cavity_q, linewidth, pump_rate_target) <= 0.0:
        raise ValueError("cavity parameters must be positive")
    if tau_b is None:
        tau_b = 1.0 / pump_rate_target
    gamma_e = GAMMA_E
    v_r = cavity_volume_cm3 * CM3
    power = transitions.omega_s * v_r * pump_rate_target * linewidth \
        / (2.0 * MU0 * cavity_q * gamma_e ** 2)
    b_mw = np.sqrt(2.0 * MU0 * power * cavity_q
                   / (transitions.omega_s * v_r))
    tau_perp = 2.0 / linewidth
    margin = (gamma_e * b_mw) ** 2 * tau_perp * tau_b
    return SaturationBudget(power_w=float(power), b_mw_tesla=float(b_mw),
                            tau_perp_eff=float(tau_perp),
                            saturation_margin=float(margin))
