"""Adiabatic dephasing of a stored qubit from slow frequency noise.

A random resonance-frequency modulation with exponential correlation
(variance <dw^2>, correlation time tau_1) multiplies the off-diagonal
density-matrix elements by exp(-Gamma(t)) with

    Gamma(t) = <dw^2> tau_1^2 (t/tau_1 - 1 + exp(-t/tau_1)),

quadratic (<dw^2> t^2 / 2) well inside the correlation time and linear
(<dw^2> tau_1 t) beyond it. Two concrete channels are modeled: thermal
flips of the donor electron leaking through the contact hyperfine
coupling, and dipolar fields of unpolarized spin-carrying lattice
impurities. Both are frozen out by a large enough field-to-temperature
ratio, which is what the threshold helpers quantify.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .constants import HBAR, KB, MU0, boltzmann_ratio
from ._kernels import dipolar_moment_sum

__all__ = [
    "A0_ELECTRON_FLIP",
    "NoiseChannel",
    "BlochVector",
    "ImpuritySpec",
    "FieldTempThreshold",
    "decrement",
    "decrement_quadratic",
    "is_static_regime",
    "dephasing_time",
    "dephase_density",
    "dephased_eigenvalues",
    "hyperfine_variance",
    "hyperfine_variance_approx",
    "hyperfine_channel",
    "required_field_over_temp",
    "impurity_variance",
    "sampled_impurity_variance",
    "impurity_channel",
    "allowed_concentration",
    "adiabaticity_check",
]

# residual contact-coupling modulation depth for the donor electron flip
# channel, rad/s
A0_ELECTRON_FLIP = 725.0e6

_KINDS = ("hyperfine-electron", "impurity-dipole", "custom")


@dataclass(frozen=True)
class NoiseChannel:
    """One independent frequency-noise source.

    variance is <dw^2> in (rad/s)^2; corr_time is the correlation time
    tau_1 of the exponential kernel.
    """

    variance: float
    corr_time: float
    kind: str = "custom"

    def __post_init__(self):
        if self.variance < 0.0:
            raise ValueError("variance must be >= 0")
        if self.corr_time <= 0.0:
            raise ValueError("corr_time must be positive")
        if self.kind not in _KINDS:
            raise ValueError("kind must be one of %s" % (_KINDS,))


@dataclass(frozen=True)
class BlochVector:
    """Qubit state direction; length 1 for pure states, < 1 for mixed."""

    px: float
    py: float
    pz: float

    def __post_init__(self):
        if self.norm > 1.0 + 1e-9:
            raise ValueError("Bloch vector length must be <= 1")

    @property
    def norm(self):
        return math.sqrt(self.px ** 2 + self.py ** 2 + self.pz ** 2)


@dataclass(frozen=True)
class ImpuritySpec:
    """Spin-carrying lattice impurities around each donor.

    concentration is the site fraction; gamma_imp the (signed) angular
    gyromagnetic ratio of the impurity nucleus; lattice_density the host
    site density in cm^-3, whose inverse cube root sets the minimal
    approach distance; temp_nuclear_imp the impurity spin temperature.
    """

    concentration: float
    gamma_imp: float
    temp_nuclear_imp: float
    lattice_density: float = 5.0e22

    def __post_init__(self):
        if not 0.0 <= self.concentration <= 1.0:
            raise ValueError("concentration must lie in [0, 1]")
        if self.lattice_density <= 0.0 or self.temp_nuclear_imp <= 0.0:
            raise ValueError("density and temperature must be positive")
        if self.gamma_imp == 0.0:
            raise ValueError("gamma_imp must be nonzero")

    @property
    def approach_m(self):
        """Minimal dipole approach distance a, meters (a^3 = 1/density)."""
        return (1.0 / (self.lattice_density * 1e6)) ** (1.0 / 3.0)


def _sech2(x):
    """sech^2(x) = 1 - tanh^2(x), stable for large |x|.

    The naive 1 - tanh(x)**2 collapses to 0 once tanh rounds to 1
    (|x| > 19), far before the true value underflows.
    """
    e = math.exp(-abs(x))
    s = 2.0 * e / (1.0 + e * e)
    return s * s


def _g_shape(x):
    """x - 1 + exp(-x), series-protected against cancellation."""
    if x < 1e-4:
        return x * x / 2.0 * (1.0 - x / 3.0 + x * x / 12.0
                              - x ** 3 / 60.0)
    return x + math.expm1(-x)


def decrement(channel, t):
    """Dephasing exponent Gamma(t) for the exponential-correlation kernel."""
    if t < 0.0:
        raise ValueError("t must be >= 0")
    x = t / channel.corr_time
    return channel.variance * channel.corr_time ** 2 * _g_shape(x)


def decrement_quadratic(channel, t):
    """Short-time form <dw^2> t^2 / 2 (valid for t << corr_time)."""
    return channel.variance * t * t / 2.0


def is_static_regime(channel):
    """True when dephasing completes well inside the correlation time.

    <dw^2> tau_1^2 > 1 means Gamma reaches order one while the noise is
    still effectively frozen, so the quadratic form governs the decay
    and the process is strongly non-Markovian.
    """
    return channel.variance * channel.corr_time ** 2 > 1.0


def dephasing_time(channel):
    """Time where Gamma = 1/2 (off-diagonals down by exp(-1/2)).

    In the static regime this is 1/sqrt(variance) up to the series
    correction; for weak noise it lands in the linear tail at
    1/(2 variance tau_1). Infinite for a noiseless channel.
    """
    if channel.variance == 0.0:
        return math.inf
    hi = 2.0 * max(1.0 / math.sqrt(channel.variance),
                   1.0 / (channel.variance * channel.corr_time))
    while decrement(channel, hi) < 0.5:
        hi *= 2.0
    return brentq(lambda t: decrement(channel, t) - 0.5, 0.0, hi,
                  xtol=1e-30, rtol=1e-14)


def dephase_density(rho0, gamma_t):
    """Ensemble-averaged density matrix after accumulating exponent gamma_t.

    Diagonal (populations) untouched; coherences scaled by exp(-gamma_t).
    """
    if gamma_t < 0.0:
        raise ValueError("gamma_t must be >= 0")
    damp = math.exp(-gamma_t)
    p_minus = (rho0.px - 1j * rho0.py) * damp
    return 0.5 * np.array([[1.0 + rho0.pz, p_minus],
                           [np.conj(p_minus), 1.0 - rho0.pz]])


def dephased_eigenvalues(rho0, gamma_t):
    """Eigenvalue pair of the averaged matrix, closed form.

    (1 +- sqrt(pz^2 + (px^2+py^2) exp(-2 gamma))) / 2; for a pure state
    this is (1 +- sqrt(1 - (px^2+py^2)(1 - exp(-2 gamma)))) / 2.
    """
    trans2 = rho0.px ** 2 + rho0.py ** 2
    root = math.sqrt(rho0.pz ** 2 + trans2 * math.exp(-2.0 * gamma_t))
    return 0.5 * (1.0 - root), 0.5 * (1.0 + root)


def hyperfine_variance(species, env):
    """<dw^2> of the electron-flip channel at thermal electron occupation.

    A0^2 (1 - tanh^2(gamma_e hbar B / 2kT)) / 4 with the lattice
    temperature governing the electron bath.
    """
    arg = species.gamma_e * HBAR * env.b_field \
        / (2.0 * KB * env.temp_lattice)
    return A0_ELECTRON_FLIP ** 2 * _sech2(arg) / 4.0


def hyperfine_variance_approx(species, env):
    """Deep-cold exponential form 2 A0^2 exp(-gamma_e hbar B / kT)."""
    ratio = boltzmann_ratio(species.gamma_e * env.b_field, env.temp_lattice)
    return 2.0 * A0_ELECTRON_FLIP ** 2 * float(ratio)


def hyperfine_channel(species, env, corr_time):
    """Electron-flip noise channel with its longitudinal time as tau_1."""
    return NoiseChannel(variance=hyperfine_variance(species, env),
                        corr_time=corr_time, kind="hyperfine-electron")


@dataclass(frozen=True)
class FieldTempThreshold:
    """B/T ratios (T/K) above which the electron-flip rate is frozen out."""

    exact: float
    approx: float


def _solve_ratio(variance_of_ratio, target_rate):
    target2 = target_rate ** 2
    if variance_of_ratio(0.0) <= target2:
        return 0.0
    return brentq(lambda r: variance_of_ratio(r) - target2, 0.0, 1e4,
                  xtol=1e-12, rtol=1e-14)


def required_field_over_temp(species, target_rate):
    """Smallest B/T with sqrt(<dw^2>) below target_rate, both variance forms.

    The dephasing rate in the static regime is 1/T_d = sqrt(<dw^2>), so
    the predicate <dw^2> < target_rate^2 pins the usable field-to-
    temperature ratio. Solved by bracketing bisection for the exact tanh
    form and for the exponential approximation.
    """
    if target_rate <= 0.0:
        raise ValueError("target_rate must be positive")
    scale = species.gamma_e * HBAR / KB

    def exact(ratio):
        return A0_ELECTRON_FLIP ** 2 * _sech2(scale * ratio / 2.0) / 4.0

    def approx(ratio):
        return 2.0 * A0_ELECTRON_FLIP ** 2 * math.exp(-scale * ratio)

    return FieldTempThreshold(exact=_solve_ratio(exact, target_rate),
                              approx=_solve_ratio(approx, target_rate))


def _impurity_coupling2(species, imp):
    """(mu0 gamma_i gamma_imp hbar)^2 in (rad/s)^2 m^6."""
    return (MU0 * species.gamma_i * imp.gamma_imp * HBAR) ** 2


def _imp_depolarization(imp, env):
    """1 - tanh^2 of the impurity Zeeman argument: unpolarized fraction."""
    arg = abs(imp.gamma_imp) * HBAR * env.b_field \
        / (2.0 * KB * imp.temp_nuclear_imp)
    return _sech2(arg)


def impurity_variance(species, imp, env):
    """<dw^2> from dipolar fields of partially polarized impurity spins.

    In the dilute regime a donor's shift is dominated by impurities at
    their own typical spacing a_imp = a C^{-1/3}, so the continuum
    second moment of the secular dipole coupling carries C^2:

        C^2 (mu0 gamma_i gamma_imp hbar)^2 (1 - tanh^2(...)) / (60 pi a^6).

    The 60 pi collects (1/4pi)^2 from the coupling, the spin-1/2 moment
    variance 1/4, and the angular-radial average 16 pi / (15 a_imp^3)
    times the impurity density 1/a_imp^3.
    """
    a6 = imp.approach_m ** 6
    return imp.concentration ** 2 * _impurity_coupling2(species, imp) \
        * _imp_depolarization(imp, env) / (60.0 * math.pi * a6)


def sampled_impurity_variance(species, imp, env, n_samples=1_000_000,
                              seed=20260814, shell_factor=10.0):
    """Monte Carlo estimate of impurity_variance from explicit positions.

    Impurities are scattered uniformly in the shell between the typical
    impurity spacing a_imp = a C^{-1/3} and shell_factor * a_imp, at
    number density 1/a_imp^3, and the secular dipole second moment is
    accumulated; the shell truncation loses (1/shell_factor)^3 of the
    integral. Deterministic for a fixed seed.
    """
    if imp.concentration == 0.0:
        return 0.0
    a_imp = imp.approach_m / imp.concentration ** (1.0 / 3.0)
    r_out = shell_factor * a_imp
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 1.0, n_samples)
    radii = (a_imp ** 3 + u * (r_out ** 3 - a_imp ** 3)) ** (1.0 / 3.0)
    cos_t = rng.uniform(-1.0, 1.0, n_samples)
    mean_geo = dipolar_moment_sum(cos_t, radii) / n_samples
    shell_volume = 4.0 * math.pi / 3.0 * (r_out ** 3 - a_imp ** 3)
    density = 1.0 / a_imp ** 3
    coupling2 = _impurity_coupling2(species, imp) / (4.0 * math.pi) ** 2
    moment_var = _imp_depolarization(imp, env) / 4.0
    return coupling2 * moment_var * density * shell_volume * mean_geo


def impurity_channel(species, imp, env, corr_time):
    """Impurity-dipole noise channel; corr_time is the impurity T_par."""
    return NoiseChannel(variance=impurity_variance(species, imp, env),
                        corr_time=corr_time, kind="impurity-dipole")


def allowed_concentration(species, imp, env, target_rate):
    """Impurity fraction keeping the static dephasing rate below target.

    Inverts impurity_variance = target_rate^2 for the concentration; the
    result is a bound, so it can exceed 1 (or be infinite for a fully
    polarized bath) when any occupancy is harmless.
    """
    if target_rate <= 0.0:
        raise ValueError("target_rate must be positive")
    depol = _imp_depolarization(imp, env)
    if depol == 0.0:
        return math.inf
    a6 = imp.approach_m ** 6
    return math.sqrt(target_rate ** 2 * 60.0 * math.pi * a6
                     / (_impurity_coupling2(species, imp) * depol))


def adiabaticity_check(channel, omega_carrier, tau2):
    """True when the stored coherence sees only adiabatic noise.

    Requires the carrier to beat the transverse time (omega * tau_2 > 1,
    strict) and a clear separation tau_1 / tau_2 > 10 so the longitudinal
    kernel is quasi-static on transverse timescales.
    """
    if omega_carrier <= 0.0 or tau2 <= 0.0:
        raise ValueError("omega_carrier and tau2 must be positive")
    return omega_carrier * tau2 > 1.0 and channel.corr_time / tau2 > 10.0
