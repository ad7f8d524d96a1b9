"""Correlated dephasing of two-qubit states.

Slow Gaussian noise shifts each qubit's resonance and the pair coupling,
so the evolution is a diagonal unitary in the product basis
(up-up, up-dn, dn-up, dn-dn) with phases

    theta_k = (s1_k phi_1 + s2_k phi_2) / 2 + s12_k phi_I,

sign patterns s1 = (+,+,-,-), s2 = (+,-,+,-), s12 = (+,-,-,+). Averaging
over a bivariate Gaussian (phi_1, phi_2) damps each coherence by
exp(-Var(accumulated phase difference)/2): the triplet EPR state sees the
difference phi_1 - phi_2 (pair-coupling noise cancels, anticorrelated
noise is harmless), the (up-up +- dn-dn) pair sees the sum phi_1 + phi_2
and dies four times faster under common-mode noise.

Decrements here carry the 1/2 of the Gaussian characteristic function,
<exp(i phi)> = exp(-sigma^2/2); single-qubit and pair ratios (2x at zero
correlation, 0x/4x at full correlation) are convention-free.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import phase_factor_matrix
from .dephasing import decrement

__all__ = [
    "BASIS_LABELS",
    "TwoQubitDensity",
    "CorrelatedPhaseModel",
    "PhaseParams",
    "epr_density",
    "bell_density",
    "partial_pair_density",
    "phase_unitary",
    "conjugate_density",
    "epr_decrement",
    "bell_decrement",
    "averaged_epr",
    "averaged_bell",
    "averaged_partial_pair",
    "pair_purity_loss",
    "sample_correlated_phases",
    "monte_carlo_factors",
    "monte_carlo_average",
]

BASIS_LABELS = ("uu", "ud", "du", "dd")

_SIGN1 = np.array([1.0, 1.0, -1.0, -1.0])
_SIGN2 = np.array([1.0, -1.0, 1.0, -1.0])
_SIGN12 = np.array([1.0, -1.0, -1.0, 1.0])


@dataclass(frozen=True)
class TwoQubitDensity:
    """Validated 4x4 density matrix in the (uu, ud, du, dd) basis."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError("density matrix must be 4x4")
        if np.max(np.abs(m - m.conj().T)) > 1e-14:
            raise ValueError("density matrix must be hermitian")
        if abs(np.trace(m) - 1.0) > 1e-14:
            raise ValueError("density matrix must have unit trace")
        if np.linalg.eigvalsh(m).min() < -1e-12:
            raise ValueError("density matrix must be positive")
        object.__setattr__(self, "matrix", m)

    @property
    def purity(self):
        return float(np.trace(self.matrix @ self.matrix).real)


def epr_density():
    """Projector on the triplet pair (|ud> + |du>)/sqrt(2)."""
    m = np.zeros((4, 4), dtype=complex)
    m[1:3, 1:3] = 0.5
    return TwoQubitDensity(m)


def bell_density(sign=1):
    """Projector on (|uu> + sign |dd>)/sqrt(2)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[3, 3] = 0.5
    m[0, 3] = m[3, 0] = 0.5 * sign
    return TwoQubitDensity(m)


def partial_pair_density(alpha):
    """Projector on sqrt(1-alpha)|ud> + sqrt(alpha)|du>."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    off = math.sqrt(alpha * (1.0 - alpha))
    m = np.zeros((4, 4), dtype=complex)
    m[1, 1] = 1.0 - alpha
    m[2, 2] = alpha
    m[1, 2] = m[2, 1] = off
    return TwoQubitDensity(m)


def phase_unitary(phi1, phi2, phi_i=0.0):
    """Diagonal evolution operator for accumulated phases (radians)."""
    theta = 0.5 * (_SIGN1 * phi1 + _SIGN2 * phi2) + _SIGN12 * phi_i
    return np.diag(np.exp(-1j * theta))


def _as_matrix(rho0):
    return rho0.matrix if hasattr(rho0, "matrix") else np.asarray(rho0,
                                                                  dtype=complex)


def conjugate_density(rho0, phi1, phi2, phi_i=0.0):
    """One realization U rho U^dagger of the diagonal phase evolution."""
    u = phase_unitary(phi1, phi2, phi_i)
    return u @ _as_matrix(rho0) @ u.conj().T


@dataclass(frozen=True)
class PhaseParams:
    """Phase statistics at one instant."""

    sigma1_sq: float
    sigma2_sq: float
    rho12: float
    sigmai_sq: float


@dataclass(frozen=True)
class CorrelatedPhaseModel:
    """Time-dependent bivariate Gaussian statistics of (phi_1, phi_2).

    Each field is either a constant or a callable of time: the accumulated
    phase variances sigma1_sq, sigma2_sq, their cross-correlation rho12 in
    [0, 1], and the pair-coupling phase variance sigmai_sq (irrelevant for
    the EPR and Bell presets, kept for the invariance check).
    """

    sigma1_sq: object
    sigma2_sq: object
    rho12: object
    sigmai_sq: object = 0.0

    @classmethod
    def constant(cls, sigma1_sq, sigma2_sq, rho12, sigmai_sq=0.0):
        return cls(float(sigma1_sq), float(sigma2_sq), float(rho12),
                   float(sigmai_sq))

    @classmethod
    def from_channels(cls, channel1, channel2, rho12, channel_i=None):
        """Phase variances accumulated from frequency-noise channels.

        <exp(i phi)> = exp(-Gamma) identifies sigma^2(t) = 2 Gamma(t).
        """
        return cls(lambda t: 2.0 * decrement(channel1, t),
                   lambda t: 2.0 * decrement(channel2, t),
                   rho12,
                   (lambda t: 2.0 * decrement(channel_i, t))
                   if channel_i is not None else 0.0)

    def at(self, t):
        vals = [f(t) if callable(f) else float(f)
                for f in (self.sigma1_sq, self.sigma2_sq, self.rho12,
                          self.sigmai_sq)]
        s1sq, s2sq, rho, sisq = vals
        if s1sq < 0.0 or s2sq < 0.0 or sisq < 0.0:
            raise ValueError("phase variances must be >= 0")
        if not 0.0 <= rho <= 1.0:
            raise ValueError("rho12 must lie in [0, 1]")
        return PhaseParams(s1sq, s2sq, rho, sisq)


def epr_decrement(model, t):
    """Exponent damping the ud/du coherence: Var(phi_1 - phi_2)/2."""
    p = model.at(t)
    cross = p.rho12 * math.sqrt(p.sigma1_sq * p.sigma2_sq)
    return 0.5 * (p.sigma1_sq - 2.0 * cross + p.sigma2_sq)


def bell_decrement(model, t):
    """Exponent damping the uu/dd coherence: Var(phi_1 + phi_2)/2."""
    p = model.at(t)
    cross = p.rho12 * math.sqrt(p.sigma1_sq * p.sigma2_sq)
    return 0.5 * (p.sigma1_sq + 2.0 * cross + p.sigma2_sq)


def averaged_epr(model, t):
    """Ensemble-averaged triplet-pair density matrix."""
    damp = math.exp(-epr_decrement(model, t))
    m = np.zeros((4, 4), dtype=complex)
    m[1, 1] = m[2, 2] = 0.5
    m[1, 2] = m[2, 1] = 0.5 * damp
    return TwoQubitDensity(m)


def averaged_bell(model, t, sign=1):
    """Ensemble-averaged (|uu> + sign |dd>)/sqrt(2) density matrix."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    damp = math.exp(-bell_decrement(model, t))
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[3, 3] = 0.5
    m[0, 3] = m[3, 0] = 0.5 * sign * damp
    return TwoQubitDensity(m)


def averaged_partial_pair(model, t, alpha):
    """Averaged sqrt(1-alpha)|ud> + sqrt(alpha)|du> density matrix.

    The single coherence damps by the same exponent as the EPR state
    whatever alpha is; only the purity loss depends on alpha.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    damp = math.exp(-epr_decrement(model, t))
    off = math.sqrt(alpha * (1.0 - alpha)) * damp
    m = np.zeros((4, 4), dtype=complex)
    m[1, 1] = 1.0 - alpha
    m[2, 2] = alpha
    m[1, 2] = m[2, 1] = off
    return TwoQubitDensity(m)


def pair_purity_loss(model, t, alpha):
    """1 - tr(rho^2) for the partially entangled pair.

    2 alpha (1-alpha) (1 - exp(-2 Gamma)): zero for product states
    (alpha in {0, 1}) and maximal for the balanced pair.
    """
    gamma = epr_decrement(model, t)
    return 2.0 * alpha * (1.0 - alpha) * (1.0 - math.exp(-2.0 * gamma))


def _draw_phases(model, t, count, seed):
    if count < 1:
        raise ValueError("count must be >= 1")
    p = model.at(t)
    s1 = math.sqrt(p.sigma1_sq)
    s2 = math.sqrt(p.sigma2_sq)
    rng = np.random.Generator(np.random.Philox(key=seed))
    z = rng.standard_normal((count, 3))
    phi1 = s1 * z[:, 0]
    phi2 = s2 * (p.rho12 * z[:, 0]
                 + math.sqrt(1.0 - p.rho12 ** 2) * z[:, 1])
    phi_i = math.sqrt(p.sigmai_sq) * z[:, 2]
    return phi1, phi2, phi_i


def sample_correlated_phases(model, t, count, seed):
    """(count, 2) array of bivariate-normal (phi_1, phi_2) draws.

    Lower-triangular square root of [[s1^2, rho s1 s2], [rho s1 s2, s2^2]]
    applied to a counter-based normal stream: the same seed gives the same
    draws however the batch is later split.
    """
    phi1, phi2, _ = _draw_phases(model, t, count, seed)
    return np.column_stack([phi1, phi2])


def monte_carlo_factors(model, t, count, seed):
    """Mean conjugation factor matrix F and per-element standard errors.

    F[j, k] = <exp(i(theta_k - theta_j))>; the averaged density of any
    initial state is the elementwise product rho0 * F.
    """
    phi1, phi2, phi_i = _draw_phases(model, t, count, seed)
    return phase_factor_matrix(phi1, phi2, phi_i)


def monte_carlo_average(rho0, model, t, count, seed):
    """Sample mean of U rho0 U^dagger over the phase distribution."""
    factors, _ = monte_carlo_factors(model, t, count, seed)
    mean = _as_matrix(rho0) * factors
    # mean of hermitian conjugations: symmetrize away float asymmetry
    return TwoQubitDensity(0.5 * (mean + mean.conj().T))
