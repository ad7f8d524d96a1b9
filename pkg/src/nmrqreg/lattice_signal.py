"""Readout voltage of the planar register summed spin by spin.

The register's resonant spins form an n x (p N0) lattice in the z = 0
plane of the plate. The per-turn flux of each spin (a point dipole of the
detected moment gamma_i hbar / 4 along the solenoid axis, see
detected_moment) through the D x delta coil cross-section has a closed
form via the loop integral of the dipole vector potential, so the
"discrete" signal reduces to an exact lattice sum and a single 1-D
quadrature along the solenoid axis:

    |V| = Q omega (K/X) int_{-X/2}^{X/2} | sum_sites Phi(x) | dx.

The continuum counterpart replaces the sum by a smeared magnetization and
keeps the logarithmically dominant part of the flux kernel, giving the
bulk signal times (X/(pi D)) log(X/(delta sqrt(e))). Both are evaluated in
SI and returned in volts. The quadrature uses panels geometrically graded
toward each spin column (the integrand has a cusp and a sign change within
~delta of a column) with Gauss-Legendre nodes inside each panel, a fixed
summation order, and an error estimate from one extra refinement level.
"""

import numpy as np

from .constants import HBAR, MU0
from ._kernels import lattice_flux

__all__ = [
    "QuadratureError",
    "site_positions",
    "detected_moment",
    "signal_from_sites",
    "discrete_signal",
    "geometry_factor",
    "continuum_signal",
]

_CM = 1e-2


class QuadratureError(RuntimeError):
    """Raised when the x-quadrature cannot certify 1% accuracy."""


def site_positions(geom):
    """Resonant-spin coordinates in meters, centered on the coil axis.

    One resonant spin per molecule: n columns at the molecule length
    L*l_x along x, p*N0 rows at pitch l_y along y, all at z = 0. The
    half-integer centering keeps the count-per-length densities exact.
    """
    step_x = geom.qubits_per_molecule * geom.pitch_x_nm * 1e-9
    n = geom.blocks_n
    xs = (np.arange(n) - (n - 1) / 2.0) * step_x
    rows = geom.blocks_p * geom.molecules_per_block
    ys = (np.arange(rows) - (rows - 1) / 2.0) * geom.pitch_y_nm * 1e-9
    return xs, ys


def detected_moment(species):
    """Effective dipole moment per resonant spin seen by the coil, J/T.

    The precessing transverse moment of a spin-1/2 coherence has amplitude
    gamma_i hbar / 2; phase-sensitive detection of one quadrature halves
    it. The product gamma_i hbar / 4 is the same convention that puts the
    mu0/4 prefactor in the bulk signal, so discrete and continuum paths
    stay directly comparable.
    """
    return species.gamma_i * HBAR / 4.0


def _panel_edges(x_half, columns, floor):
    edges = [-x_half, x_half]
    cols = np.sort(np.asarray(columns, dtype=float))
    for i, c in enumerate(cols):
        edges.append(c)
        left_gap = (c - cols[i - 1]) / 2.0 if i > 0 else c + x_half
        right_gap = (cols[i + 1] - c) / 2.0 if i + 1 < len(cols) else x_half - c
        for gap, sgn in ((left_gap, -1.0), (right_gap, 1.0)):
            h = gap
            while h > floor:
                edges.append(c + sgn * h)
                h *= 0.5
    edges = np.unique(np.clip(np.asarray(edges), -x_half, x_half))
    # drop zero-width panels left over from clipping
    keep = np.ones(len(edges), dtype=bool)
    keep[1:] = np.diff(edges) > 1e-18 * max(x_half, 1e-30)
    return edges[keep]


def _quad_nodes(x_half, columns, delta, level):
    order = 6 * level + 6
    floor = delta / (2.0 * level + 2.0)
    edges = _panel_edges(x_half, columns, floor)
    gx, gw = np.polynomial.legendre.leggauss(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    weights = (half[:, None] * gw[None, :]).ravel()
    return nodes, weights


def signal_from_sites(xs_m, ys_m, solenoid_length_m, plate_width_m,
                      thickness_m, moment, quality_q, turns_k, omega,
                      resolution=1):
    """Voltage amplitude from explicit dipole coordinates (SI inputs).

    moment is the dipole moment per spin in J/T. Raises QuadratureError
    when two refinement levels disagree by more than 1%.
    """
    xs_m = np.atleast_1d(np.asarray(xs_m, dtype=float))
    ys_m = np.atleast_1d(np.asarray(ys_m, dtype=float))
    if xs_m.size == 0 or ys_m.size == 0:
        return 0.0
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    x_half = solenoid_length_m / 2.0
    half_d = plate_width_m / 2.0
    half_delta = thickness_m / 2.0

    def level_integral(level):
        nodes, weights = _quad_nodes(x_half, xs_m, thickness_m, level)
        flux = lattice_flux(nodes, xs_m, ys_m, half_d, half_delta)
        return float(np.sum(weights * np.abs(flux)))

    coarse = level_integral(resolution)
    fine = level_integral(resolution + 1)
    scale = max(abs(fine), 1e-300)
    err = abs(fine - coarse) / scale
    if err > 0.01:
        raise QuadratureError(
            "x-quadrature disagrees by %.2f%% between refinement levels; "
            "raise resolution" % (100.0 * err))
    prefactor = quality_q * omega * turns_k / solenoid_length_m
    return prefactor * MU0 * moment * fine


def discrete_signal(geom, species, coil, solenoid_length_cm=None,
                    plate_width_cm=None, resolution=1):
    """Exact lattice-sum readout voltage, volts.

    The coil cross-section is taken as plate_width x plate_thickness
    (area = D * delta, the geometry the flux sum assumes); the coil object
    contributes Q, K and the resonance frequency.
    """
    x_len = (geom.solenoid_length_cm if solenoid_length_cm is None
             else solenoid_length_cm) * _CM
    d_wid = (geom.plate_width_cm if plate_width_cm is None
             else plate_width_cm) * _CM
    xs, ys = site_positions(geom)
    moment = detected_moment(species)
    return signal_from_sites(
        xs, ys, x_len, d_wid, geom.plate_thickness_cm * _CM, moment,
        coil.quality_q, coil.turns_k, coil.resonance_omega,
        resolution=resolution)


def geometry_factor(solenoid_length_m, plate_width_m, thickness_m):
    """(X/(pi D)) log(X/(delta sqrt(e))): the discrete-to-bulk factor.

    Returned signed: it is zero exactly at X = delta sqrt(e) and negative
    below, where the smeared limit no longer represents the lattice sum
    (continuum_signal refuses that regime; this helper stays unrestricted
    so thick-plate layouts can still be sized by magnitude).
    """
    arg = solenoid_length_m / (thickness_m * np.sqrt(np.e))
    return float(solenoid_length_m / (np.pi * plate_width_m) * np.log(arg))


def continuum_signal(geom, species, coil, solenoid_length_cm=None,
                     plate_width_cm=None):
    """Smeared-magnetization limit of the lattice signal, volts.

    Bulk signal (mu0/4) Q K A omega (N/V_s) gamma_i hbar times the
    geometry factor, with A = D * delta and V_s = A * X. Requires
    X > 10 delta, well inside the domain where keeping only the
    logarithmic term of the flux kernel is defensible.
    """
    x_len = (geom.solenoid_length_cm if solenoid_length_cm is None
             else solenoid_length_cm) * _CM
    d_wid = (geom.plate_width_cm if plate_width_cm is None
             else plate_width_cm) * _CM
    delta = geom.plate_thickness_cm * _CM
    if x_len <= delta * np.sqrt(np.e):
        raise ValueError("log factor non-positive: solenoid length must "
                         "exceed plate thickness * sqrt(e)")
    if x_len <= 10.0 * delta:
        raise ValueError("need solenoid length > 10 * plate thickness")
    area = d_wid * delta
    volume = area * x_len
    factor = geometry_factor(x_len, d_wid, delta)
    bulk = (MU0 / 4.0) * coil.quality_q * coil.turns_k * area \
        * coil.resonance_omega * (geom.n_molecules / volume) \
        * species.gamma_i * HBAR
    return float(bulk * factor)
