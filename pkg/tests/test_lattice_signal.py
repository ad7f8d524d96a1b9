"""Discrete lattice readout signal against quadrature and smeared limits."""

import numpy as np
import pytest
from scipy.integrate import dblquad, quad

from nmrqreg import lattice_signal as ls
from nmrqreg._kernels import (
    HAVE_NUMBA,
    _lattice_flux_numba,
    _lattice_flux_numpy,
    dipole_flux_rectangle,
    lattice_flux,
)
from nmrqreg.constants import HBAR, MU0
from nmrqreg.hyperfine import P31_IN_SI28
from nmrqreg.readout import CoilCircuit, RegisterGeometry

SP = P31_IN_SI28
COIL = CoilCircuit.from_circuit(1e3, 50.0, 7.855e8, 1.0)

# the 16-qubit demonstration lattice: 8 x 8 blocks of 8 chains,
# 20 x 50 nm pitches, 30 nm resonant layer
DEMO = RegisterGeometry(pitch_x_nm=20.0, pitch_y_nm=50.0,
                        plate_thickness_cm=30e-7, qubits_per_molecule=16,
                        molecules_per_block=8, blocks_n=8, blocks_p=8)


def axial_field_integrand(u):
    """x component of a unit dipole field at offset u, for dblquad."""
    def f(z, y):
        r2 = u * u + y * y + z * z
        return (2.0 * u * u - y * y - z * z) / (4.0 * np.pi * r2 ** 2.5)
    return f


def test_rectangle_flux_matches_adaptive_quadrature():
    windows = [
        (0.3, -1.0, 1.0, -0.05, 0.05),
        (2.0, -1.0, 1.0, -0.05, 0.05),
        (0.05, -1.6, 0.4, -0.015, 0.015),
        (-0.7, 0.2, 1.2, -0.3, 0.1),
        (1.0, -0.5, 0.5, -0.5, 0.5),
    ]
    for u, y1, y2, z1, z2 in windows:
        ref, _ = dblquad(axial_field_integrand(u), y1, y2, z1, z2,
                         epsabs=1e-14, epsrel=1e-12)
        assert dipole_flux_rectangle(u, y1, y2, z1, z2) == \
            pytest.approx(ref, rel=1e-8)


def test_rectangle_flux_is_even_in_axial_offset():
    for u in (0.03, 0.4, 2.7):
        fwd = dipole_flux_rectangle(u, -0.6, 0.4, -0.02, 0.05)
        rev = dipole_flux_rectangle(-u, -0.6, 0.4, -0.02, 0.05)
        assert fwd == pytest.approx(rev, rel=1e-14)


def test_flux_integral_counts_enclosed_dipoles():
    """Reciprocity: integrating per-turn flux along an infinite solenoid
    gives exactly 1 per unit moment inside the bore and 0 outside."""
    half_d, half_delta = 0.05, 0.001
    span = 50.0
    tail = 2.0 * (2.0 * half_d) * (2.0 * half_delta) / (4.0 * np.pi * span ** 2)
    for y_off, expect in ((0.0, 1.0), (0.03, 1.0), (0.1, 0.0), (0.3, 0.0)):
        def turn_flux(u):
            return dipole_flux_rectangle(u, -half_d - y_off, half_d - y_off,
                                         -half_delta, half_delta)
        val, _ = quad(turn_flux, -span, span,
                      points=[-half_delta, 0.0, half_delta],
                      limit=800, epsabs=1e-13, epsrel=1e-11)
        assert abs(val - expect) < 3.0 * tail


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba backend not active")
def test_flux_backends_agree():
    rng = np.random.default_rng(7)
    planes = rng.uniform(-2e-6, 2e-6, size=40)
    xs = rng.uniform(-1e-6, 1e-6, size=6)
    ys = rng.uniform(-1.5e-6, 1.5e-6, size=9)
    a = _lattice_flux_numba(planes, xs, ys, 1.6e-6, 15e-9)
    b = _lattice_flux_numpy(planes, xs, ys, 1.6e-6, 15e-9)
    np.testing.assert_allclose(a, b, rtol=1e-12)


def test_single_spin_matches_reference_quadrature():
    x_len = DEMO.solenoid_length_cm * 1e-2
    d_wid = DEMO.plate_width_cm * 1e-2
    delta = DEMO.plate_thickness_cm * 1e-2

    def absflux(x):
        return abs(lattice_flux(np.array([x]), np.array([0.0]),
                                np.array([0.0]), d_wid / 2, delta / 2)[0])

    ref, _ = quad(absflux, -x_len / 2, x_len / 2,
                  points=[-delta, 0.0, delta], limit=400,
                  epsabs=1e-18, epsrel=1e-11)
    got = ls.signal_from_sites([0.0], [0.0], x_len, d_wid, delta, 1.0,
                               COIL.quality_q, COIL.turns_k,
                               COIL.resonance_omega)
    prefactor = COIL.quality_q * COIL.resonance_omega * COIL.turns_k / x_len
    assert got / (prefactor * MU0) == pytest.approx(ref, rel=1e-3)


def test_no_spins_no_signal():
    assert ls.signal_from_sites([], [], 1e-6, 1e-6, 1e-8, 1.0,
                                1e3, 1, 1e9) == 0.0


def test_signal_is_linear_in_moment_and_sites():
    args = dict(solenoid_length_m=2.56e-6, plate_width_m=3.2e-6,
                thickness_m=30e-9, quality_q=1e3, turns_k=1, omega=7.855e8)
    xs = [-3e-7, 2e-7]
    ys = [-5e-8, 1e-7]
    base = ls.signal_from_sites(xs, ys, moment=1.0, **args)
    assert ls.signal_from_sites(xs, ys, moment=2.0, **args) == \
        pytest.approx(2.0 * base, rel=1e-12)
    doubled = ls.signal_from_sites(np.repeat(xs, 2), ys, moment=1.0, **args)
    assert doubled == pytest.approx(2.0 * base, rel=1e-12)


def test_site_positions_center_the_lattice():
    xs, ys = ls.site_positions(DEMO)
    assert xs.size == 8 and ys.size == 64
    assert abs(xs.mean()) < 1e-20 and abs(ys.mean()) < 1e-20
    assert np.diff(xs) == pytest.approx(16 * 20e-9)
    assert np.diff(ys) == pytest.approx(50e-9)


def test_register_signal_matches_smeared_limit():
    """Lattice sum against the logarithmic continuum form, and the frozen
    ratio for the demonstration geometry."""
    vd = ls.discrete_signal(DEMO, SP, COIL)
    vc = ls.continuum_signal(DEMO, SP, COIL)
    ratio = vd / vc
    assert ratio == pytest.approx(0.9824666982856419, rel=1e-9)
    assert abs(ratio - 1.0) < 0.10


def test_geometry_factor_reference_points():
    x_len = DEMO.solenoid_length_cm * 1e-2
    d_wid = DEMO.plate_width_cm * 1e-2
    assert ls.geometry_factor(x_len, d_wid, 30e-9) == \
        pytest.approx(1.0049845644506061, rel=1e-12)
    # the 320 x 315 um plate of 0.1 cm thickness: small negative factor
    plate = ls.geometry_factor(320e-6, 315e-6, 1e-3)
    assert plate == pytest.approx(-0.5301314438984056, rel=1e-12)
    assert 0.5 < abs(plate) < 20.0
    # exact zero on the log boundary
    delta = 1e-6
    assert abs(ls.geometry_factor(delta * np.sqrt(np.e), 3e-6, delta)) < 1e-14


def test_continuum_equals_bulk_times_factor():
    x_len = DEMO.solenoid_length_cm * 1e-2
    d_wid = DEMO.plate_width_cm * 1e-2
    delta = DEMO.plate_thickness_cm * 1e-2
    area = d_wid * delta
    bulk = (MU0 / 4.0) * COIL.quality_q * COIL.turns_k * area \
        * COIL.resonance_omega * (DEMO.n_molecules / (area * x_len)) \
        * SP.gamma_i * HBAR
    want = bulk * ls.geometry_factor(x_len, d_wid, delta)
    assert ls.continuum_signal(DEMO, SP, COIL) == pytest.approx(want, rel=1e-12)


def test_continuum_domain_errors():
    shallow = RegisterGeometry(pitch_x_nm=20.0, pitch_y_nm=50.0,
                               plate_thickness_cm=0.3 * DEMO.solenoid_length_cm,
                               qubits_per_molecule=16, molecules_per_block=8,
                               blocks_n=8, blocks_p=8)
    with pytest.raises(ValueError, match="10"):
        ls.continuum_signal(shallow, SP, COIL)
    thick = RegisterGeometry(pitch_x_nm=20.0, pitch_y_nm=50.0,
                             plate_thickness_cm=0.9 * DEMO.solenoid_length_cm,
                             qubits_per_molecule=16, molecules_per_block=8,
                             blocks_n=8, blocks_p=8)
    with pytest.raises(ValueError, match="log factor"):
        ls.continuum_signal(thick, SP, COIL)


def test_scaling_similar_lattices_share_the_ratio():
    """Doubling every length of a small register leaves the ratio to the
    smeared limit unchanged: the flux kernel is scale free."""
    base = RegisterGeometry(pitch_x_nm=20.0, pitch_y_nm=50.0,
                            plate_thickness_cm=7.5e-7,
                            qubits_per_molecule=8, molecules_per_block=4,
                            blocks_n=4, blocks_p=4)
    grown = RegisterGeometry(pitch_x_nm=40.0, pitch_y_nm=100.0,
                             plate_thickness_cm=15e-7,
                             qubits_per_molecule=8, molecules_per_block=4,
                             blocks_n=4, blocks_p=4)
    r_base = ls.discrete_signal(base, SP, COIL) \
        / ls.continuum_signal(base, SP, COIL)
    r_grown = ls.discrete_signal(grown, SP, COIL) \
        / ls.continuum_signal(grown, SP, COIL)
    assert r_grown == pytest.approx(r_base, rel=1e-9)
    assert abs(r_grown / r_base - 1.0) < 0.10


def test_quadrature_certification_rejects_coarse_rule(monkeypatch):
    real = ls._quad_nodes

    def lobotomized(x_half, columns, delta, level):
        if level == 1:
            nodes = np.linspace(-x_half, x_half, 5)
            weights = np.full(5, 2.0 * x_half / 5.0)
            return nodes, weights
        return real(x_half, columns, delta, level)

    monkeypatch.setattr(ls, "_quad_nodes", lobotomized)
    with pytest.raises(ls.QuadratureError):
        ls.signal_from_sites([0.0], [0.0], 2.56e-6, 3.2e-6, 30e-9, 1.0,
                             1e3, 1, 7.855e8, resolution=1)


def test_rejects_bad_resolution():
    with pytest.raises(ValueError):
        ls.signal_from_sites([0.0], [0.0], 1e-6, 1e-6, 1e-8, 1.0,
                             1e3, 1, 1e9, resolution=0)
