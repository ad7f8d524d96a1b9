"""Hot numerical kernels with optional numba acceleration.

Three loops dominate the runtime of the package: the dipole-flux lattice
sum behind the discrete readout signal, the Monte Carlo phase-factor
reduction behind the two-qubit dephasing sampler, and the impurity
second-moment reduction. Each has a compiled (numba @njit) form and a
vectorized numpy twin with identical semantics.

Selection: numba is used when importable, unless NMRQREG_DISABLE_NUMBA=1
is set, in which case the numpy twins are used. Results are deterministic
for a fixed backend; the two backends agree to floating-point roundoff.
"""

import os

import numpy as np

_DISABLED = os.environ.get("NMRQREG_DISABLE_NUMBA", "0") == "1"

try:
    if _DISABLED:
        raise ImportError("numba disabled via NMRQREG_DISABLE_NUMBA")
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


# ---------------------------------------------------------------------------
# dipole flux through a rectangle
#
# A point dipole of unit moment along +x sits at the origin. The flux of its
# field through the rectangle {x = u, y in [y1, y2], z in [z1, z2]} follows
# from the loop integral of the vector potential A = (0, -z, y)/(4 pi r^3)
# around the rectangle edges (the mu0*m scale is applied by the caller).
# The edge primitive is
#     int dy / r^3 = y / ((u^2 + z^2) R),   R = sqrt(u^2 + y^2 + z^2),
# and the z-edges give the same form with y and z swapped.
# ---------------------------------------------------------------------------


@njit(cache=True)
def _edge_y(u2, y, z):
    r = np.sqrt(u2 + y * y + z * z)
    return y / ((u2 + z * z) * r)


@njit(cache=True)
def _edge_z(u2, y, z):
    r = np.sqrt(u2 + y * y + z * z)
    return z / ((u2 + y * y) * r)


@njit(cache=True)
def _flux_rect(u, y1, y2, z1, z2):
    u2 = u * u
    val = -z1 * (_edge_y(u2, y2, z1) - _edge_y(u2, y1, z1))
    val += y2 * (_edge_z(u2, y2, z2) - _edge_z(u2, y2, z1))
    val += z2 * (_edge_y(u2, y1, z2) - _edge_y(u2, y2, z2)) * (-1.0)
    val += -y1 * (_edge_z(u2, y1, z2) - _edge_z(u2, y1, z1))
    return val / (4.0 * np.pi)


@njit(cache=True)
def _lattice_flux_numba(x_planes, xs, ys, half_d, half_delta):
    out = np.zeros(x_planes.shape[0])
    for k in range(x_planes.shape[0]):
        acc = 0.0
        for i in range(xs.shape[0]):
            u = x_planes[k] - xs[i]
            for j in range(ys.shape[0]):
                acc += _flux_rect(u, -half_d - ys[j], half_d - ys[j],
                                  -half_delta, half_delta)
        out[k] = acc
    return out


def _flux_rect_numpy(u, y1, y2, z1, z2):
    u2 = u * u

    def edge_y(y, z):
        return y / ((u2 + z * z) * np.sqrt(u2 + y * y + z * z))

    def edge_z(y, z):
        return z / ((u2 + y * y) * np.sqrt(u2 + y * y + z * z))

    val = -z1 * (edge_y(y2, z1) - edge_y(y1, z1))
    val = val + y2 * (edge_z(y2, z2) - edge_z(y2, z1))
    val = val - z2 * (edge_y(y1, z2) - edge_y(y2, z2))
    val = val - y1 * (edge_z(y1, z2) - edge_z(y1, z1))
    return val / (4.0 * np.pi)


def _lattice_flux_numpy(x_planes, xs, ys, half_d, half_delta):
    u = x_planes[:, None] - xs[None, :]          # (K, n)
    y1 = (-half_d - ys)[None, None, :]           # (1, 1, m)
    y2 = (half_d - ys)[None, None, :]
    contrib = _flux_rect_numpy(u[:, :, None], y1, y2, -half_delta, half_delta)
    return contrib.sum(axis=(1, 2))


def dipole_flux_rectangle(u, y1, y2, z1, z2):
    """Unit-moment dipole flux through one rectangle (see module notes)."""
    return float(_flux_rect_numpy(np.float64(u), np.float64(y1),
                                  np.float64(y2), np.float64(z1),
                                  np.float64(z2)))


def lattice_flux(x_planes, xs, ys, half_d, half_delta):
    """Summed unit-moment flux at each turn plane.

    x_planes: sample positions along the solenoid axis; xs, ys: dipole
    coordinates (all dipoles at z = 0); the rectangle spans
    [-half_d, half_d] x [-half_delta, half_delta] around the axis.
    """
    x_planes = np.ascontiguousarray(x_planes, dtype=np.float64)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    if HAVE_NUMBA:
        return _lattice_flux_numba(x_planes, xs, ys,
                                   float(half_d), float(half_delta))
    return _lattice_flux_numpy(x_planes, xs, ys,
                               float(half_d), float(half_delta))


# ---------------------------------------------------------------------------
# Monte Carlo phase-factor reduction
#
# For two-qubit z-dephasing each basis state k accumulates a phase
# theta_k = 0.5*(s1_k phi1 + s2_k phi2) + s12_k phiI with sign patterns
# s1, s2 = (+,+,-,-), (+,-,+,-) and s12 = (+,-,-,+). The sampler needs the
# mean of exp(i(theta_k - theta_j)) over draws, plus the standard error of
# each matrix element, derived from per-sample variance of the real and
# imaginary parts.
# ---------------------------------------------------------------------------

_S1 = np.array([1.0, 1.0, -1.0, -1.0])
_S2 = np.array([1.0, -1.0, 1.0, -1.0])
_S12 = np.array([1.0, -1.0, -1.0, 1.0])


@njit(cache=True)
def _phase_moments_numba(phi1, phi2, phi_i, s1, s2, s12):
    n = phi1.shape[0]
    sum_re = np.zeros((4, 4))
    sum_im = np.zeros((4, 4))
    sum_re2 = np.zeros((4, 4))
    sum_im2 = np.zeros((4, 4))
    theta = np.empty(4)
    for m in range(n):
        for k in range(4):
            theta[k] = 0.5 * (s1[k] * phi1[m] + s2[k] * phi2[m]) \
                + s12[k] * phi_i[m]
        for j in range(4):
            for k in range(4):
                d = theta[k] - theta[j]
                c = np.cos(d)
                s = np.sin(d)
                sum_re[j, k] += c
                sum_im[j, k] += s
                sum_re2[j, k] += c * c
                sum_im2[j, k] += s * s
    return sum_re, sum_im, sum_re2, sum_im2


def _phase_moments_numpy(phi1, phi2, phi_i, s1, s2, s12):
    theta = 0.5 * (np.outer(phi1, s1) + np.outer(phi2, s2)) \
        + np.outer(phi_i, s12)                       # (n, 4)
    diff = theta[:, None, :] - theta[:, :, None]     # (n, j, k)
    c = np.cos(diff)
    s = np.sin(diff)
    return c.sum(axis=0), s.sum(axis=0), (c * c).sum(axis=0), (s * s).sum(axis=0)


def phase_factor_matrix(phi1, phi2, phi_i, batch=262144):
    """Mean two-qubit dephasing factor matrix and its standard errors.

    Returns (F, stderr) where F[j, k] = <exp(i(theta_k - theta_j))> over the
    supplied phase draws and stderr[j, k] bounds the per-element statistical
    error (max of the real/imag standard errors). Batched so the numpy twin
    does not allocate n x 16 temporaries for n ~ 1e6.
    """
    phi1 = np.ascontiguousarray(phi1, dtype=np.float64)
    phi2 = np.ascontiguousarray(phi2, dtype=np.float64)
    phi_i = np.ascontiguousarray(phi_i, dtype=np.float64)
    n = phi1.shape[0]
    if n < 1:
        raise ValueError("need at least one sample")
    impl = _phase_moments_numba if HAVE_NUMBA else _phase_moments_numpy
    sum_re = np.zeros((4, 4))
    sum_im = np.zeros((4, 4))
    sum_re2 = np.zeros((4, 4))
    sum_im2 = np.zeros((4, 4))
    for lo in range(0, n, batch):
        hi = min(lo + batch, n)
        a, b, c, d = impl(phi1[lo:hi], phi2[lo:hi], phi_i[lo:hi],
                          _S1, _S2, _S12)
        sum_re += a
        sum_im += b
        sum_re2 += c
        sum_im2 += d
    mean_re = sum_re / n
    mean_im = sum_im / n
    var_re = np.maximum(sum_re2 / n - mean_re ** 2, 0.0)
    var_im = np.maximum(sum_im2 / n - mean_im ** 2, 0.0)
    stderr = np.sqrt(np.maximum(var_re, var_im) / n)
    return mean_re + 1j * mean_im, stderr


# ---------------------------------------------------------------------------
# impurity dipolar second moment
# ---------------------------------------------------------------------------


@njit(cache=True)
def _angular_r6_numba(cos_theta, r):
    acc = 0.0
    for i in range(r.shape[0]):
        g = 1.0 - 3.0 * cos_theta[i] * cos_theta[i]
        acc += g * g / r[i] ** 6
    return acc


def _angular_r6_numpy(cos_theta, r):
    g = 1.0 - 3.0 * cos_theta * cos_theta
    return float(np.sum(g * g / r ** 6))


def dipolar_moment_sum(cos_theta, r):
    """Sum of (1 - 3 cos^2 theta)^2 / r^6 over sampled impurity positions."""
    cos_theta = np.ascontiguousarray(cos_theta, dtype=np.float64)
    r = np.ascontiguousarray(r, dtype=np.float64)
    if HAVE_NUMBA:
        return float(_angular_r6_numba(cos_theta, r))
    return _angular_r6_numpy(cos_theta, r)
