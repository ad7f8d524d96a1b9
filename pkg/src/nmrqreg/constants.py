"""Physical constants and silicon:phosphorus material parameters.

All values in SI unless the name says otherwise. Gyromagnetic ratios are
angular (rad s^-1 T^-1). The hyperfine coupling is stored as an angular
frequency A_OMEGA = A/hbar so level formulas can stay in rad/s throughout.
"""

import numpy as np

HBAR = 1.054571817e-34      # J s
KB = 1.380649e-23           # J/K
MU0 = 4.0e-7 * np.pi        # T^2 m^3 / J

# electron (free-electron value, adequate for donor electrons in Si)
GAMMA_E = 1.7608e11         # rad s^-1 T^-1

# 31P nucleus
GAMMA_P31 = 1.08e8          # rad s^-1 T^-1

# 31P donor contact hyperfine coupling in silicon, as angular frequency
A_OMEGA = 2.0 * np.pi * 116.0e6   # rad/s  (A/hbar)

# residual 29Si bath / impurity species
GAMMA_SI29 = 5.3e7          # rad s^-1 T^-1
NATURAL_ABUNDANCE_SI29 = 4.7e-2

# host lattice
SI_ATOM_DENSITY = 5.0e28    # m^-3 (5e22 cm^-3)

# convenience conversions
CM3 = 1.0e-6                # m^3 per cm^3
NM = 1.0e-9
UM = 1.0e-6


def boltzmann_ratio(omega, temperature):
    """exp(-hbar*omega/kT) for an angular frequency gap omega."""
    return np.exp(-HBAR * np.asarray(omega) / (KB * temperature))
