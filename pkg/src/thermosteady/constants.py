"""Physical constants (CODATA 2018), SI units.

Everything in the package reads constants from here so that a single
table pins the numerical values.
"""

import math

# exact by SI definition
PLANCK = 6.62607015e-34  # J s
SPEED_OF_LIGHT = 299792458.0  # m / s
BOLTZMANN = 1.380649e-23  # J / K
ELEMENTARY_CHARGE = 1.602176634e-19  # C

# recommended values
VACUUM_PERMITTIVITY = 8.8541878128e-12  # F / m
BOHR_RADIUS = 5.29177210903e-11  # m

HBAR = PLANCK / (2.0 * math.pi)
ELECTRONVOLT = ELEMENTARY_CHARGE  # J / eV

# sigma = 2 pi^5 k^4 / (15 h^3 c^2); tabulated CODATA value 5.670374419e-8
STEFAN_BOLTZMANN = (
    2.0 * math.pi**5 * BOLTZMANN**4 / (15.0 * PLANCK**3 * SPEED_OF_LIGHT**2)
)

# Apery's constant, zeta(3)
ZETA3 = 1.2020569031595942853997381615114

# pi^4 / (30 zeta(3)): mean photon energy of a Planck field in units of E_c
MEAN_PHOTON_ENERGY_RATIO = math.pi**4 / (30.0 * ZETA3)
