"""Planck spectrum in units of the characteristic energy E_c = k_B T.

The mean photon energy and the spectral peak of a thermal photon field are
fixed multiples of E_c.
"""
import numpy as np

from thermosteady import spectral
from thermosteady.constants import PLANCK
from thermosteady.spectral import EnergyScale

# Bose-Einstein integrals: closed form Gamma(s) zeta(s) against quadrature
for s in (2, 3, 4, 5):
    closed = spectral.bose_einstein_integral(s, method="closed")
    quad = spectral.bose_einstein_integral_quad(s)
    print(f"s={s}: closed {closed:.12f}  quadrature {quad:.12f}")

# the two that matter: photon number (s=3) and energy (s=4)
ratio = spectral.mean_photon_energy(1.0)
print(f"\nmean photon energy = {ratio:.6f} E_c")
print(f"Wien peak          = {spectral.wien_peak_ratio():.6f} E_c")

# the same constants read off a sampled field
ec = EnergyScale.from_kelvin(5778)
field = spectral.ideal_planck_field(ec, spectral.planck_grid(ec, 1e-4, 60, 20001))
x = field.frequencies * PLANCK / ec.joules
energy_density = x**3 * field.occupation
print(f"\nsolar photosphere, E_c = {ec.ev:.3f} eV")
print(f"  sampled mean photon energy / E_c = {field.mean_photon_energy() / ec.joules:.5f}")
print(f"  sampled spectral peak / E_c      = {x[np.argmax(energy_density)]:.4f}")

for t in (2.725, 300.0, 5778.0):
    print(f"blackbody flux at {t:>7g} K: {spectral.stefan_boltzmann_flux(t):.4g} W/m^2")
