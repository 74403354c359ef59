"""Matter in a Planck field settles to Boltzmann populations; without the
field it just cools.

A three-level system is coupled through Einstein A/B coefficients either to
a 3000 K Planck bath or to vacuum.
"""
import numpy as np

from thermosteady import kinetics, spectral
from thermosteady.constants import ELECTRONVOLT
from thermosteady.kinetics import BathCoupling, LevelSystem
from thermosteady.spectral import EnergyScale

system = LevelSystem.from_ev(
    [(0.0, 1), (0.3, 3), (0.5, 5)],
    [(1, 0, 1.0e6), (2, 1, 3.0e5), (2, 0, 5.0e5)],
)
ec = EnergyScale.from_kelvin(3000)
grid = np.geomspace(1e13, 3e15, 1001)
bath = BathCoupling(spectral.ideal_planck_field(ec, grid))

steady = kinetics.steady_state(system, bath)
boltz = kinetics.boltzmann_populations(system.energies, system.degeneracies, ec)
traj = kinetics.evolve(system, bath, 40e-6, n_samples=9)

print("time (us)   n0          n1          n2")
for t, p in zip(traj.times, traj.populations):
    print(f"{t * 1e6:8.1f}   " + "  ".join(f"{x:.4e}" for x in p))
print("steady     " + "  ".join(f"{x:.4e}" for x in steady))
print("Boltzmann  " + "  ".join(f"{x:.4e}" for x in boltz))
print(f"net radiated power at the fixed point: {kinetics.net_radiated_power(system, bath, steady):.2e} W")

# switch the field off
hot = system.with_populations([0, 0, 1])
cooling = kinetics.evolve(hot, BathCoupling(), 20e-6, n_samples=9)
print("\nvacuum: mean energy (eV) falls monotonically")
print(np.round(cooling.mean_energy() / ELECTRONVOLT, 5))
