"""Collisions decide the Maxwell shape; radiation decides E_c.

A homogeneous hard-sphere argon gas starts with only two speeds.  Elastic
collisions make the speed distribution Maxwellian without changing the
energy.  A gray-body loss to vacuum then lowers E_c while the shape stays
Maxwellian throughout.
"""
from dataclasses import replace

from thermosteady import gas
from thermosteady.constants import BOLTZMANN
from thermosteady.gas import Bimodal, GrayBodyChannel

ARGON = 6.6335e-26
seed = 20240607

state = gas.init_gas(10_000, ARGON, Bimodal(200.0, 578.0), seed)
dt = 0.1 * state.mean_free_time()
rng = gas.make_rng(seed, 1)

state, records = gas.run_gas(state, dt, 400, rng, record_every=50)
print("collisions only")
for r in records:
    print(f"  t={r.time * 1e9:6.2f} ns  T_fit={r.fitted_ec / BOLTZMANN:7.2f} K  "
          f"KS p={r.ks_pvalue:.3g}  H={r.h_value:.4f}")

state = replace(state, radiative=GrayBodyChannel(1.0e8))
state, records = gas.run_gas(state, dt, 400, rng, record_every=50)
print("radiating to vacuum")
for r in records:
    print(f"  t={r.time * 1e9:6.2f} ns  T_fit={r.fitted_ec / BOLTZMANN:7.2f} K  KS p={r.ks_pvalue:.3g}")
