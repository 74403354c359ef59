"""Every bath is somebody else's finite system.

Runs the shipped five-level chain (sample, cryostat, laboratory, planetary
surface, photosphere) and a cryostat whose pump is switched off.
"""
from thermosteady import hierarchy
from thermosteady.runner import find_shipped, run_scenario

result = run_scenario(find_shipped("five-level-hierarchy"))
print("\n".join(result.summary))

print()
warm = run_scenario(find_shipped("cryostat-warmup"))
temps = warm.table("temperatures")
for row in temps.rows[::40]:
    print(f"t={row[0] / 3600:6.1f} h   sample {row[1]:7.2f} K   cryostat {row[2]:7.2f} K")

# the validity bound by hand: 1000 J/K bath absorbing 0.1 W, 10 mK tolerance
v = hierarchy.reservoir_validity(1000.0, 0.1, 10.0, 0.01)
print(f"\nbound {v.bound_seconds:g} s, margin {v.margin:g}, holds: {v.holds}")
