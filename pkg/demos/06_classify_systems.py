"""Does a system have a temperature?  Three archetypes from the shipped scenarios."""
from thermosteady.runner import find_shipped, run_scenario

for name in ("heated-cavity", "bathed-sample", "single-atom-counterexample"):
    result = run_scenario(find_shipped(name))
    print(f"== {name}")
    print("\n".join(result.summary))
    print()
