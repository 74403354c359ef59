"""Degrading one energetic photon into many low-energy ones raises entropy."""
import math

from thermosteady import entropy
from thermosteady.entropy import MultiplicationEvent

ev = MultiplicationEvent.even_split(10.0, 10, 1.0)   # eV, E_c = 1 eV
rep = entropy.arrow_check(ev)
print(f"10 eV -> 10 x 1 eV: dS/k_B = {rep.forward_delta:.4f} (9 ln 10 = {9 * math.log(10):.4f})")
print(f"time reverse:       dS/k_B = {rep.reverse_delta:.4f}")

print("\nsame photon split n ways")
for n in (1, 2, 5, 10, 20, 50):
    print(f"  n={n:3d}  dS/k_B = {entropy.multiplication_entropy(10.0, 1.0, n).dimensionless:8.3f}")

try:
    entropy.event_entropy_delta(MultiplicationEvent(10.0, (5.0, 4.0), 1.0))
except ValueError as exc:
    print(f"\nnon-conserving event rejected: {exc}")
