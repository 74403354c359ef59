"""Dimensionless entropy bookkeeping for photon multiplication.

``N`` photons sharing an energy ``E0`` are counted with the scaling model
``W = (E0 / E_c)^(N - 1)``, so the dimensionless entropy is
``(N - 1) ln(E0 / E_c)``.  The model is used literally, as an equality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

from .constants import BOLTZMANN
from .errors import DomainError, ValidationError
from .spectral import EnergyLike, EnergyScale

__all__ = [
    "EntropyValue",
    "MultiplicationEvent",
    "ArrowReport",
    "multiplication_entropy",
    "event_entropy_delta",
    "arrow_check",
    "CONSERVATION_RTOL",
]

CONSERVATION_RTOL = 1e-9


def _energy(x: EnergyLike) -> float:
    return x.joules if isinstance(x, EnergyScale) else float(x)


@dataclass(frozen=True)
class EntropyValue:
    """Entropy stored once as ``ln W``; the SI view multiplies by k_B."""

    dimensionless: float

    def __post_init__(self):
        if not (math.isfinite(self.dimensionless) and self.dimensionless >= 0.0):
            raise DomainError(f"entropy must be finite and >= 0, got {self.dimensionless}")

    @property
    def si(self) -> float:
        """Entropy in J/K."""
        return BOLTZMANN * self.dimensionless

    def __float__(self):
        return self.dimensionless


@dataclass(frozen=True)
class MultiplicationEvent:
    """One photon of energy ``input_energy`` converted into ``output_energies``.

    Energies share a unit with ``ec`` (joules when ``ec`` is an
    :class:`EnergyScale`).  Energy conservation is checked by
    :meth:`check_conservation`, not at construction, so that violating
    events can be represented and rejected explicitly.
    """

    input_energy: float
    output_energies: Tuple[float, ...]
    ec: EnergyLike

    def __post_init__(self):
        outs = tuple(float(e) for e in self.output_energies)
        object.__setattr__(self, "output_energies", outs)
        if not self.input_energy > 0.0:
            raise ValidationError("input photon energy must be > 0")
        if not outs:
            raise ValidationError("event needs at least one output photon")
        if any(not (e > 0.0) for e in outs):
            raise ValidationError("output photon energies must be > 0")
        if not _energy(self.ec) > 0.0:
            raise ValidationError("reference energy scale must be > 0")

    @classmethod
    def even_split(cls, input_energy: float, n: int, ec: EnergyLike) -> "MultiplicationEvent":
        return cls(input_energy, (input_energy / n,) * n, ec)

    @property
    def n_out(self) -> int:
        return len(self.output_energies)

    def conservation_error(self) -> float:
        return abs(math.fsum(self.output_energies) - self.input_energy) / self.input_energy

    def check_conservation(self, rtol: float = CONSERVATION_RTOL) -> None:
        err = self.conservation_error()
        if err > rtol:
            raise ValidationError(
                f"photon energies not conserved: relative mismatch {err:.3e} > {rtol:.0e}"
            )


def multiplication_entropy(e0: EnergyLike, ec: EnergyLike, n: int) -> EntropyValue:
    """``(n - 1) ln(e0 / ec)`` for ``n`` photons sharing ``e0``.

    Requires ``e0 > ec > 0``: below one quantum of ``ec`` per mode the
    counting model does not apply.
    """
    e0, ec = _energy(e0), _energy(ec)
    if not ec > 0.0:
        raise DomainError("ec must be > 0")
    if not e0 > ec:
        raise DomainError(f"counting model needs e0 > ec (got e0={e0}, ec={ec})")
    if int(n) != n or n < 1:
        raise DomainError(f"photon count must be an integer >= 1, got {n}")
    return EntropyValue((int(n) - 1) * math.log(e0 / ec))


def event_entropy_delta(event: MultiplicationEvent) -> EntropyValue:
    event.check_conservation()
    return multiplication_entropy(event.input_energy, event.ec, event.n_out)


@dataclass(frozen=True)
class ArrowReport:
    forward: EntropyValue
    reverse_delta: float  # dimensionless, <= 0

    @property
    def forward_delta(self) -> float:
        return self.forward.dimensionless

    @property
    def reverse_decreases(self) -> bool:
        return self.reverse_delta < 0.0


def arrow_check(forward: MultiplicationEvent) -> ArrowReport:
    """Entropy change of an event and of its time reverse (photon combination)."""
    if forward.n_out < 2:
        raise DomainError("arrow check needs an event with at least two output photons")
    fwd = event_entropy_delta(forward)
    return ArrowReport(fwd, -fwd.dimensionless)
