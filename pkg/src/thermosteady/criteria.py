"""Checklists deciding whether a described system has a genuine temperature.

Two routes lead to a temperature:

* dynamic steady state: a loss channel, an identifiable source, energy
  balance between them, and an emitted spectrum close to Planck at the
  claimed E_c;
* passive steady state: a characterised bath, evidence of exchange with
  it, and Boltzmann level populations at the bath E_c.

Temperature is collective, so fewer than two degrees of freedom rules it
out whatever the other evidence says.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .constants import PLANCK
from .errors import DomainError, InconclusiveError, InsufficientEvidenceError
from .kinetics import LevelSystem, boltzmann_populations
from .spectral import EnergyLike, EnergyScale, SpectralField, as_joules, planck_occupation

__all__ = [
    "Classification",
    "Bath",
    "SystemDescription",
    "CriterionResult",
    "Verdict",
    "SpectralCheck",
    "BalanceCheck",
    "spectral_consistency",
    "energy_balance",
    "population_consistency",
    "classify",
    "decide",
    "Tolerances",
]

BAND = (0.1, 10.0)  # h nu / E_c range compared by spectral_consistency


@dataclass(frozen=True)
class Tolerances:
    spectral: float = 0.05
    balance: float = 0.05
    population: float = 0.05
    occupation_floor: float = 1e-12
    population_floor: float = 1e-9


class Classification(enum.Enum):
    DYNAMIC_STEADY_STATE = "DynamicSteadyState"
    PASSIVE_STEADY_STATE = "PassiveSteadyState"
    NOT_A_TEMPERATURE = "NotATemperature"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SpectralCheck:
    passed: bool
    residual: float


@dataclass(frozen=True)
class BalanceCheck:
    passed: bool
    imbalance: float
    accumulating: bool = False


def spectral_consistency(
    field: SpectralField,
    ec: EnergyLike,
    tolerance: float = 0.05,
    floor: float = 1e-12,
) -> SpectralCheck:
    """Largest relative deviation of ``field`` from Planck at ``ec`` within the band.

    Only grid points with ``h nu / E_c`` in ``[0.1, 10]`` are compared.

    Raises
    ------
    InsufficientEvidenceError
        If the grid does not span the whole band.
    """
    e = as_joules(ec)
    x = PLANCK * field.frequencies / e
    if x[0] > BAND[0] or x[-1] < BAND[1]:
        raise InsufficientEvidenceError(
            f"spectrum covers h nu/E_c in [{x[0]:.3g}, {x[-1]:.3g}], "
            f"which does not span [{BAND[0]}, {BAND[1]}]"
        )
    sel = (x >= BAND[0]) & (x <= BAND[1])
    ref = planck_occupation(field.frequencies[sel], e)
    residual = float(np.max(np.abs(field.occupation[sel] - ref) / (ref + floor)))
    return SpectralCheck(residual <= tolerance, residual)


def energy_balance(generation: float, radiated: float, tolerance: float = 0.05) -> BalanceCheck:
    """Relative mismatch between internal generation and radiated output.

    Zero radiated power with positive generation is an automatic failure
    flagged ``accumulating`` (the system warms).
    """
    if not (generation >= 0.0 and radiated >= 0.0):
        raise DomainError("powers must be >= 0")
    if radiated == 0.0:
        if generation > 0.0:
            return BalanceCheck(False, math.inf, accumulating=True)
        raise DomainError("energy balance undefined with zero generation and zero emission")
    imbalance = abs(generation - radiated) / radiated
    return BalanceCheck(imbalance <= tolerance, imbalance)


def population_consistency(
    levels: LevelSystem, ec: EnergyLike, tolerance: float = 0.05, floor: float = 1e-9
) -> SpectralCheck:
    """Largest relative deviation of measured populations from Boltzmann at ``ec``."""
    ref = boltzmann_populations(levels.energies, levels.degeneracies, ec)
    residual = float(np.max(np.abs(levels.populations - ref) / (ref + floor)))
    return SpectralCheck(residual <= tolerance, residual)


@dataclass(frozen=True)
class Bath:
    ec: EnergyScale
    exchange_evidence: bool = True


@dataclass
class SystemDescription:
    """Evidence available about a system claimed to sit at ``claimed_ec``."""

    claimed_ec: EnergyScale
    n_dof: int
    spectrum: Optional[SpectralField] = None
    generation: Optional[float] = None  # W
    radiated: Optional[float] = None  # W
    bath: Optional[Bath] = None
    populations: Optional[LevelSystem] = None
    source: Optional[str] = None

    def __post_init__(self):
        if int(self.n_dof) != self.n_dof or self.n_dof < 0:
            raise DomainError("n_dof must be a non-negative integer")

    def has_evidence(self) -> bool:
        return any(
            x is not None
            for x in (self.spectrum, self.generation, self.radiated, self.bath, self.populations)
        )


@dataclass(frozen=True)
class CriterionResult:
    name: str
    group: str  # "dynamic", "passive" or "collective"
    passed: bool
    residual: float = math.nan
    note: str = ""


@dataclass
class Verdict:
    classification: Classification
    criteria: List[CriterionResult] = field(default_factory=list)

    def group_passes(self, group: str) -> bool:
        items = [c for c in self.criteria if c.group == group]
        return bool(items) and all(c.passed for c in items)

    def report(self) -> str:
        lines = [f"classification: {self.classification}"]
        for c in self.criteria:
            mark = "pass" if c.passed else "FAIL"
            res = "" if math.isnan(c.residual) else f"  residual={c.residual:.6g}"
            note = f"  ({c.note})" if c.note else ""
            lines.append(f"  [{mark}] {c.group}/{c.name}{res}{note}")
        return "\n".join(lines)


def decide(criteria: List[CriterionResult]) -> Classification:
    """Classification implied by a criterion list."""
    v = Verdict(Classification.NOT_A_TEMPERATURE, criteria)
    if not v.group_passes("collective"):
        return Classification.NOT_A_TEMPERATURE
    if v.group_passes("dynamic"):
        return Classification.DYNAMIC_STEADY_STATE
    if v.group_passes("passive"):
        return Classification.PASSIVE_STEADY_STATE
    return Classification.NOT_A_TEMPERATURE


def _dynamic_criteria(desc: SystemDescription, tol: Tolerances) -> List[CriterionResult]:
    out = []
    rad, gen = desc.radiated, desc.generation
    out.append(CriterionResult(
        "loss-mechanism", "dynamic", rad is not None and rad > 0.0,
        note="" if rad is not None else "no radiated power given",
    ))
    out.append(CriterionResult(
        "energy-source", "dynamic", gen is not None and gen > 0.0,
        note=desc.source or ("" if gen is not None else "no internal generation given"),
    ))
    if rad is None or gen is None or (rad == 0.0 and gen == 0.0):
        out.append(CriterionResult("energy-balance", "dynamic", False, note="missing powers"))
    else:
        bal = energy_balance(gen, rad, tol.balance)
        out.append(CriterionResult(
            "energy-balance", "dynamic", bal.passed, bal.imbalance,
            note="accumulating" if bal.accumulating else "",
        ))
    if desc.spectrum is None:
        out.append(CriterionResult("spectral-consistency", "dynamic", False, note="no spectrum"))
    else:
        try:
            sc = spectral_consistency(desc.spectrum, desc.claimed_ec, tol.spectral, tol.occupation_floor)
            out.append(CriterionResult("spectral-consistency", "dynamic", sc.passed, sc.residual))
        except InsufficientEvidenceError as exc:
            out.append(CriterionResult("spectral-consistency", "dynamic", False, note=str(exc)))
    return out


def _passive_criteria(desc: SystemDescription, tol: Tolerances) -> List[CriterionResult]:
    bath = desc.bath
    out = [
        CriterionResult("bath", "passive", bath is not None and bath.ec.joules > 0.0,
                        note="" if bath is not None else "no bath"),
        CriterionResult("exchange", "passive", bath is not None and bool(bath.exchange_evidence)),
    ]
    if bath is None or desc.populations is None:
        out.append(CriterionResult("boltzmann-populations", "passive", False,
                                   note="no bath" if bath is None else "no population data"))
    else:
        pc = population_consistency(desc.populations, bath.ec, tol.population, tol.population_floor)
        out.append(CriterionResult("boltzmann-populations", "passive", pc.passed, pc.residual))
    return out


def classify(desc: SystemDescription, tolerances: Optional[Tolerances] = None) -> Verdict:
    """Evaluate every criterion and derive the classification.

    Raises
    ------
    InconclusiveError
        When the description carries no evidence channel at all.
    """
    if not desc.has_evidence():
        raise InconclusiveError("no evidence channel (spectrum, powers, bath or populations)")
    tol = tolerances or Tolerances()
    criteria = _dynamic_criteria(desc, tol) + _passive_criteria(desc, tol)
    criteria.append(CriterionResult(
        "collective", "collective", desc.n_dof >= 2, float(desc.n_dof),
        note="" if desc.n_dof >= 2 else "fewer than two degrees of freedom",
    ))
    return Verdict(decide(criteria), criteria)
