"""Chains of finite heat reservoirs and the infinite-reservoir validity test.

A chain is ordered from the innermost reservoir outwards.  Adjacent
reservoirs exchange heat through a conductive (``k dT``) or radiative
(``sigma eps A dT^4``) link; the outermost one may also be linked to a
fixed-temperature environment or to vacuum.  Any reservoir may carry a
radiating surface that exchanges with that same boundary.

Each node obeys

    C_i dT_i/dt = P_gen,i - P_ext,i + (inflow from links) - (boundary loss)

where ``P_ext`` is active heat extraction (a refrigerator pump).
Cumulative link and boundary energies are integrated alongside the
temperatures so the energy books can be checked at the end of a run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy import integrate

from .constants import BOLTZMANN, STEFAN_BOLTZMANN
from .errors import DomainError, IntegrationError, ValidationError
from .spectral import VACUUM, EnergyScale, Vacuum

__all__ = [
    "Surface",
    "Reservoir",
    "ConductiveLink",
    "RadiativeLink",
    "Boundary",
    "ReservoirChain",
    "ChainRun",
    "ValidityResult",
    "ReportRow",
    "reservoir_validity",
    "simulate_chain",
    "effective_reservoir_report",
    "DEFAULT_MARGIN_THRESHOLD",
]

DEFAULT_MARGIN_THRESHOLD = 10.0
POSITIVITY_FLOOR = 1e-3  # K


@dataclass(frozen=True)
class Surface:
    area: float  # m^2
    emissivity: float

    def __post_init__(self):
        if not self.area >= 0.0 or not 0.0 <= self.emissivity <= 1.0:
            raise ValidationError("surface needs area >= 0 and emissivity in [0, 1]")


@dataclass(frozen=True)
class Reservoir:
    name: str
    capacity: float  # J/K
    temperature: float  # K, initial
    generation: float = 0.0  # W
    extraction: float = 0.0  # W
    surface: Optional[Surface] = None

    def __post_init__(self):
        if not (math.isfinite(self.capacity) and self.capacity > 0.0):
            raise ValidationError(f"{self.name}: heat capacity must be > 0")
        if not (math.isfinite(self.temperature) and self.temperature > 0.0):
            raise ValidationError(f"{self.name}: temperature must be > 0")
        if not self.generation >= 0.0 or not self.extraction >= 0.0:
            raise ValidationError(f"{self.name}: generation and extraction must be >= 0")

    @property
    def ec(self) -> EnergyScale:
        return EnergyScale.from_kelvin(self.temperature)


@dataclass(frozen=True)
class ConductiveLink:
    conductance: float  # W/K

    def __post_init__(self):
        if not self.conductance > 0.0:
            raise ValidationError("conductance must be > 0")

    def flow(self, t_from, t_to):
        return self.conductance * (t_from - t_to)


@dataclass(frozen=True)
class RadiativeLink:
    area: float  # m^2
    emissivity: float

    def __post_init__(self):
        if not self.area > 0.0 or not 0.0 < self.emissivity <= 1.0:
            raise ValidationError("radiative link needs area > 0 and emissivity in (0, 1]")

    def flow(self, t_from, t_to):
        return STEFAN_BOLTZMANN * self.emissivity * self.area * (t_from**4 - t_to**4)


Link = Union[ConductiveLink, RadiativeLink]


@dataclass(frozen=True)
class Boundary:
    """Outer environment: fixed temperature (K) or vacuum, optionally linked."""

    temperature: Union[float, Vacuum] = VACUUM
    link: Optional[Link] = None

    def __post_init__(self):
        if self.temperature is not VACUUM and not self.temperature >= 0.0:
            raise ValidationError("boundary temperature must be >= 0")

    @property
    def kelvin(self) -> float:
        return 0.0 if self.temperature is VACUUM else float(self.temperature)


@dataclass(frozen=True)
class ReservoirChain:
    reservoirs: Sequence[Reservoir]
    links: Sequence[Link] = ()
    boundary: Boundary = field(default_factory=Boundary)

    def __post_init__(self):
        object.__setattr__(self, "reservoirs", tuple(self.reservoirs))
        object.__setattr__(self, "links", tuple(self.links))
        if not self.reservoirs:
            raise ValidationError("chain needs at least one reservoir")
        if len(self.links) != len(self.reservoirs) - 1:
            raise ValidationError(
                f"{len(self.reservoirs)} reservoirs need {len(self.reservoirs) - 1} links, "
                f"got {len(self.links)}"
            )

    @property
    def n(self) -> int:
        return len(self.reservoirs)

    @property
    def names(self) -> List[str]:
        return [r.name for r in self.reservoirs]

    def link_flows(self, temps: np.ndarray) -> np.ndarray:
        """Heat flow through each link, positive from inner to outer (W)."""
        return np.array([lk.flow(temps[i], temps[i + 1]) for i, lk in enumerate(self.links)])

    def boundary_flows(self, temps: np.ndarray) -> np.ndarray:
        """Heat each node loses to the boundary (W)."""
        tb = self.boundary.kelvin
        out = np.zeros(self.n)
        for i, r in enumerate(self.reservoirs):
            if r.surface is not None:
                out[i] += STEFAN_BOLTZMANN * r.surface.emissivity * r.surface.area * (temps[i]**4 - tb**4)
        if self.boundary.link is not None:
            out[-1] += self.boundary.link.flow(temps[-1], tb)
        return out

    def net_sources(self) -> np.ndarray:
        return np.array([r.generation - r.extraction for r in self.reservoirs])


@dataclass
class ChainRun:
    """Sampled output of :func:`simulate_chain`.

    ``link_flows[k, i]`` is the flow through link ``i`` at ``times[k]``
    (inner to outer positive); ``boundary_flows[k, i]`` is node ``i``'s loss
    to the boundary.  ``link_energy`` and ``boundary_energy`` are the
    integrated counterparts.
    """

    chain: ReservoirChain
    times: np.ndarray
    temperatures: np.ndarray
    link_flows: np.ndarray
    boundary_flows: np.ndarray
    link_energy: np.ndarray
    boundary_energy: np.ndarray

    def stored_energy_change(self) -> np.ndarray:
        caps = np.array([r.capacity for r in self.chain.reservoirs])
        return caps * (self.temperatures - self.temperatures[0])

    def node_energy_residuals(self) -> np.ndarray:
        """Per node and sample: stored change minus net input, relative to throughput."""
        stored = self.stored_energy_change()
        src = np.outer(self.times, self.chain.net_sources())
        link_in = np.zeros_like(stored)
        link_in[:, 1:] += self.link_energy
        link_in[:, :-1] -= self.link_energy
        net_in = src + link_in - self.boundary_energy
        scale = np.abs(stored) + np.abs(src) + np.abs(link_in) + np.abs(self.boundary_energy)
        scale = np.maximum(scale.max(axis=0), np.finfo(float).tiny)
        return (stored - net_in) / scale

    def energy_residual(self) -> float:
        """Global closure ``sum C dT + boundary outflow - generation t``, relative.

        Normalised by the total energy throughput of the run; zero when
        nothing flows at all.
        """
        stored = self.stored_energy_change()[-1]
        src = self.chain.net_sources() * self.times[-1]
        bnd = self.boundary_energy[-1]
        scale = np.abs(stored).sum() + np.abs(src).sum() + np.abs(bnd).sum()
        if scale == 0.0:
            return 0.0
        return float(abs(stored.sum() + bnd.sum() - src.sum()) / scale)

    def second_law_ok(self) -> bool:
        """Every sampled link flow runs from the hotter to the colder side."""
        dt = self.temperatures[:, :-1] - self.temperatures[:, 1:]
        f = self.link_flows
        return bool(np.all((f == 0.0) | (np.sign(f) == np.sign(dt))))

    def total_energy(self) -> np.ndarray:
        """Stored energy relative to the start, summed over nodes."""
        return self.stored_energy_change().sum(axis=1)


def simulate_chain(
    chain: ReservoirChain,
    duration: float,
    n_samples: int = 201,
    rtol: float = 1e-9,
    method: str = "Radau",
    floor: float = POSITIVITY_FLOOR,
) -> ChainRun:
    """Integrate the reservoir chain for ``duration`` seconds.

    Raises
    ------
    IntegrationError
        When a temperature reaches ``floor`` or the solver fails; the error
        carries the node name and time.
    """
    if not duration > 0.0:
        raise DomainError("duration must be > 0")
    n = chain.n
    nl = n - 1
    caps = np.array([r.capacity for r in chain.reservoirs])
    src = chain.net_sources()
    t0 = np.array([r.temperature for r in chain.reservoirs])

    def rhs(_t, y):
        temps = y[:n]
        lf = chain.link_flows(temps)
        bf = chain.boundary_flows(temps)
        net = src - bf
        net[:-1] -= lf
        net[1:] += lf
        return np.concatenate((net / caps, lf, bf))

    def below_floor(_t, y):
        return np.min(y[:n]) - floor

    below_floor.terminal = True
    below_floor.direction = -1

    y0 = np.concatenate((t0, np.zeros(nl), np.zeros(n)))
    rate0 = np.abs(rhs(0.0, y0))
    flux_scale = max(float(np.abs(src).sum() + rate0[n:].sum()), 1e-300) * duration
    atol = np.concatenate((rtol * np.maximum(t0, 1.0), np.full(2 * n - 1, rtol * flux_scale)))
    t_eval = np.linspace(0.0, duration, n_samples)
    sol = integrate.solve_ivp(
        rhs, (0.0, duration), y0, method=method, t_eval=t_eval, rtol=rtol, atol=atol,
        events=below_floor,
    )
    if sol.status == 1:
        t_hit = float(sol.t_events[0][0])
        y_hit = sol.y_events[0][0]
        node = chain.reservoirs[int(np.argmin(y_hit[:n]))].name
        raise IntegrationError(
            f"temperature of {node!r} reached the positivity floor {floor} K at t={t_hit:.6g} s",
            time=t_hit, node=node,
        )
    if not sol.success:
        t_fail = float(sol.t[-1]) if sol.t.size else 0.0
        node = chain.reservoirs[int(np.argmin(sol.y[:n, -1]))].name if sol.t.size else None
        raise IntegrationError(f"chain integration failed: {sol.message}", time=t_fail, node=node)

    y = sol.y.T
    temps = y[:, :n]
    return ChainRun(
        chain=chain,
        times=sol.t,
        temperatures=temps,
        link_flows=np.array([chain.link_flows(tk) for tk in temps]).reshape(len(sol.t), nl),
        boundary_flows=np.array([chain.boundary_flows(tk) for tk in temps]),
        link_energy=y[:, n:n + nl],
        boundary_energy=y[:, n + nl:],
    )


@dataclass(frozen=True)
class ValidityResult:
    holds: bool
    margin: float
    bound_seconds: float

    def predicted_drift(self, tau_exp: float, tol_kelvin: float) -> float:
        """Linear drift over ``tau_exp`` implied by the bound: ``tol * tau / bound``."""
        return tol_kelvin * tau_exp / self.bound_seconds


def reservoir_validity(
    c: float,
    q_dot: float,
    tau_exp: float,
    tol_kelvin: float,
    threshold: float = DEFAULT_MARGIN_THRESHOLD,
) -> ValidityResult:
    """Check whether a bath of capacity ``c`` acts as an infinite reservoir.

    The bath drifts at ``q_dot / c``, so it takes ``c * tol / q_dot`` to move
    by the tolerated amount.  The approximation holds when the experiment
    time is at least ``threshold`` times shorter than that.
    """
    for name, val in (("c", c), ("q_dot", q_dot), ("tau_exp", tau_exp), ("tol_kelvin", tol_kelvin)):
        if not (val > 0.0):
            raise DomainError(f"{name} must be > 0, got {val}")
    bound = c * tol_kelvin / q_dot
    margin = bound / tau_exp
    return ValidityResult(margin >= threshold, margin, bound)


@dataclass(frozen=True)
class ReportRow:
    name: str
    capacity: float
    q_dot_peak: float
    bound_seconds: float
    margin: float
    holds: bool


def effective_reservoir_report(
    chain: ReservoirChain,
    inner_index: int,
    tau_exp: float,
    tol_kelvin: float,
    run: Optional[ChainRun] = None,
    threshold: float = DEFAULT_MARGIN_THRESHOLD,
) -> List[ReportRow]:
    """Validity of each reservoir outside ``inner_index`` as a bath for the one below.

    ``q_dot`` for level ``j`` is the peak simulated flow magnitude through
    the link joining it to level ``j - 1``.  Without a supplied ``run`` the
    chain is simulated over ``tau_exp``.  Zero exchange gives an infinite
    margin.
    """
    if not 0 <= inner_index < chain.n:
        raise DomainError(f"inner_index {inner_index} outside chain of {chain.n}")
    if chain.n - 1 <= inner_index:
        return []
    if run is None:
        run = simulate_chain(chain, tau_exp)
    rows = []
    for j in range(inner_index + 1, chain.n):
        r = chain.reservoirs[j]
        q = float(np.abs(run.link_flows[:, j - 1]).max())
        if q == 0.0:
            rows.append(ReportRow(r.name, r.capacity, 0.0, math.inf, math.inf, True))
            continue
        v = reservoir_validity(r.capacity, q, tau_exp, tol_kelvin, threshold)
        rows.append(ReportRow(r.name, r.capacity, q, v.bound_seconds, v.margin, v.holds))
    return rows
