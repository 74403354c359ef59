"""Einstein rate equations for discrete levels coupled to a radiation field.

Each radiative transition ``u -> l`` contributes three processes:
spontaneous emission (A), stimulated emission (B_ul rho) and absorption
(B_lu rho), with the B coefficients fixed by

    B_ul = A c^3 / (8 pi h nu^3),      g_l B_lu = g_u B_ul

and ``rho(nu) = 8 pi h nu^3 / c^3 * occupation(nu)``.  Lines are treated as
infinitely narrow and read the field occupation at the line centre.

Only matter populations evolve; the bath field is held fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate
from scipy.sparse import csgraph, csr_matrix

from .constants import ELECTRONVOLT, HBAR, PLANCK, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY
from .errors import DomainError, IntegrationError, ValidationError
from .spectral import VACUUM, EnergyLike, SpectralField, Vacuum, as_joules

__all__ = [
    "Transition",
    "LevelSystem",
    "BathCoupling",
    "Trajectory",
    "a_coefficient_from_dipole",
    "einstein_b_coefficients",
    "boltzmann_populations",
    "fit_population_ec",
    "rate_matrix",
    "evolve",
    "steady_state",
    "net_radiated_power",
    "gross_emitted_power",
]

POPULATION_TOL = 1e-12


@dataclass(frozen=True)
class Transition:
    upper: int
    lower: int
    a_rate: float  # 1/s


@dataclass
class LevelSystem:
    """Discrete energy levels with radiative transitions and populations.

    Parameters
    ----------
    energies : array_like
        Level energies in joules, strictly increasing.
    degeneracies : array_like of int
        Statistical weights, each >= 1.
    transitions : sequence of Transition or (upper, lower, A) triples
    populations : array_like, optional
        Occupation fractions summing to 1.  Defaults to the ground level.
    """

    energies: np.ndarray
    degeneracies: np.ndarray
    transitions: List[Transition] = field(default_factory=list)
    populations: Optional[np.ndarray] = None

    def __post_init__(self):
        e = np.array(self.energies, dtype=float)
        g = np.array(self.degeneracies)
        if e.ndim != 1 or e.size < 1 or g.shape != e.shape:
            raise ValidationError("energies and degeneracies must be 1-D of equal length")
        if not np.all(np.isfinite(e)) or np.any(np.diff(e) <= 0.0):
            raise ValidationError("level energies must be finite and strictly increasing")
        if np.any(g < 1) or np.any(g != np.round(g)):
            raise ValidationError("degeneracies must be integers >= 1")
        self.energies = e
        self.degeneracies = g.astype(int)

        trans = []
        for t in self.transitions:
            t = t if isinstance(t, Transition) else Transition(int(t[0]), int(t[1]), float(t[2]))
            if not (0 <= t.lower < t.upper < e.size):
                raise ValidationError(f"transition {t} must satisfy 0 <= lower < upper < {e.size}")
            if not (math.isfinite(t.a_rate) and t.a_rate > 0.0):
                raise ValidationError(f"transition {t} needs a finite A rate > 0")
            trans.append(t)
        self.transitions = trans

        if self.populations is None:
            p = np.zeros(e.size)
            p[0] = 1.0
        else:
            p = np.array(self.populations, dtype=float)
        if p.shape != e.shape:
            raise ValidationError("populations must have one entry per level")
        if np.any(p < 0.0) or np.any(p > 1.0) or abs(p.sum() - 1.0) > POPULATION_TOL:
            raise ValidationError(
                f"populations must lie in [0, 1] and sum to 1 (sum={p.sum():.15g})"
            )
        self.populations = p

    @classmethod
    def from_ev(cls, levels: Sequence[Tuple[float, int]], transitions=(), populations=None):
        """Build from ``(energy_eV, degeneracy)`` pairs and ``(upper, lower, A)`` triples."""
        levels = list(levels)
        energies = [ELECTRONVOLT * float(lv[0]) for lv in levels]
        degens = [int(lv[1]) for lv in levels]
        return cls(energies, degens, list(transitions), populations)

    @property
    def n_levels(self) -> int:
        return self.energies.size

    def with_populations(self, populations) -> "LevelSystem":
        return LevelSystem(self.energies, self.degeneracies, list(self.transitions), populations)

    def mean_energy(self, populations=None) -> float:
        p = self.populations if populations is None else np.asarray(populations)
        return float(p @ self.energies)

    def transition_frequency(self, t: Transition) -> float:
        return (self.energies[t.upper] - self.energies[t.lower]) / PLANCK


@dataclass(frozen=True)
class BathCoupling:
    """Radiation environment seen by a level system: a sampled field or vacuum."""

    field: Union[SpectralField, Vacuum] = VACUUM

    @property
    def is_vacuum(self) -> bool:
        return self.field is VACUUM

    def occupation(self, nu: float) -> float:
        return 0.0 if self.is_vacuum else self.field.occupation_at(nu)

    def energy_density(self, nu: float) -> float:
        """Spectral energy density ``rho(nu)`` in J m^-3 Hz^-1."""
        return 8.0 * math.pi * PLANCK * nu**3 / SPEED_OF_LIGHT**3 * self.occupation(nu)

    def transition_rates(self, system: LevelSystem) -> List[Tuple[Transition, float, float]]:
        """Per transition: total downward rate ``A + B_ul rho`` and upward rate ``B_lu rho``."""
        out = []
        for t in system.transitions:
            nu = system.transition_frequency(t)
            b_ul, b_lu = einstein_b_coefficients(
                t.a_rate, nu, system.degeneracies[t.upper], system.degeneracies[t.lower]
            )
            rho = self.energy_density(nu)
            out.append((t, t.a_rate + b_ul * rho, b_lu * rho))
        return out


def a_coefficient_from_dipole(transition_energy: float, dipole_moment_squared: float) -> float:
    """Spontaneous emission rate ``omega^3 |d|^2 / (3 pi eps0 hbar c^3)`` (1/s).

    Parameters
    ----------
    transition_energy : float
        ``E_u - E_l`` in joules.
    dipole_moment_squared : float
        ``|<u|d|l>|^2`` in C^2 m^2.
    """
    if not transition_energy > 0.0:
        raise DomainError(f"transition energy must be > 0, got {transition_energy}")
    if not dipole_moment_squared >= 0.0:
        raise DomainError("dipole moment squared must be >= 0")
    omega = transition_energy / HBAR
    return omega**3 * dipole_moment_squared / (
        3.0 * math.pi * VACUUM_PERMITTIVITY * HBAR * SPEED_OF_LIGHT**3
    )


def einstein_b_coefficients(a_rate: float, nu: float, g_upper: int, g_lower: int):
    """Return ``(B_ul, B_lu)`` for energy-density-based rates (m^3 J^-1 s^-2)."""
    b_ul = a_rate * SPEED_OF_LIGHT**3 / (8.0 * math.pi * PLANCK * nu**3)
    return b_ul, b_ul * g_upper / g_lower


def boltzmann_populations(energies, degeneracies, ec: EnergyLike) -> np.ndarray:
    """Normalised ``g_i exp(-E_i / E_c)`` (energies and ``ec`` in joules)."""
    e = np.asarray(energies, dtype=float)
    w = np.log(np.asarray(degeneracies, dtype=float)) - (e - e[0]) / as_joules(ec)
    w = np.exp(w - w.max())
    return w / w.sum()


def fit_population_ec(system: LevelSystem, populations=None) -> float:
    """Least-squares slope fit of ``ln(n_i / g_i)`` against ``E_i``; returns E_c (J).

    Needs at least two levels with non-zero population.  A non-negative
    slope (population inversion or flat) yields ``inf``.
    """
    p = system.populations if populations is None else np.asarray(populations, dtype=float)
    mask = p > 0.0
    if mask.sum() < 2:
        raise DomainError("need two or more populated levels to fit E_c")
    x = system.energies[mask] - system.energies[0]
    y = np.log(p[mask] / system.degeneracies[mask])
    slope = np.polyfit(x, y, 1)[0]
    return math.inf if slope >= 0.0 else -1.0 / slope


def rate_matrix(system: LevelSystem, coupling: BathCoupling) -> np.ndarray:
    """Generator ``K`` with ``dn/dt = K n``; columns sum to zero."""
    k = np.zeros((system.n_levels, system.n_levels))
    for t, down, up in coupling.transition_rates(system):
        u, l = t.upper, t.lower
        k[l, u] += down
        k[u, u] -= down
        k[u, l] += up
        k[l, l] -= up
    return k


@dataclass
class Trajectory:
    """Sampled populations; ``populations[i]`` is the state at ``times[i]``."""

    system: LevelSystem
    times: np.ndarray
    populations: np.ndarray

    @property
    def final(self) -> LevelSystem:
        p = np.clip(self.populations[-1], 0.0, 1.0)
        return self.system.with_populations(p / p.sum())

    def mean_energy(self) -> np.ndarray:
        return self.populations @ self.system.energies

    def total_population(self) -> np.ndarray:
        return self.populations.sum(axis=1)


def evolve(
    system: LevelSystem,
    coupling: BathCoupling,
    duration: float,
    n_samples: int = 201,
    rtol: float = 1e-9,
    atol: float = 1e-14,
    max_retries: int = 8,
) -> Trajectory:
    """Integrate the rate equations over ``[0, duration]``.

    Uses an embedded Dormand-Prince 5(4) pair.  When the integrator gives up
    (step size underflow) the attempt is repeated with a halved initial and
    maximum step, up to ``max_retries`` times, before raising
    :class:`IntegrationError` with the time reached.
    """
    if not duration > 0.0:
        raise DomainError("duration must be > 0")
    k = rate_matrix(system, coupling)
    t_eval = np.linspace(0.0, duration, n_samples)
    max_step = duration
    for attempt in range(max_retries + 1):
        sol = integrate.solve_ivp(
            lambda t, n: k @ n,
            (0.0, duration),
            system.populations,
            method="RK45",
            t_eval=t_eval,
            rtol=rtol,
            atol=atol,
            max_step=max_step,
            first_step=min(max_step, duration / 100.0),
        )
        if sol.success:
            return Trajectory(system, sol.t, sol.y.T.copy())
        max_step /= 2.0
    raise IntegrationError(
        f"rate-equation integration failed after {max_retries} retries: {sol.message}",
        time=sol.t[-1] if sol.t.size else 0.0,
    )


def _connected_blocks(system: LevelSystem) -> List[List[int]]:
    n = system.n_levels
    rows = [t.upper for t in system.transitions]
    cols = [t.lower for t in system.transitions]
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    n_comp, labels = csgraph.connected_components(graph, directed=False)
    return [list(np.flatnonzero(labels == c)) for c in range(n_comp)]


def steady_state(system: LevelSystem, coupling: BathCoupling, residual_tol: float = 1e-10):
    """Stationary populations of the rate equations.

    Solves ``K n = 0`` with ``sum(n) = 1``.  The reported residual
    ``max|K n|`` is measured in units of the fastest rate in ``K`` so the
    tolerance is independent of the A-coefficient scale.

    Raises
    ------
    ValidationError
        If the transition graph splits into disconnected level blocks, in
        which case the stationary state is not unique.
    ArithmeticError
        If the linear solve leaves a residual above ``residual_tol``.
    """
    blocks = _connected_blocks(system)
    if len(blocks) > 1:
        desc = "; ".join("{" + ", ".join(str(i) for i in b) + "}" for b in blocks)
        raise ValidationError(f"level system splits into disconnected blocks: {desc}")
    k = rate_matrix(system, coupling)
    scale = np.abs(k).max()
    if scale == 0.0:
        return np.ones(1)
    a = k / scale
    a[0, :] = 1.0
    rhs = np.zeros(system.n_levels)
    rhs[0] = 1.0
    n = np.linalg.solve(a, rhs)
    n = np.where(np.abs(n) < 1e-300, 0.0, n)
    residual = np.abs(k @ n).max() / scale
    if residual > residual_tol:
        raise ArithmeticError(f"steady-state residual {residual:.3e} exceeds {residual_tol:.1e}")
    return n


def net_radiated_power(system: LevelSystem, coupling: BathCoupling, populations=None) -> float:
    """Emission minus absorption power per system (W), summed over transitions."""
    p = system.populations if populations is None else np.asarray(populations, dtype=float)
    total = 0.0
    for t, down, up in coupling.transition_rates(system):
        de = system.energies[t.upper] - system.energies[t.lower]
        total += (down * p[t.upper] - up * p[t.lower]) * de
    return total


def gross_emitted_power(system: LevelSystem, coupling: BathCoupling, populations=None) -> float:
    """Emission power alone (spontaneous + stimulated), for relative comparisons."""
    p = system.populations if populations is None else np.asarray(populations, dtype=float)
    return sum(
        down * p[t.upper] * (system.energies[t.upper] - system.energies[t.lower])
        for t, down, _ in coupling.transition_rates(system)
    )
