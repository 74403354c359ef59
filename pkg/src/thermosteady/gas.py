"""Spatially homogeneous hard-sphere DSMC with an optional gray-body radiative channel.

Collisions are selected with Bird's no-time-counter scheme: a number of
candidate pairs proportional to ``n sigma (v_r)_max dt`` is drawn and each
is accepted with probability ``v_r / (v_r)_max``.  Accepted pairs keep
their centre-of-mass velocity and relative speed and get an isotropic new
relative direction, which conserves momentum and kinetic energy per
collision.

The radiative channel relaxes the total kinetic energy as

    dE/dt = -kappa (E - 3/2 N E_env)

(``E_env = 0`` for vacuum) and applies the change as a uniform rescaling of
all velocities, so it alters the scale of the distribution and never its
shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Union

import numpy as np
from scipy import stats

from .constants import BOLTZMANN, STEFAN_BOLTZMANN
from .errors import DomainError, ValidationError
from .spectral import VACUUM, EnergyScale, Vacuum, as_joules

__all__ = [
    "Maxwell",
    "Bimodal",
    "Monoenergetic",
    "GrayBodyChannel",
    "GasState",
    "EcFit",
    "VelocityHistogram",
    "GasRecord",
    "make_rng",
    "init_gas",
    "collide_step",
    "radiative_step",
    "fit_ec",
    "ks_maxwell",
    "velocity_histogram",
    "h_functional",
    "default_h_edges",
    "run_gas",
    "relaxed_energy",
    "kappa_from_emissivity",
    "emissivity_from_kappa",
]

KS_ALPHA = 0.01
H_MIN_PARTICLES = 1000
MAX_RADIATIVE_FRACTION = 0.01


@dataclass(frozen=True)
class Maxwell:
    ec: float  # J


@dataclass(frozen=True)
class Bimodal:
    """Half the particles at speed ``v1``, the rest at ``v2``, isotropic directions."""

    v1: float
    v2: float


@dataclass(frozen=True)
class Monoenergetic:
    v: float


Distribution = Union[Maxwell, Bimodal, Monoenergetic]


@dataclass(frozen=True)
class GrayBodyChannel:
    """Gray-body exchange with an environment at ``environment`` (J) or vacuum.

    ``kappa`` (1/s) is the energy relaxation rate.  It can be related to an
    effective emissivity by linearising ``sigma eps A T^4`` around a
    reference temperature; see the README.
    """

    kappa: float
    environment: Union[float, Vacuum] = VACUUM

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and self.kappa >= 0.0):
            raise ValidationError("kappa must be finite and >= 0")
        if self.environment is not VACUUM:
            object.__setattr__(self, "environment", as_joules(self.environment, "environment"))

    @property
    def env_joules(self) -> float:
        return 0.0 if self.environment is VACUUM else self.environment


@dataclass(frozen=True)
class GasState:
    """Particle ensemble for homogeneous DSMC.

    Attributes
    ----------
    mass : float
        Particle mass (kg), uniform.
    velocities : ndarray, shape (N, 3)
    cross_section : float
        Hard-sphere total cross-section (m^2).
    number_density : float
        Physical number density (m^-3) represented by the ensemble.
    radiative : GrayBodyChannel or None
        ``None`` models perfectly neutral, non-radiating spheres.
    vr_max : float
        Running upper estimate of the relative speed used by NTC selection.
    time : float
    n_collisions : int
    """

    mass: float
    velocities: np.ndarray
    cross_section: float = 4.0e-19
    number_density: float = 2.5e25
    radiative: Optional[GrayBodyChannel] = None
    vr_max: float = 0.0
    time: float = 0.0
    n_collisions: int = 0

    def __post_init__(self):
        v = np.array(self.velocities, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValidationError("velocities must have shape (N, 3)")
        if v.shape[0] < 2:
            raise ValidationError("need at least two particles")
        if not np.all(np.isfinite(v)):
            raise ValidationError("velocities must be finite")
        if not self.mass > 0.0 or not self.cross_section > 0.0 or not self.number_density > 0.0:
            raise ValidationError("mass, cross_section and number_density must be > 0")
        v.flags.writeable = False
        object.__setattr__(self, "velocities", v)
        if self.vr_max <= 0.0:
            speeds = np.sqrt(np.einsum("ij,ij->i", v, v))
            object.__setattr__(self, "vr_max", max(2.0 * speeds.max(), 1e-300))

    @property
    def n(self) -> int:
        return self.velocities.shape[0]

    def speeds(self) -> np.ndarray:
        return np.sqrt(np.einsum("ij,ij->i", self.velocities, self.velocities))

    def kinetic_energy(self) -> float:
        return 0.5 * self.mass * float(np.einsum("ij,ij->", self.velocities, self.velocities))

    def momentum(self) -> np.ndarray:
        return self.mass * self.velocities.sum(axis=0)

    def momentum_scale(self) -> float:
        """``m * sum |v|``, the natural yardstick for momentum drift."""
        return self.mass * float(self.speeds().sum())

    def mean_free_time(self) -> float:
        """Estimate ``1 / (n sigma <v_r>)`` with ``<v_r> = sqrt(2) <v>``."""
        mean_speed = float(self.speeds().mean())
        return 1.0 / (self.number_density * self.cross_section * math.sqrt(2.0) * mean_speed)


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based Philox generator for ``(seed, stream...)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


def _isotropic(rng: np.random.Generator, n: int) -> np.ndarray:
    cos_t = rng.uniform(-1.0, 1.0, n)
    phi = rng.uniform(0.0, 2.0 * math.pi, n)
    sin_t = np.sqrt(1.0 - cos_t**2)
    return np.column_stack((sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t))


def _speeds_to_velocities(speeds: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    # pair each direction with its mirror image so net momentum vanishes
    n = speeds.size
    half = n // 2
    dirs = np.empty((n, 3))
    d = _isotropic(rng, half)
    dirs[0:2 * half:2] = d
    dirs[1:2 * half:2] = -d
    if n % 2:
        dirs[-1] = _isotropic(rng, 1)[0]
    return speeds[:, None] * dirs


def init_gas(
    n: int,
    mass: float,
    distribution: Distribution,
    seed: int,
    cross_section: float = 4.0e-19,
    number_density: float = 2.5e25,
    radiative: Optional[GrayBodyChannel] = None,
) -> GasState:
    """Draw an initial ensemble.

    ``Maxwell`` samples Gaussian velocity components of variance ``ec/m``.
    ``Bimodal`` and ``Monoenergetic`` fix speeds exactly and pair opposite
    directions so the total momentum is zero (up to one unpaired particle
    when ``n`` is odd).
    """
    if int(n) != n or n < 2:
        raise ValidationError(f"particle count must be an integer >= 2, got {n}")
    if not mass > 0.0:
        raise ValidationError("mass must be > 0")
    n = int(n)
    rng = make_rng(seed, 0)
    if isinstance(distribution, Maxwell):
        ec = as_joules(distribution.ec)
        v = rng.normal(0.0, math.sqrt(ec / mass), size=(n, 3))
    elif isinstance(distribution, Bimodal):
        if not (distribution.v1 > 0.0 and distribution.v2 > 0.0):
            raise ValidationError("bimodal speeds must be > 0")
        # interleave so that mirrored pairs share a speed
        speeds = np.where(np.arange(n) // 2 % 2 == 0, distribution.v1, distribution.v2).astype(float)
        v = _speeds_to_velocities(speeds, rng)
    elif isinstance(distribution, Monoenergetic):
        if not distribution.v > 0.0:
            raise ValidationError("speed must be > 0")
        v = _speeds_to_velocities(np.full(n, float(distribution.v)), rng)
    else:
        raise ValidationError(f"unknown distribution {distribution!r}")
    return GasState(mass, v, cross_section, number_density, radiative)


def collide_step(state: GasState, dt: float, rng: np.random.Generator) -> GasState:
    """Advance the collision process by ``dt`` seconds (NTC selection).

    Candidate pairs are drawn as disjoint pairs from random permutations,
    in as many rounds as needed.
    """
    dt = float(dt)
    if not dt > 0.0:
        raise DomainError("dt must be > 0")
    v = np.array(state.velocities)
    n = state.n
    vr_max = state.vr_max
    expected = 0.5 * (n - 1) * state.number_density * state.cross_section * vr_max * dt
    remaining = int(math.floor(expected + rng.random()))
    accepted_total = 0
    while remaining > 0:
        m = min(remaining, n // 2)
        remaining -= m
        perm = rng.permutation(n)
        i, j = perm[:m], perm[m:2 * m]
        vrel = v[i] - v[j]
        vr = np.sqrt(np.einsum("ij,ij->i", vrel, vrel))
        acc = rng.random(m) * vr_max < vr
        vr_max = max(vr_max, float(vr.max()))
        if not acc.any():
            continue
        i, j, vr = i[acc], j[acc], vr[acc]
        vcm = 0.5 * (v[i] + v[j])
        half_rel = 0.5 * vr[:, None] * _isotropic(rng, vr.size)
        v[i] = vcm + half_rel
        v[j] = vcm - half_rel
        accepted_total += int(acc.sum())
    return replace(
        state,
        velocities=v,
        vr_max=vr_max,
        time=state.time + dt,
        n_collisions=state.n_collisions + accepted_total,
    )


def kappa_from_emissivity(emissivity: float, area: float, n_particles: int, t_ref: float) -> float:
    """Relaxation rate matching a gray body of the given emissivity near ``t_ref``.

    Linearising ``eps sigma A (T^4 - T_env^4)`` about ``t_ref`` and dividing
    by the heat capacity ``1.5 N k_B`` of the gas gives
    ``kappa = 4 eps sigma A t_ref^3 / (1.5 N k_B)``.
    """
    if not (0.0 < emissivity <= 1.0) or not area > 0.0 or not n_particles > 0 or not t_ref > 0.0:
        raise DomainError("need emissivity in (0, 1], area > 0, n_particles > 0, t_ref > 0")
    return 4.0 * emissivity * STEFAN_BOLTZMANN * area * t_ref**3 / (1.5 * n_particles * BOLTZMANN)


def emissivity_from_kappa(kappa: float, area: float, n_particles: int, t_ref: float) -> float:
    """Inverse of :func:`kappa_from_emissivity`; values above 1 mean no real gray body
    of that area could radiate so fast."""
    if not kappa >= 0.0 or not area > 0.0 or not n_particles > 0 or not t_ref > 0.0:
        raise DomainError("need kappa >= 0, area > 0, n_particles > 0, t_ref > 0")
    return kappa * 1.5 * n_particles * BOLTZMANN / (4.0 * STEFAN_BOLTZMANN * area * t_ref**3)


def relaxed_energy(e0: float, n: int, channel: GrayBodyChannel, t: float) -> float:
    """Closed-form kinetic energy after time ``t`` under the gray-body law."""
    target = 1.5 * n * channel.env_joules
    return target + (e0 - target) * math.exp(-channel.kappa * t)


def radiative_step(state: GasState, dt: float) -> GasState:
    """Apply the gray-body energy exchange over ``dt`` by uniform speed rescaling.

    The energy update is the exact solution of the loss law over the step.
    Steps changing the energy by more than 1% are rejected.
    """
    if state.radiative is None:
        raise ValidationError("gas has no radiative channel")
    dt = float(dt)
    if not dt > 0.0:
        raise DomainError("dt must be > 0")
    e = state.kinetic_energy()
    if e <= 0.0:
        raise DomainError("gas has no kinetic energy")
    e_new = relaxed_energy(e, state.n, state.radiative, dt)
    if abs(e_new - e) > MAX_RADIATIVE_FRACTION * e:
        raise DomainError(
            f"radiative step changes energy by {abs(e_new - e) / e:.2%}; reduce dt below 1% change"
        )
    return replace(state, velocities=state.velocities * math.sqrt(e_new / e), time=state.time + dt)


@dataclass(frozen=True)
class EcFit:
    ec: EnergyScale
    lower: float  # J, confidence bound
    upper: float  # J
    sigma: float  # J, large-N standard error
    ks_statistic: float
    ks_pvalue: float
    good_fit: bool


def ks_maxwell(speeds: np.ndarray, mass: float, ec: float):
    """One-sample KS test of ``speeds`` against the Maxwell speed law at ``ec`` (J)."""
    res = stats.kstest(speeds, stats.maxwell(scale=math.sqrt(ec / mass)).cdf)
    return float(res.statistic), float(res.pvalue)


def fit_ec(state: GasState, confidence: float = 0.95, alpha: float = KS_ALPHA) -> EcFit:
    """Maximum-likelihood E_c of a Maxwell speed distribution, ``2/3`` of the mean KE.

    The interval follows from ``2 E / E_c ~ chi2(3N)`` for Maxwellian data.
    ``good_fit`` reports whether the KS test passes at ``alpha``.
    """
    e = state.kinetic_energy()
    if e <= 0.0:
        raise DomainError("cannot fit E_c to a gas with zero kinetic energy")
    dof = 3 * state.n
    ec = 2.0 * e / dof
    tail = 0.5 * (1.0 - confidence)
    lower = 2.0 * e / stats.chi2.ppf(1.0 - tail, dof)
    upper = 2.0 * e / stats.chi2.ppf(tail, dof)
    d, p = ks_maxwell(state.speeds(), state.mass, ec)
    return EcFit(EnergyScale(ec), lower, upper, ec * math.sqrt(2.0 / dof), d, p, p >= alpha)


@dataclass(frozen=True)
class VelocityHistogram:
    edges: np.ndarray
    counts: np.ndarray
    ec: EnergyScale
    ks_statistic: float


def default_h_edges(state: GasState, bins: int = 40) -> np.ndarray:
    """Speed bins on ``[0, 6 sqrt(E_c/m)]`` using the fitted E_c.

    States of equal energy get identical edges, which keeps H values
    comparable between them.
    """
    ec = 2.0 * state.kinetic_energy() / (3 * state.n)
    return np.linspace(0.0, 6.0 * math.sqrt(ec / state.mass), bins + 1)


def velocity_histogram(state: GasState, bins: int = 40) -> VelocityHistogram:
    fit = fit_ec(state)
    edges = default_h_edges(state, bins)
    speeds = np.minimum(state.speeds(), np.nextafter(edges[-1], 0.0))
    counts, _ = np.histogram(speeds, edges)
    return VelocityHistogram(edges, counts, fit.ec, fit.ks_statistic)


def h_functional(state: GasState, bins=40) -> float:
    """Binned Boltzmann H, ``sum_i p_i ln(p_i / dV_i)``.

    ``p_i`` is the fraction of particles in speed shell ``i`` and ``dV_i``
    the shell's velocity-space volume, so this discretises the integral of
    ``F ln F`` over 3-D velocity space for an isotropic density ``F``.
    Speeds past the last edge are counted in the last bin.

    Parameters
    ----------
    bins : int or array_like
        Number of bins for :func:`default_h_edges`, or explicit edges.
    """
    if state.n < H_MIN_PARTICLES:
        raise DomainError(f"H estimate needs at least {H_MIN_PARTICLES} particles, got {state.n}")
    edges = default_h_edges(state, bins) if np.isscalar(bins) else np.asarray(bins, dtype=float)
    speeds = np.minimum(state.speeds(), np.nextafter(edges[-1], 0.0))
    counts, _ = np.histogram(speeds, edges)
    p = counts / state.n
    dv = 4.0 / 3.0 * math.pi * np.diff(edges**3)
    nz = p > 0.0
    return float(np.sum(p[nz] * np.log(p[nz] / dv[nz])))


@dataclass(frozen=True)
class GasRecord:
    time: float
    fitted_ec: float
    ks_statistic: float
    ks_pvalue: float
    h_value: float
    total_energy: float
    n_collisions: int


def _record(state: GasState, h_bins) -> GasRecord:
    fit = fit_ec(state)
    h = h_functional(state, h_bins) if state.n >= H_MIN_PARTICLES else math.nan
    return GasRecord(
        state.time, fit.ec.joules, fit.ks_statistic, fit.ks_pvalue, h,
        state.kinetic_energy(), state.n_collisions,
    )


def run_gas(
    state: GasState,
    dt: float,
    n_steps: int,
    rng: np.random.Generator,
    record_every: int = 10,
    collisions: bool = True,
    radiation: bool = True,
    h_bins=40,
) -> "tuple[GasState, List[GasRecord]]":
    """Alternate collision and radiative steps; record diagnostics periodically.

    The radiative step runs only when ``radiation`` is set and the state has
    a channel.  A record is taken at the start and every ``record_every``
    steps (and always at the end).
    """
    records = [_record(state, h_bins)]
    radiate = radiation and state.radiative is not None
    for k in range(1, n_steps + 1):
        if collisions:
            state = collide_step(state, dt, rng)
        if radiate:
            before = state.time
            state = radiative_step(state, dt)
            if collisions:
                # collide_step already advanced the clock
                state = replace(state, time=before)
        elif not collisions:
            state = replace(state, time=state.time + dt)
        if k % record_every == 0 or k == n_steps:
            records.append(_record(state, h_bins))
    return state, records
