"""Planck-spectrum quantities: Bose-Einstein integrals, mean photon energy,
Wien peak and blackbody flux.

All energies are in joules internally.  Functions taking a thermal scale
accept either an :class:`EnergyScale` or a bare float; a bare float is
interpreted in whatever energy unit the caller uses, and results come back
in that same unit (only ratios such as ``h nu / E_c`` are unit-sensitive).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from scipy import integrate, optimize, special

from .constants import (
    BOLTZMANN,
    ELECTRONVOLT,
    MEAN_PHOTON_ENERGY_RATIO,
    PLANCK,
    SPEED_OF_LIGHT,
    STEFAN_BOLTZMANN,
    ZETA3,
)
from .errors import DomainError, ValidationError

__all__ = [
    "EnergyScale",
    "SpectralField",
    "Vacuum",
    "VACUUM",
    "as_joules",
    "bose_einstein_integral",
    "bose_einstein_integral_quad",
    "mean_photon_energy",
    "mean_photon_energy_quad",
    "planck_occupation",
    "planck_number_density",
    "wien_peak",
    "wien_peak_ratio",
    "stefan_boltzmann_flux",
    "ideal_planck_field",
    "planck_grid",
]

# upper integration limit for the semi-infinite Bose-Einstein integrals
QUAD_CUTOFF = 60.0
TAIL_RTOL = 1e-14


@dataclass(frozen=True)
class EnergyScale:
    """Characteristic thermal energy ``E_c = k_B T``, stored in joules."""

    joules: float

    def __post_init__(self):
        value = float(self.joules)
        if not math.isfinite(value) or value < 0.0:
            raise DomainError(f"energy scale must be finite and >= 0, got {self.joules!r}")
        object.__setattr__(self, "joules", value)

    @classmethod
    def from_kelvin(cls, temperature: float) -> "EnergyScale":
        return cls(BOLTZMANN * float(temperature))

    @classmethod
    def from_ev(cls, energy_ev: float) -> "EnergyScale":
        return cls(ELECTRONVOLT * float(energy_ev))

    @property
    def kelvin(self) -> float:
        return self.joules / BOLTZMANN

    @property
    def ev(self) -> float:
        return self.joules / ELECTRONVOLT

    def __float__(self) -> float:
        return self.joules

    def __mul__(self, factor: float) -> "EnergyScale":
        return EnergyScale(self.joules * float(factor))

    __rmul__ = __mul__


class Vacuum(enum.Enum):
    """Marker for an empty radiation environment (zero occupation everywhere)."""

    VACUUM = "vacuum"

    def __repr__(self):
        return "VACUUM"


VACUUM = Vacuum.VACUUM

EnergyLike = Union[EnergyScale, float]


def as_joules(ec: EnergyLike, name: str = "ec", allow_zero: bool = False) -> float:
    """Return the numeric value of a thermal scale, checking its sign."""
    value = ec.joules if isinstance(ec, EnergyScale) else float(ec)
    if not math.isfinite(value) or value < 0.0 or (value == 0.0 and not allow_zero):
        raise DomainError(f"{name} must be a positive thermal energy scale, got {value!r}")
    return value


# --------------------------------------------------------------------------
# Bose-Einstein integrals


def _check_order(s: float) -> float:
    s = float(s)
    if not s > 1.0:
        raise DomainError(f"Bose-Einstein integral of order s={s} diverges (need s > 1)")
    return s


def bose_einstein_integral(s: float, method: str = "auto") -> float:
    """Integral of ``x**(s-1) / (exp(x) - 1)`` over ``[0, inf)``.

    Equals ``Gamma(s) * zeta(s)``.

    Parameters
    ----------
    s : float
        Order, must exceed 1.
    method : {'auto', 'closed', 'quad'}
        ``'auto'`` uses the closed form for integer orders and quadrature
        otherwise.  ``'closed'`` always uses ``Gamma(s) zeta(s)``.

    Returns
    -------
    float
    """
    s = _check_order(s)
    if method == "quad" or (method == "auto" and not s.is_integer()):
        return bose_einstein_integral_quad(s)
    if method not in ("auto", "closed"):
        raise ValueError(f"unknown method {method!r}")
    if s == 3.0:
        return 2.0 * ZETA3
    if s == 4.0:
        return math.pi**4 / 15.0
    if s.is_integer():
        return math.factorial(int(s) - 1) * float(special.zeta(s, 1))
    return float(special.gamma(s) * special.zeta(s, 1))


def _be_integrand(x: float, s: float) -> float:
    if x == 0.0:
        # limit of x**(s-1)/x as x -> 0
        return 1.0 if s == 2.0 else (0.0 if s > 2.0 else math.inf)
    return x ** (s - 1.0) / math.expm1(x)


def _tail_bound(s: float, cutoff: float) -> float:
    # x^(s-1)/(e^x - 1) <= x^(s-1) e^-x / (1 - e^-X) for x >= X
    upper_gamma = special.gammaincc(s, cutoff) * special.gamma(s)
    return float(upper_gamma / -math.expm1(-cutoff))


def bose_einstein_integral_quad(s: float, cutoff: float = QUAD_CUTOFF) -> float:
    """Adaptive-quadrature evaluation of :func:`bose_einstein_integral`.

    The range is truncated at ``cutoff``; the cutoff is pushed outward until
    the analytic exponential tail bound drops below ``1e-14`` of the
    integral.
    """
    s = _check_order(s)
    # for s < 2 the integrand has an integrable x**(s-2) singularity at 0,
    # which QAGS handles by extrapolation
    while True:
        breaks = [b for b in (1.0, 5.0, 15.0, 30.0) if b < cutoff]
        knots = [0.0, *breaks, cutoff]
        total = 0.0
        for a, b in zip(knots[:-1], knots[1:]):
            val, _ = integrate.quad(
                _be_integrand, a, b, args=(s,), epsabs=0.0, epsrel=1e-13, limit=200
            )
            total += val
        if _tail_bound(s, cutoff) < TAIL_RTOL * total:
            return total
        cutoff += 20.0


# --------------------------------------------------------------------------
# Planck distribution


def mean_photon_energy(ec: EnergyLike) -> float:
    """Mean photon energy of a Planck field: ``pi^4 / (30 zeta(3)) * E_c``."""
    return MEAN_PHOTON_ENERGY_RATIO * as_joules(ec)


def mean_photon_energy_quad(ec: EnergyLike) -> float:
    """Same quantity as :func:`mean_photon_energy`, from the ratio of the
    energy and number moments evaluated by quadrature."""
    return as_joules(ec) * bose_einstein_integral_quad(4.0) / bose_einstein_integral_quad(3.0)


def planck_occupation(nu, ec: EnergyLike):
    """Mean photon number per mode, ``1 / (exp(h nu / E_c) - 1)``.

    ``ec`` is in joules here since it is compared against ``h nu``.
    """
    e = as_joules(ec)
    x = PLANCK * np.asarray(nu, dtype=float) / e
    with np.errstate(over="ignore"):
        return 1.0 / np.expm1(x)


def planck_number_density(nu, ec: EnergyLike):
    """Photon number density per unit frequency, ``8 pi nu^2 / c^3 * occupation``.

    Units are m^-3 Hz^-1.  Large ``h nu / E_c`` underflows to zero.
    """
    nu_arr = np.asarray(nu, dtype=float)
    if np.any(~np.isfinite(nu_arr)) or np.any(nu_arr <= 0.0):
        raise DomainError("frequencies must be finite and > 0")
    out = 8.0 * math.pi * nu_arr**2 / SPEED_OF_LIGHT**3 * planck_occupation(nu_arr, ec)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=None)
def wien_peak_ratio() -> float:
    """Root of ``x = 3 (1 - exp(-x))``: location of the maximum of ``x^3/(e^x - 1)``."""
    g = lambda x: x - 3.0 * (-math.expm1(-x))
    x = optimize.brentq(g, 1.0, 5.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    if abs(g(x)) >= 1e-12:
        raise ArithmeticError(f"Wien root residual {g(x):.3e} too large")
    return x


def wien_peak(ec: EnergyLike) -> float:
    """Photon energy at the peak of the spectral energy density, ~2.8214 E_c."""
    return wien_peak_ratio() * as_joules(ec)


def stefan_boltzmann_flux(temperature: float, emissivity: float = 1.0) -> float:
    """Gray-body radiated power per unit area, ``emissivity * sigma * T^4`` (W/m^2)."""
    temperature = float(temperature)
    emissivity = float(emissivity)
    if not temperature >= 0.0:
        raise DomainError(f"temperature must be >= 0 K, got {temperature}")
    if not 0.0 <= emissivity <= 1.0:
        raise DomainError(f"emissivity must lie in [0, 1], got {emissivity}")
    return emissivity * STEFAN_BOLTZMANN * temperature**4


# --------------------------------------------------------------------------
# sampled fields


@dataclass(frozen=True)
class SpectralField:
    """Photon occupation numbers sampled on a frequency grid.

    Parameters
    ----------
    frequencies : array_like
        Strictly increasing, positive frequencies (Hz).
    occupation : array_like
        Mean photon number per mode at each frequency, non-negative.
    planck_ec : float, optional
        Set when the field is an ideal Planck field at this scale (J).
    """

    frequencies: np.ndarray
    occupation: np.ndarray
    planck_ec: Optional[float] = field(default=None)

    def __post_init__(self):
        nu = np.array(self.frequencies, dtype=float)
        occ = np.array(self.occupation, dtype=float)
        if nu.ndim != 1 or nu.size < 2:
            raise ValidationError("frequency grid must be 1-D with at least two points")
        if occ.shape != nu.shape:
            raise ValidationError(
                f"occupation shape {occ.shape} does not match grid shape {nu.shape}"
            )
        if not np.all(np.isfinite(nu)) or np.any(nu <= 0.0):
            raise ValidationError("frequencies must be finite and > 0")
        if np.any(np.diff(nu) <= 0.0):
            raise ValidationError("frequency grid must be strictly increasing")
        if not np.all(np.isfinite(occ)) or np.any(occ < 0.0):
            raise ValidationError("occupations must be finite and non-negative")
        nu.flags.writeable = False
        occ.flags.writeable = False
        object.__setattr__(self, "frequencies", nu)
        object.__setattr__(self, "occupation", occ)

    def occupation_at(self, nu: float) -> float:
        """Occupation at ``nu``, which must lie within the grid span.

        Tagged Planck fields are evaluated exactly; other fields are
        interpolated linearly between grid points.
        """
        if not self.frequencies[0] <= nu <= self.frequencies[-1]:
            raise DomainError(
                f"frequency {nu:.6e} Hz outside field grid "
                f"[{self.frequencies[0]:.6e}, {self.frequencies[-1]:.6e}]"
            )
        if self.planck_ec is not None:
            return float(planck_occupation(nu, self.planck_ec))
        return float(np.interp(nu, self.frequencies, self.occupation))

    def number_density(self) -> np.ndarray:
        return 8.0 * math.pi * self.frequencies**2 / SPEED_OF_LIGHT**3 * self.occupation

    def mean_photon_energy(self) -> float:
        """Trapezoid estimate of the mean photon energy carried by the field (J)."""
        n = self.number_density()
        total = np.trapezoid(n, self.frequencies)
        if total <= 0.0:
            raise DomainError("field holds no photons")
        return float(PLANCK * np.trapezoid(self.frequencies * n, self.frequencies) / total)

    def scaled(self, factor: float) -> "SpectralField":
        """Copy with all occupations multiplied by ``factor`` (drops the Planck tag)."""
        return SpectralField(self.frequencies, self.occupation * factor)


def ideal_planck_field(ec: EnergyLike, grid) -> SpectralField:
    """Sample the Planck occupation at scale ``ec`` (joules) onto ``grid``."""
    e = as_joules(ec)
    nu = np.asarray(grid, dtype=float)
    if nu.ndim != 1 or nu.size < 2 or np.any(nu <= 0.0) or not np.all(np.isfinite(nu)):
        raise ValidationError("frequency grid must be 1-D, finite and positive")
    return SpectralField(nu, planck_occupation(nu, e), planck_ec=e)


def planck_grid(ec: EnergyLike, x_min: float = 1e-3, x_max: float = 40.0, n: int = 4001) -> np.ndarray:
    """Frequency grid spanning ``h nu / E_c`` in ``[x_min, x_max]``, log-spaced."""
    e = as_joules(ec)
    return np.geomspace(x_min, x_max, n) * e / PLANCK
