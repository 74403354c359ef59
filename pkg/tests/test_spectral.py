import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermosteady import spectral
from thermosteady.constants import BOLTZMANN, PLANCK, SPEED_OF_LIGHT, STEFAN_BOLTZMANN
from thermosteady.errors import DomainError, ValidationError
from thermosteady.spectral import EnergyScale, SpectralField

# Frozen from mpmath.quad(x**(s-1)/expm1(x), [0, inf]) at 30 digits.
MPMATH_BE = {
    2: 1.6449340668482264,
    3: 2.4041138063191885,
    4: 6.4939394022668291,
    5: 24.886266123440878,
}


def mp_be(s):
    mpmath.mp.dps = 30
    return float(mpmath.quad(lambda x: x ** (s - 1) / mpmath.expm1(x), [0, 1, 10, mpmath.inf]))


def bisect_wien(lo=1.0, hi=5.0):
    f = lambda x: x - 3.0 * (1.0 - math.exp(-x))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def test_frozen_oracle_values_are_reproducible():
    for s, v in MPMATH_BE.items():
        assert mp_be(s) == pytest.approx(v, rel=1e-14)


def test_closed_forms():
    assert spectral.bose_einstein_integral(4) == pytest.approx(math.pi ** 4 / 15, rel=1e-15)
    assert spectral.bose_einstein_integral(3) == pytest.approx(2 * 1.2020569031595942, rel=1e-15)
    assert spectral.bose_einstein_integral(4) == pytest.approx(6.493939, abs=1e-6)
    assert spectral.bose_einstein_integral(3) == pytest.approx(2.404114, abs=1e-6)


@pytest.mark.parametrize("s", [2, 3, 4, 5])
def test_quadrature_matches_closed_form(s):
    closed = spectral.bose_einstein_integral(s, method="closed")
    quad = spectral.bose_einstein_integral_quad(s)
    assert abs(quad / closed - 1) < 1e-10
    assert abs(quad / MPMATH_BE[s] - 1) < 1e-10


@pytest.mark.parametrize("s", [1.5, 2.5, 3.7, 6.25])
def test_non_integer_orders_against_mpmath(s):
    assert spectral.bose_einstein_integral(s) == pytest.approx(mp_be(s), rel=1e-10)
    assert spectral.bose_einstein_integral_quad(s) == pytest.approx(mp_be(s), rel=1e-10)


@pytest.mark.parametrize("s", [1.0, 0.5, -2.0])
def test_divergent_orders_rejected(s):
    with pytest.raises(DomainError):
        spectral.bose_einstein_integral(s)


def test_mean_photon_energy():
    assert spectral.mean_photon_energy(1.0) == pytest.approx(2.70118, abs=1e-5)
    assert spectral.mean_photon_energy(2.0) == pytest.approx(5.40236, abs=1e-5)
    ratio = MPMATH_BE[4] / MPMATH_BE[3]
    assert spectral.mean_photon_energy(1.0) == pytest.approx(ratio, rel=1e-14)
    assert spectral.mean_photon_energy_quad(1.0) == pytest.approx(ratio, rel=1e-10)


@given(st.floats(1e-25, 1e-15), st.floats(1e-3, 1e3))
def test_mean_photon_energy_is_homogeneous(ec, factor):
    a = spectral.mean_photon_energy(ec)
    b = spectral.mean_photon_energy(ec * factor)
    assert b == pytest.approx(a * factor, rel=1e-13)


def test_mean_photon_energy_accepts_energy_scale():
    ec = EnergyScale.from_kelvin(300)
    assert spectral.mean_photon_energy(ec) == pytest.approx(2.7011780329 * BOLTZMANN * 300, rel=1e-10)


def test_wien_peak():
    x = spectral.wien_peak_ratio()
    assert x == pytest.approx(2.82, abs=5e-3)
    assert x == pytest.approx(bisect_wien(), abs=1e-12)
    assert abs(x - 3 * (1 - math.exp(-x))) < 1e-12
    assert spectral.wien_peak(3.0) == pytest.approx(3.0 * x, rel=1e-15)


def test_stefan_boltzmann_flux():
    assert spectral.stefan_boltzmann_flux(300) == pytest.approx(460, rel=5e-3)
    assert spectral.stefan_boltzmann_flux(0) == 0.0
    # CODATA 2018 sigma
    assert spectral.stefan_boltzmann_flux(5778) == pytest.approx(5.670374419e-8 * 5778 ** 4, rel=1e-9)
    assert STEFAN_BOLTZMANN == pytest.approx(5.670374419e-8, rel=1e-9)
    assert spectral.stefan_boltzmann_flux(300, 0.5) == pytest.approx(0.5 * spectral.stefan_boltzmann_flux(300))
    with pytest.raises(DomainError):
        spectral.stefan_boltzmann_flux(-1)
    with pytest.raises(DomainError):
        spectral.stefan_boltzmann_flux(300, 1.5)


@given(st.floats(1e-3, 1e5))
def test_flux_scales_as_t4(t):
    assert spectral.stefan_boltzmann_flux(2 * t) / spectral.stefan_boltzmann_flux(t) == pytest.approx(16, rel=1e-12)


def test_planck_number_density_direct_substitution():
    nu = 1e12
    ec = PLANCK * nu
    expected = 8 * math.pi * nu ** 2 / SPEED_OF_LIGHT ** 3 / (math.e - 1)
    assert spectral.planck_number_density(nu, ec) == pytest.approx(expected, rel=1e-14)
    assert spectral.planck_occupation(1e20, PLANCK * 1e12) == 0.0
    with pytest.raises(DomainError):
        spectral.planck_number_density(0.0, ec)


def test_planck_number_density_decreasing_and_integrable():
    ec = 1e-21
    nu = np.geomspace(0.01, 80, 2000) * ec / PLANCK
    dens = spectral.planck_number_density(nu, ec)
    peak = np.argmax(dens)
    assert np.all(np.diff(dens[peak:]) < 0)
    # total number density: 8 pi (ec/hc)^3 * 2 zeta(3)
    total = np.trapezoid(dens, nu)
    expected = 8 * math.pi * (ec / (PLANCK * SPEED_OF_LIGHT)) ** 3 * MPMATH_BE[3]
    assert total == pytest.approx(expected, rel=1e-3)


def test_numerical_mean_of_spectrum():
    ec = 1e-20
    nu = np.geomspace(1e-4, 60, 20001) * ec / PLANCK
    n = spectral.planck_number_density(nu, ec)
    mean = np.trapezoid(PLANCK * nu * n, nu) / np.trapezoid(n, nu)
    assert mean == pytest.approx(spectral.mean_photon_energy(ec), rel=1e-5)


@given(st.floats(1e-23, 1e-18))
def test_occupation_is_one_at_ln2(ec):
    f = spectral.ideal_planck_field(ec, spectral.planck_grid(ec, n=101))
    nu = ec * math.log(2) / PLANCK
    assert f.occupation_at(nu) == pytest.approx(1.0, rel=1e-12)


def test_empty_field_limit():
    grid = np.linspace(1e12, 1e14, 50)
    occ = spectral.planck_occupation(grid, 1e-30)
    assert np.all(occ == 0.0)


def test_sampled_field_mean():
    ec = EnergyScale.from_kelvin(1000)
    f = spectral.ideal_planck_field(ec, spectral.planck_grid(ec, 1e-4, 60, 20001))
    assert f.mean_photon_energy() / ec.joules == pytest.approx(2.701, abs=1e-3)


def test_spectral_field_validation():
    with pytest.raises(ValidationError):
        SpectralField([1.0, 3.0, 2.0], [0.1, 0.1, 0.1])
    with pytest.raises(ValidationError):
        SpectralField([1.0, 2.0], [0.1, -0.1])
    with pytest.raises(ValidationError):
        SpectralField([1.0, 2.0], [0.1])
    f = SpectralField([1.0, 2.0, 3.0], [3.0, 2.0, 1.0])
    assert f.occupation_at(1.5) == pytest.approx(2.5)
    with pytest.raises(DomainError):
        f.occupation_at(5.0)


def test_scaled_field():
    ec = EnergyScale.from_kelvin(300)
    f = spectral.ideal_planck_field(ec, spectral.planck_grid(ec, n=201)).scaled(1.01)
    assert f.planck_ec is None
    assert np.allclose(f.occupation, 1.01 * spectral.planck_occupation(f.frequencies, ec))


def test_energy_scale_conversions():
    ec = EnergyScale.from_kelvin(300)
    assert ec.kelvin == pytest.approx(300)
    assert EnergyScale.from_ev(1).joules == pytest.approx(1.602176634e-19)
    assert float(2 * ec) == pytest.approx(2 * ec.joules)
    with pytest.raises(DomainError):
        EnergyScale(-1.0)


@settings(max_examples=30)
@given(st.floats(1.2, 9.0))
def test_quadrature_agrees_with_closed_form_everywhere(s):
    closed = spectral.bose_einstein_integral(s, method="closed")
    assert spectral.bose_einstein_integral_quad(s) == pytest.approx(closed, rel=1e-10)
