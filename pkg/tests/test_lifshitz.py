"""Lifshitz engine against independent oracles.

The frozen reference numbers were computed with a separate brute-force
implementation (direct scipy.integrate.quad over the transverse wavenumber,
explicit Matsubara loop, reflection coefficients written from the
permittivity definitions) and with closed-form zero-temperature results.
"""
import math
import warnings

import numpy as np
import pytest

from casimir_membrane.constants import c, hbar, k_B
from casimir_membrane.errors import DomainError, GeometryError
from casimir_membrane.lifshitz import (
    PfaAccuracyWarning,
    casimir_force_curve,
    plate_plate_energy,
    plate_plate_pressure,
    reflection_coeffs,
    sphere_plate_force,
)
from casimir_membrane.materials import Drude, PerfectConductor, Plasma, ThermalState

ROOM = ThermalState(293.15)


def ideal_energy_t0(z: float) -> float:
    return -hbar * c * math.pi**2 / (720.0 * z**3)


def ideal_pressure_t0(z: float) -> float:
    return -hbar * c * math.pi**2 / (240.0 * z**4)


# --------------------------------------------------------------------------
# zero temperature


@pytest.mark.parametrize("z", [100e-9, 500e-9, 1e-6])
def test_ideal_t0_energy_and_pressure_closed_form(z):
    e = plate_plate_energy(PerfectConductor(), z, None)
    p = plate_plate_pressure(PerfectConductor(), z, None)
    assert e == pytest.approx(ideal_energy_t0(z), rel=1e-8)
    assert p == pytest.approx(ideal_pressure_t0(z), rel=1e-8)


def test_ideal_t0_third_derivative_closed_form():
    # P'' = -hbar c pi^2 / (12 z^6)
    z = 200e-9
    d3 = plate_plate_pressure(PerfectConductor(), z, None, order=2)
    assert d3 == pytest.approx(-hbar * c * math.pi**2 / (12.0 * z**6), rel=1e-8)


def test_plasma_approaches_ideal_from_below():
    # oracle (independent double quadrature): ratio 0.961397 at omega_p z/c = 100
    z = 100e-9
    model = Plasma(100.0 * c / z)
    ratio = plate_plate_energy(model, z, None) / ideal_energy_t0(z)
    assert ratio == pytest.approx(0.961397, abs=1e-4)
    # a tighter skin depth gets closer to the ideal mirror
    better = plate_plate_energy(Plasma(400.0 * c / z), z, None) / ideal_energy_t0(z)
    assert ratio < better < 1.0


def test_drude_t0_below_plasma_t0():
    z = 100e-9
    e_d = plate_plate_energy(Drude.gold(), z, None)
    e_p = plate_plate_energy(Plasma.gold(), z, None)
    assert e_p < e_d < 0.0  # dissipation weakens the binding


# --------------------------------------------------------------------------
# room temperature, gold


def test_gold_energies_at_100nm_match_independent_sum():
    e_d = plate_plate_energy(Drude.gold(), 100e-9, ROOM)
    e_p = plate_plate_energy(Plasma.gold(), 100e-9, ROOM)
    assert e_d == pytest.approx(-2.0124369345340503e-07, rel=1e-6)
    assert e_p == pytest.approx(-2.086411025697778e-07, rel=1e-6)


def test_gold_pressures_at_1um_match_independent_sum():
    p_d = plate_plate_pressure(Drude.gold(), 1e-6, ROOM)
    p_p = plate_plate_pressure(Plasma.gold(), 1e-6, ROOM)
    assert p_d == pytest.approx(-0.0009625151387681635, rel=1e-6)
    assert p_p == pytest.approx(-0.0011406667023599712, rel=1e-6)


def test_classical_limit_ratio_is_two():
    # far distance, high T: ideal keeps both polarizations, Drude only TM
    p_ideal = plate_plate_pressure(PerfectConductor(), 50e-6, ROOM)
    p_drude = plate_plate_pressure(Drude.gold(), 50e-6, ROOM)
    assert p_ideal / p_drude == pytest.approx(2.0, rel=1e-4)
    # and the Drude classical value is the zeta(3) TM-only form
    classical = -k_B * ROOM.temperature_k * 1.2020569031595943 / (
        8.0 * math.pi * (50e-6) ** 3
    )
    assert p_drude == pytest.approx(classical, rel=1e-3)


def test_drude_te_n0_removal_is_bitwise_noop():
    z = 1e-6
    e_with = plate_plate_energy(Drude.gold(), z, ROOM, include_n0_te=True)
    e_without = plate_plate_energy(Drude.gold(), z, ROOM, include_n0_te=False)
    assert e_with == e_without  # bitwise
    p_with = plate_plate_pressure(Drude.gold(), z, ROOM, include_n0_te=True)
    p_without = plate_plate_pressure(Drude.gold(), z, ROOM, include_n0_te=False)
    assert p_with == p_without
    e_p_with = plate_plate_energy(Plasma.gold(), z, ROOM, include_n0_te=True)
    e_p_without = plate_plate_energy(Plasma.gold(), z, ROOM, include_n0_te=False)
    assert e_p_with != e_p_without
    assert abs(e_p_without) < abs(e_p_with)  # removing a binding term


def test_rtol_controls_convergence():
    loose = plate_plate_energy(Drude.gold(), 300e-9, ROOM, rtol=1e-5)
    tight = plate_plate_energy(Drude.gold(), 300e-9, ROOM, rtol=1e-12)
    assert loose == pytest.approx(tight, rel=1e-4)
    assert loose != tight


def test_finite_t_energy_between_models_everywhere():
    for z in (150e-9, 600e-9, 1.5e-6):
        e_d = plate_plate_energy(Drude.gold(), z, ROOM)
        e_p = plate_plate_energy(Plasma.gold(), z, ROOM)
        e_i = plate_plate_energy(PerfectConductor(), z, ROOM)
        assert e_i < e_p < e_d < 0.0


# --------------------------------------------------------------------------
# reflection coefficients


def test_reflection_zero_frequency_limits():
    k = 1e7
    assert reflection_coeffs(Drude.gold(), 0.0, k) == (0.0, 1.0)
    r_te, r_tm = reflection_coeffs(Plasma.gold(), 0.0, k)
    kapm = math.sqrt(k * k + (Plasma.gold().omega_p / c) ** 2)
    assert r_te == pytest.approx((k - kapm) / (k + kapm), rel=1e-12)
    assert r_tm == 1.0
    assert reflection_coeffs(PerfectConductor(), 0.0, k) == (-1.0, 1.0)


def test_reflection_magnitudes_and_signs():
    xi = 1e15
    k = np.geomspace(1e5, 1e9, 50)
    for model in (Drude.gold(), Plasma.gold()):
        r_te, r_tm = reflection_coeffs(model, xi, k)
        assert np.all(r_te <= 0) and np.all(r_te > -1)
        assert np.all(r_tm >= 0) and np.all(r_tm < 1)


def test_reflection_rejects_bad_inputs():
    with pytest.raises(DomainError):
        reflection_coeffs(Drude.gold(), -1.0, 1e7)
    with pytest.raises(DomainError):
        reflection_coeffs(Drude.gold(), 1e15, 0.0)


# --------------------------------------------------------------------------
# sphere-plate mapping and curves


def test_sphere_plate_is_2pi_r_times_plate_quantities():
    z, radius = 300e-9, 4e-3
    e = plate_plate_energy(Drude.gold(), z, ROOM)
    p = plate_plate_pressure(Drude.gold(), z, ROOM)
    assert sphere_plate_force(Drude.gold(), z, radius, ROOM) == pytest.approx(
        2.0 * math.pi * radius * e, rel=1e-12
    )
    assert sphere_plate_force(
        Drude.gold(), z, radius, ROOM, order=1
    ) == pytest.approx(2.0 * math.pi * radius * p, rel=1e-12)


def test_ideal_sphere_gradient_frozen_value():
    # 2 pi R * pi^2 hbar c / (240 z^4) at R = 4 mm, z = 100 nm
    d1 = sphere_plate_force(PerfectConductor(), 100e-9, 4e-3, None, order=1)
    assert d1 == pytest.approx(-0.32675724603716944, rel=1e-8)


def test_derivative_orders_match_finite_differences():
    z, radius = 400e-9, 4e-3
    h = 2e-3 * z
    f = lambda zz: sphere_plate_force(Drude.gold(), zz, radius, ROOM)
    g = lambda zz: sphere_plate_force(Drude.gold(), zz, radius, ROOM, order=1)
    d1 = sphere_plate_force(Drude.gold(), z, radius, ROOM, order=1)
    d3 = sphere_plate_force(Drude.gold(), z, radius, ROOM, order=3)
    # repo convention: d1 is the attractive-negative gradient = -dF/dz
    fd1 = -(f(z + h) - f(z - h)) / (2.0 * h)
    assert d1 == pytest.approx(fd1, rel=5e-5)
    fd3 = (g(z + h) - 2.0 * g(z) + g(z - h)) / (h * h)
    assert d3 == pytest.approx(fd3, rel=5e-5)


def test_pfa_guardrails():
    with pytest.warns(PfaAccuracyWarning):
        sphere_plate_force(PerfectConductor(), 60e-6, 4e-3, None)
    with pytest.raises(GeometryError):
        sphere_plate_force(PerfectConductor(), 500e-6, 4e-3, None)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        sphere_plate_force(PerfectConductor(), 2e-6, 4e-3, None)  # quiet region


def test_force_curve_contents_and_interpolation(gold_drude_curve):
    curve = gold_drude_curve
    assert np.all(np.diff(curve.z_m) > 0)
    for field in ("value", "d1", "d3"):
        assert np.all(getattr(curve, field) < 0)
    # interpolator reproduces grid points and refuses extrapolation
    d1_at = curve.interpolator("d1")
    mid = math.sqrt(curve.z_m[10] * curve.z_m[11])
    assert d1_at(float(curve.z_m[10])) == pytest.approx(curve.d1[10], rel=1e-12)
    lo, hi = curve.d1[10], curve.d1[11]
    assert min(lo, hi) <= d1_at(mid) <= max(lo, hi)
    with pytest.raises(DomainError):
        d1_at(curve.z_m[0] * 0.5)
    with pytest.raises(DomainError):
        curve.interpolator("d2")


def test_casimir_force_curve_validates_grid():
    with pytest.raises(DomainError):
        casimir_force_curve(PerfectConductor(), [], 4e-3, None)
    with pytest.raises(DomainError):
        casimir_force_curve(PerfectConductor(), [2e-7, 1e-7], 4e-3, None)
    with pytest.raises(DomainError):
        casimir_force_curve(PerfectConductor(), [-1e-7, 1e-7], 4e-3, None)


def test_curve_matches_pointwise_evaluation():
    grid = np.array([150e-9, 420e-9, 1.1e-6])
    curve = casimir_force_curve(Drude.gold(), grid, 4e-3, ROOM)
    for i, z in enumerate(grid):
        assert curve.value[i] == pytest.approx(
            sphere_plate_force(Drude.gold(), float(z), 4e-3, ROOM), rel=1e-12
        )
        assert curve.d3[i] == pytest.approx(
            sphere_plate_force(Drude.gold(), float(z), 4e-3, ROOM, order=3),
            rel=1e-12,
        )
    assert curve.temperature_k == 293.15
    assert curve.model.kind == "drude"


def test_thread_count_does_not_change_results():
    grid = np.geomspace(120e-9, 1.9e-6, 7)
    one = casimir_force_curve(Drude.gold(), grid, 4e-3, ROOM, threads=1)
    four = casimir_force_curve(Drude.gold(), grid, 4e-3, ROOM, threads=4)
    assert np.array_equal(one.value, four.value)
    assert np.array_equal(one.d1, four.d1)
    assert np.array_equal(one.d3, four.d3)
