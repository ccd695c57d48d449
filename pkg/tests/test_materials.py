"""Permittivity models and thermal state."""
import math

import numpy as np
import pytest

from casimir_membrane.constants import e_charge, hbar, k_B
from casimir_membrane.errors import DomainError, SingularInputError
from casimir_membrane.materials import (
    GOLD_GAMMA_EV,
    GOLD_OMEGA_P_EV,
    Drude,
    PerfectConductor,
    Plasma,
    ThermalState,
    eps_imag,
    matsubara_xi,
)


def test_gold_parameters_are_spectroscopic_values():
    assert GOLD_OMEGA_P_EV == 7.54
    assert GOLD_GAMMA_EV == 0.051
    gold = Drude.gold()
    assert gold.omega_p == pytest.approx(7.54 * e_charge / hbar, rel=1e-12)
    assert gold.gamma == pytest.approx(0.051 * e_charge / hbar, rel=1e-12)
    assert Plasma.gold().omega_p == gold.omega_p


def test_model_kind_tags():
    assert Drude.gold().kind == "drude"
    assert Plasma.gold().kind == "plasma"
    assert PerfectConductor().kind == "ideal"


def test_eps_imag_closed_forms():
    wp, g = 2.0e16, 5.0e13
    xi = 3.0e15
    assert eps_imag(Drude(wp, g), xi) == pytest.approx(
        1.0 + wp**2 / (xi * (xi + g)), rel=1e-14
    )
    assert eps_imag(Plasma(wp), xi) == pytest.approx(1.0 + wp**2 / xi**2, rel=1e-14)
    assert math.isinf(eps_imag(PerfectConductor(), xi))


def test_eps_imag_drude_at_its_own_plasma_frequency():
    # eps(i wp) = 1 + wp / (wp + gamma), very close to 2 for gamma << wp
    gold = Drude.gold()
    assert eps_imag(gold, gold.omega_p) == pytest.approx(
        1.0 + 7.54**2 / (7.54 * (7.54 + 0.051)), rel=1e-12
    )


def test_eps_imag_array_and_ordering():
    xi = np.geomspace(1e13, 1e18, 40)
    for model in (Drude.gold(), Plasma.gold()):
        eps = eps_imag(model, xi)
        assert eps.shape == xi.shape
        assert np.all(eps > 1.0)
        assert np.all(np.diff(eps) < 0)  # monotone decreasing in xi


def test_plasma_exceeds_drude_at_equal_omega_p():
    # dissipation only removes response on the imaginary axis
    xi = np.geomspace(1e13, 1e17, 20)
    assert np.all(eps_imag(Plasma.gold(), xi) > eps_imag(Drude.gold(), xi))


def test_eps_imag_zero_xi_is_singular_for_metals():
    with pytest.raises(SingularInputError):
        eps_imag(Drude.gold(), 0.0)
    with pytest.raises(SingularInputError):
        eps_imag(Plasma.gold(), np.array([1e15, 0.0]))


def test_eps_imag_rejects_negative_xi():
    with pytest.raises(DomainError):
        eps_imag(Drude.gold(), -1.0)


def test_invalid_model_parameters_rejected():
    with pytest.raises(DomainError):
        Drude(-1.0, 1.0)
    with pytest.raises(DomainError):
        Drude(1.0, 0.0)
    with pytest.raises(DomainError):
        Plasma(0.0)


def test_matsubara_frequency_formula():
    t = 293.15
    assert matsubara_xi(1, t) == pytest.approx(
        2.0 * math.pi * k_B * t / hbar, rel=1e-14
    )
    # frozen: first Matsubara frequency at room temperature
    assert matsubara_xi(1, 293.15) == pytest.approx(2.41144237766e14, rel=1e-10)
    n = np.arange(5)
    xi = matsubara_xi(n, t)
    assert xi[0] == 0.0
    assert np.allclose(np.diff(xi), xi[1])


def test_matsubara_rejects_bad_arguments():
    with pytest.raises(DomainError):
        matsubara_xi(-1, 300.0)
    with pytest.raises(DomainError):
        matsubara_xi(1, 0.0)


def test_thermal_state_requires_positive_temperature():
    assert ThermalState(293.15).temperature_k == 293.15
    with pytest.raises(DomainError):
        ThermalState(0.0)
    with pytest.raises(DomainError):
        ThermalState(-4.0)
