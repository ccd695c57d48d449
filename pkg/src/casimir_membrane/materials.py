"""Dielectric response models on the imaginary-frequency axis and thermal state.

Models carry plasma/damping frequencies in SI angular units (rad/s); use the
``from_ev`` constructors when starting from spectroscopic values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import hbar, k_B, ev_to_radpersec
from .errors import DomainError, SingularInputError

GOLD_OMEGA_P_EV: float = 7.54
GOLD_GAMMA_EV: float = 0.051


@dataclass(frozen=True)
class Drude:
    """Dissipative metal: eps(i xi) = 1 + omega_p^2 / (xi (xi + gamma))."""

    omega_p: float
    gamma: float
    kind = "drude"

    def __post_init__(self):
        if self.omega_p <= 0 or self.gamma <= 0:
            raise DomainError("Drude parameters must be positive")

    @classmethod
    def from_ev(cls, omega_p_ev: float, gamma_ev: float) -> "Drude":
        return cls(ev_to_radpersec(omega_p_ev), ev_to_radpersec(gamma_ev))

    @classmethod
    def gold(cls) -> "Drude":
        return cls.from_ev(GOLD_OMEGA_P_EV, GOLD_GAMMA_EV)


@dataclass(frozen=True)
class Plasma:
    """Dissipationless metal: eps(i xi) = 1 + omega_p^2 / xi^2."""

    omega_p: float
    kind = "plasma"

    def __post_init__(self):
        if self.omega_p <= 0:
            raise DomainError("Plasma frequency must be positive")

    @classmethod
    def from_ev(cls, omega_p_ev: float) -> "Plasma":
        return cls(ev_to_radpersec(omega_p_ev))

    @classmethod
    def gold(cls) -> "Plasma":
        return cls.from_ev(GOLD_OMEGA_P_EV)


@dataclass(frozen=True)
class PerfectConductor:
    """Ideal mirror: unit-magnitude reflection at every frequency."""

    kind = "ideal"


PermittivityModel = Drude | Plasma | PerfectConductor


@dataclass(frozen=True)
class ThermalState:
    """Finite temperature of the plate-sphere system [K].

    Strictly positive; the zero-temperature limit is a separate evaluation
    path that takes no ThermalState.
    """

    temperature_k: float

    def __post_init__(self):
        if not self.temperature_k > 0:
            raise DomainError("temperature must be > 0 K; use the zero-temperature path instead")


def eps_imag(model: PermittivityModel, xi):
    """Permittivity at imaginary frequency, eps(i xi), for xi in rad/s.

    Accepts a scalar or array xi >= 0. Real-valued and >= 1 for all models;
    PerfectConductor returns +inf. Drude/Plasma diverge at xi = 0, which is
    handled analytically in the reflection coefficients, so xi = 0 raises
    SingularInputError here.
    """
    xi_arr = np.asarray(xi, dtype=float)
    if np.any(xi_arr < 0):
        raise DomainError("xi must be >= 0")
    if isinstance(model, PerfectConductor):
        out = np.full_like(xi_arr, math.inf)
        return float(out) if np.isscalar(xi) or xi_arr.ndim == 0 else out
    if np.any(xi_arr == 0):
        raise SingularInputError(
            "eps(i xi) diverges at xi = 0 for metallic models; "
            "use reflection_coeffs, which applies the analytic xi = 0 limit"
        )
    if isinstance(model, Drude):
        out = 1.0 + model.omega_p**2 / (xi_arr * (xi_arr + model.gamma))
    elif isinstance(model, Plasma):
        out = 1.0 + model.omega_p**2 / xi_arr**2
    else:
        raise DomainError(f"unknown permittivity model: {model!r}")
    return float(out) if np.isscalar(xi) or xi_arr.ndim == 0 else out


def matsubara_xi(n, temperature_k: float):
    """n-th Matsubara angular frequency xi_n = 2 pi n k_B T / hbar [rad/s]."""
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise DomainError("Matsubara index must be >= 0")
    if not temperature_k > 0:
        raise DomainError("temperature must be > 0 K")
    out = 2.0 * np.pi * n_arr * k_B * temperature_k / hbar
    return float(out) if np.isscalar(n) or n_arr.ndim == 0 else out
