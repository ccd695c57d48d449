"""Physical constants (CODATA 2018, SI) and unit conversions.

All internal computation is SI; electron-volt inputs are converted at the
configuration boundary and nowhere else.
"""
from __future__ import annotations

hbar: float = 1.054571817e-34
"""Reduced Planck constant [J s]."""

c: float = 2.99792458e8
"""Speed of light in vacuum [m/s] (exact)."""

k_B: float = 1.380649e-23
"""Boltzmann constant [J/K] (exact)."""

epsilon_0: float = 8.8541878128e-12
"""Vacuum permittivity [F/m]."""

e_charge: float = 1.602176634e-19
"""Elementary charge [C] (exact)."""


def ev_to_radpersec(energy_ev: float) -> float:
    """Convert an energy in eV to an angular frequency in rad/s (E/hbar)."""
    return energy_ev * e_charge / hbar
