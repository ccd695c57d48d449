"""Lifshitz engine: reflection coefficients, plate-plate thermodynamics and
sphere-plate force curves (proximity-force mapping)."""
from ._backend import backend_name
from .core import (
    DEFAULT_RTOL,
    ForceCurve,
    PfaAccuracyWarning,
    apparent_force_gradient,
    casimir_force_curve,
    plate_plate_energy,
    plate_plate_pressure,
    reflection_coeffs,
    sphere_plate_force,
)

__all__ = [
    "DEFAULT_RTOL",
    "ForceCurve",
    "PfaAccuracyWarning",
    "apparent_force_gradient",
    "backend_name",
    "casimir_force_curve",
    "plate_plate_energy",
    "plate_plate_pressure",
    "reflection_coeffs",
    "sphere_plate_force",
]
