"""Casimir force-gradient experiment engine.

Theory (Lifshitz/proximity-force), electrostatic calibration physics, sweep
simulation and the analysis chain that discriminates dielectric models from
frequency-shift data of a membrane resonator facing a sphere.
"""
from . import constants, errors, materials
from .lifshitz import backend_name

__version__ = "0.1.0"

__all__ = ["constants", "errors", "materials", "backend_name", "__version__"]
