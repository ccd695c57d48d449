"""Shared fixtures. Session-scoped reference curves keep the suite fast:
every consumer of the gold curves hits the same process-wide cache that the
pipeline itself uses."""
from __future__ import annotations

import pytest

from casimir_membrane.materials import Drude, Plasma, ThermalState
from casimir_membrane.simulator import reference_curve, run_experiment, scenario_preset

ROOM = ThermalState(293.15)
SPHERE_R = 4.0e-3


@pytest.fixture(scope="session")
def gold_drude_curve():
    return reference_curve(Drude.gold(), ROOM, SPHERE_R, 1.0e-7, 2.0e-6)


@pytest.fixture(scope="session")
def gold_plasma_curve():
    return reference_curve(Plasma.gold(), ROOM, SPHERE_R, 1.0e-7, 2.0e-6)


@pytest.fixture(scope="session")
def ideal_config():
    return scenario_preset("ideal")


@pytest.fixture(scope="session")
def ideal_records(ideal_config):
    return run_experiment(ideal_config)
