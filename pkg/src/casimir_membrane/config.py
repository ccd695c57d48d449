"""Strict JSON configuration documents, presets, and experiment builders.

One JSON document describes one experiment (or one curve / Kelvin-map
request). Field names carry their unit as a suffix (z_m, f_m_hz,
k_eff_n_per_m); unknown keys anywhere fail fast with their dotted path.
Physical parameters have no silent defaults, with three documented
exceptions: the mode frequency falls back to 1e5 Hz when omitted (the
resonator frequency is instrument metadata, not a fitted quantity), the
quality factor to 14000, and material parameters to the gold values
(7.54 eV plasma frequency, 0.051 eV relaxation).
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .electrostatics import (
    ConstantVm,
    ElectrostaticEnv,
    PatchMap,
    PatchVm,
    TabulatedVm,
    generate_patch_map,
)
from .errors import ConfigError
from .materials import Drude, PerfectConductor, Plasma, PermittivityModel, ThermalState
from .resonator import NoiseSpec, ResonatorParams
from .simulator import ExperimentConfig

__all__ = [
    "CurveRequest",
    "ExperimentBundle",
    "FitOptions",
    "KelvinRequest",
    "KelvinScanSpec",
    "build_curve_request",
    "build_experiment_config",
    "build_kelvin_request",
    "load_config",
    "material_from_doc",
    "preset_document",
    "preset_names",
]

DEFAULT_F_M_HZ = 1.0e5
DEFAULT_Q_FACTOR = 14000.0
TRIPLET_HALF_SPAN_V = 0.1


# --------------------------------------------------------------------------
# strict document walking


def _expect_mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"'{path}' must be a JSON object")
    return value


def _reject_unknown(doc: dict, allowed, path: str) -> None:
    for key in doc:
        if key not in allowed:
            raise ConfigError(f"unknown config key '{path}.{key}'" if path else
                              f"unknown config key '{key}'")


def _missing(path: str, key: str) -> ConfigError:
    where = f"{path}.{key}" if path else key
    return ConfigError(f"missing required config key '{where}'")


_REQUIRED = object()


def _get_number(
    doc: dict,
    key: str,
    path: str,
    *,
    default=_REQUIRED,
    minimum: float | None = None,
    exclusive: bool = False,
    allow_none: bool = False,
):
    if key not in doc:
        if default is _REQUIRED:
            raise _missing(path, key)
        return default
    value = doc[key]
    where = f"{path}.{key}" if path else key
    if value is None:
        if allow_none:
            return None
        raise ConfigError(f"'{where}' must be a number, got null")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"'{where}' must be a number")
    value = float(value)
    if not np.isfinite(value):
        raise ConfigError(f"'{where}' must be finite")
    if minimum is not None:
        if exclusive and not value > minimum:
            raise ConfigError(f"'{where}' must be > {minimum:g}")
        if not exclusive and not value >= minimum:
            raise ConfigError(f"'{where}' must be >= {minimum:g}")
    return value


def _get_int(doc: dict, key: str, path: str, *, default=_REQUIRED, minimum=None):
    if key not in doc:
        if default is _REQUIRED:
            raise _missing(path, key)
        return default
    value = doc[key]
    where = f"{path}.{key}" if path else key
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"'{where}' must be an integer")
    if minimum is not None and value < minimum:
        raise ConfigError(f"'{where}' must be >= {minimum}")
    return value


def _get_str(doc: dict, key: str, path: str, *, default=_REQUIRED, choices=None):
    if key not in doc:
        if default is _REQUIRED:
            raise _missing(path, key)
        return default
    value = doc[key]
    where = f"{path}.{key}" if path else key
    if not isinstance(value, str):
        raise ConfigError(f"'{where}' must be a string")
    if choices is not None and value not in choices:
        raise ConfigError(
            f"'{where}' must be one of {sorted(choices)}, got '{value}'"
        )
    return value


def _get_bool(doc: dict, key: str, path: str, *, default=_REQUIRED):
    if key not in doc:
        if default is _REQUIRED:
            raise _missing(path, key)
        return default
    value = doc[key]
    where = f"{path}.{key}" if path else key
    if not isinstance(value, bool):
        raise ConfigError(f"'{where}' must be true or false")
    return value


def _number_list(value, where: str) -> list[float]:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"'{where}' must be a non-empty array of numbers")
    out = []
    for i, item in enumerate(value):
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigError(f"'{where}[{i}]' must be a number")
        item = float(item)
        if not np.isfinite(item):
            raise ConfigError(f"'{where}[{i}]' must be finite")
        out.append(item)
    return out


def load_config(path) -> dict:
    """Read a JSON config document. Malformed JSON raises ConfigError."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return _expect_mapping(doc, str(path))


# --------------------------------------------------------------------------
# shared sub-documents


def material_from_doc(doc, path: str = "model") -> PermittivityModel:
    """Permittivity model from {kind, plasma_frequency_ev?, relaxation_ev?}."""
    doc = _expect_mapping(doc, path)
    kind = _get_str(doc, "kind", path, choices={"drude", "plasma", "ideal"})
    if kind == "drude":
        _reject_unknown(doc, {"kind", "plasma_frequency_ev", "relaxation_ev"}, path)
        return Drude.from_ev(
            _get_number(doc, "plasma_frequency_ev", path, default=7.54,
                        minimum=0.0, exclusive=True),
            _get_number(doc, "relaxation_ev", path, default=0.051,
                        minimum=0.0, exclusive=True),
        )
    if kind == "plasma":
        _reject_unknown(doc, {"kind", "plasma_frequency_ev"}, path)
        return Plasma.from_ev(
            _get_number(doc, "plasma_frequency_ev", path, default=7.54,
                        minimum=0.0, exclusive=True)
        )
    _reject_unknown(doc, {"kind"}, path)
    return PerfectConductor()


def _thermal_from_doc(doc: dict, path: str) -> ThermalState | None:
    temperature = _get_number(
        doc, "temperature_k", path, minimum=0.0, exclusive=True, allow_none=True
    )
    return None if temperature is None else ThermalState(temperature)


def _grid_from_doc(value, where: str) -> np.ndarray:
    """A z grid: either an explicit array or {start_m, stop_m, n_points, spacing}."""
    if isinstance(value, list):
        grid = np.asarray(_number_list(value, where))
    else:
        doc = _expect_mapping(value, where)
        _reject_unknown(doc, {"start_m", "stop_m", "n_points", "spacing"}, where)
        start = _get_number(doc, "start_m", where, minimum=0.0, exclusive=True)
        stop = _get_number(doc, "stop_m", where, minimum=0.0, exclusive=True)
        n = _get_int(doc, "n_points", where, minimum=1)
        spacing = _get_str(doc, "spacing", where, default="log",
                           choices={"log", "linear"})
        if spacing == "log":
            grid = np.geomspace(start, stop, n)
        else:
            grid = np.linspace(start, stop, n)
    if np.any(grid <= 0):
        raise ConfigError(f"'{where}' entries must be > 0")
    return grid


def _patch_map_from_doc(doc: dict, path: str) -> PatchMap:
    _reject_unknown(
        doc,
        {"kind", "n_x", "n_y", "spacing_m", "correlation_length_m",
         "rms_v", "mean_v", "seed"},
        path,
    )
    return generate_patch_map(
        nx=_get_int(doc, "n_x", path, minimum=2),
        ny=_get_int(doc, "n_y", path, minimum=2),
        spacing_m=_get_number(doc, "spacing_m", path, minimum=0.0, exclusive=True),
        correlation_length_m=_get_number(
            doc, "correlation_length_m", path, minimum=0.0, exclusive=True
        ),
        rms_v=_get_number(doc, "rms_v", path, minimum=0.0),
        mean_v=_get_number(doc, "mean_v", path, default=0.0),
        seed=_get_int(doc, "seed", path, default=0),
    )


# --------------------------------------------------------------------------
# experiment documents


@dataclass(frozen=True)
class KelvinScanSpec:
    """Grid for a simulated Kelvin-probe scan, centered on the patch map."""

    z_m: float
    n_x: int
    n_y: int
    pitch_m: float

    def grid_axes(self, patch_map: PatchMap) -> tuple[np.ndarray, np.ndarray]:
        ex, ey = patch_map.extent_m
        xs = 0.5 * ex + (np.arange(self.n_x) - 0.5 * (self.n_x - 1)) * self.pitch_m
        ys = 0.5 * ey + (np.arange(self.n_y) - 0.5 * (self.n_y - 1)) * self.pitch_m
        return xs, ys


@dataclass(frozen=True)
class FitOptions:
    """Analysis-stage choices carried by the experiment document."""

    candidates: dict[str, PermittivityModel]
    sigma_override_hz: float | None
    rtol: float
    include_n0_te: bool


@dataclass(frozen=True)
class ExperimentBundle:
    """Built experiment plus the side artifacts its document described."""

    config: ExperimentConfig
    patch_map: PatchMap | None
    kelvin: KelvinScanSpec | None
    fit: FitOptions


_EXPERIMENT_KEYS = {
    "model", "temperature_k", "geometry", "resonator", "noise",
    "electrostatics", "sweep", "kelvin_scan", "fit",
}


def build_experiment_config(doc) -> ExperimentBundle:
    """Validate an experiment document and build every runtime object.

    A patch-map potential profile is evaluated at the map center and
    tabulated over a padded span of the sweep's true distances (same pad
    factors as the reference-curve recipe), so repeated simulation runs do
    not re-average the map at every visit.
    """
    doc = _expect_mapping(doc, "")
    _reject_unknown(doc, _EXPERIMENT_KEYS, "")
    for key in ("model", "geometry", "resonator", "sweep"):
        if key not in doc:
            raise _missing("", key)
    if "temperature_k" not in doc:
        raise _missing("", "temperature_k")

    model = material_from_doc(doc["model"], "model")
    thermal = _thermal_from_doc(doc, "")

    geometry = _expect_mapping(doc["geometry"], "geometry")
    _reject_unknown(geometry, {"sphere_radius_m"}, "geometry")
    radius = _get_number(geometry, "sphere_radius_m", "geometry",
                         minimum=0.0, exclusive=True)

    res_doc = _expect_mapping(doc["resonator"], "resonator")
    _reject_unknown(res_doc, {"f_m_hz", "k_eff_n_per_m", "q_factor", "a_rms_m"},
                    "resonator")
    resonator = ResonatorParams(
        f_m_hz=_get_number(res_doc, "f_m_hz", "resonator", default=DEFAULT_F_M_HZ,
                           minimum=0.0, exclusive=True),
        k_eff_n_per_m=_get_number(res_doc, "k_eff_n_per_m", "resonator",
                                  minimum=0.0, exclusive=True),
        q_factor=_get_number(res_doc, "q_factor", "resonator",
                             default=DEFAULT_Q_FACTOR, minimum=0.0, exclusive=True),
        a_rms_m=_get_number(res_doc, "a_rms_m", "resonator", default=0.0,
                            minimum=0.0),
    )

    if "noise" in doc:
        noise_doc = _expect_mapping(doc["noise"], "noise")
        _reject_unknown(noise_doc, {"sigma_y_1s", "sample_interval_s"}, "noise")
        noise = NoiseSpec(
            sigma_y_1s=_get_number(noise_doc, "sigma_y_1s", "noise", minimum=0.0),
            sample_interval_s=_get_number(noise_doc, "sample_interval_s", "noise",
                                          minimum=0.0, exclusive=True),
        )
    else:
        noise = NoiseSpec(sigma_y_1s=0.0, sample_interval_s=1.0)

    sweep = _expect_mapping(doc["sweep"], "sweep")
    _reject_unknown(
        sweep,
        {"z_setpoints_m", "distances_m", "z_offset_true_m", "voltage_triplet_v",
         "vm_guess_v", "n_repeats", "position_jitter_rms_m", "seed", "rtol"},
        "sweep",
    )
    z_off_true = _get_number(sweep, "z_offset_true_m", "sweep", minimum=0.0)
    if ("z_setpoints_m" in sweep) == ("distances_m" in sweep):
        raise ConfigError(
            "'sweep' must give exactly one of 'z_setpoints_m' (positioner "
            "readings) or 'distances_m' (surface separations)"
        )
    if "z_setpoints_m" in sweep:
        setpoints = _grid_from_doc(sweep["z_setpoints_m"], "sweep.z_setpoints_m")
    else:
        distances = _grid_from_doc(sweep["distances_m"], "sweep.distances_m")
        setpoints = distances + z_off_true
    setpoints = np.sort(np.asarray(setpoints))[::-1]
    if np.unique(setpoints).size != setpoints.size:
        raise ConfigError("sweep grid contains duplicate entries")

    if "voltage_triplet_v" in sweep:
        triplet = _number_list(sweep["voltage_triplet_v"], "sweep.voltage_triplet_v")
        if len(triplet) != 3:
            raise ConfigError("'sweep.voltage_triplet_v' must list exactly 3 voltages")
    else:
        guess = _get_number(sweep, "vm_guess_v", "sweep", default=0.0)
        triplet = [guess - TRIPLET_HALF_SPAN_V, guess, guess + TRIPLET_HALF_SPAN_V]

    distances_true = setpoints - z_off_true
    if np.any(distances_true <= 0):
        raise ConfigError("every sweep position must lie above the contact offset")

    patch_map: PatchMap | None = None
    v1 = 0.0
    v_rms = 0.0
    vm_profile = ConstantVm(0.0)
    if "electrostatics" in doc:
        el_doc = _expect_mapping(doc["electrostatics"], "electrostatics")
        _reject_unknown(el_doc, {"v1_v", "v_rms_v", "vm"}, "electrostatics")
        v1 = _get_number(el_doc, "v1_v", "electrostatics", default=0.0)
        v_rms = _get_number(el_doc, "v_rms_v", "electrostatics", default=0.0,
                            minimum=0.0)
        if "vm" in el_doc:
            vm_doc = _expect_mapping(el_doc["vm"], "electrostatics.vm")
            kind = _get_str(vm_doc, "kind", "electrostatics.vm",
                            choices={"constant", "table", "patch_map"})
            if kind == "constant":
                _reject_unknown(vm_doc, {"kind", "value_v"}, "electrostatics.vm")
                vm_profile = ConstantVm(
                    _get_number(vm_doc, "value_v", "electrostatics.vm")
                )
            elif kind == "table":
                _reject_unknown(vm_doc, {"kind", "z_m", "vm_v"}, "electrostatics.vm")
                if "z_m" not in vm_doc:
                    raise _missing("electrostatics.vm", "z_m")
                if "vm_v" not in vm_doc:
                    raise _missing("electrostatics.vm", "vm_v")
                z_tab = _number_list(vm_doc["z_m"], "electrostatics.vm.z_m")
                v_tab = _number_list(vm_doc["vm_v"], "electrostatics.vm.vm_v")
                if len(z_tab) != len(v_tab):
                    raise ConfigError(
                        "'electrostatics.vm' table columns differ in length"
                    )
                vm_profile = TabulatedVm(z_tab, v_tab)
            else:
                patch_map = _patch_map_from_doc(vm_doc, "electrostatics.vm")
                ex, ey = patch_map.extent_m
                point_vm = PatchVm(patch_map, (0.5 * ex, 0.5 * ey), radius)
                d_lo = 0.7 * float(np.min(distances_true))
                d_hi = 1.6 * float(np.max(distances_true))
                n_tab = max(int(np.ceil(np.log10(d_hi / d_lo) * 96)) + 1, 8)
                d_tab = np.geomspace(d_lo, d_hi, n_tab)
                vm_profile = TabulatedVm(d_tab, [point_vm(d) for d in d_tab])

    electro = ElectrostaticEnv(v1_v=v1, v_rms_v=v_rms, vm=vm_profile)

    config = ExperimentConfig(
        model=model,
        thermal=thermal,
        sphere_radius_m=radius,
        resonator=resonator,
        noise=noise,
        electro=electro,
        z_setpoints_m=tuple(setpoints),
        z_offset_true_m=z_off_true,
        voltage_triplet_v=tuple(triplet),
        n_repeats=_get_int(sweep, "n_repeats", "sweep", default=10, minimum=1),
        position_jitter_rms_m=_get_number(sweep, "position_jitter_rms_m", "sweep",
                                          default=0.0, minimum=0.0),
        seed=_get_int(sweep, "seed", "sweep", default=0),
        rtol=_get_number(sweep, "rtol", "sweep", default=1e-10,
                         minimum=0.0, exclusive=True),
    )

    kelvin: KelvinScanSpec | None = None
    if "kelvin_scan" in doc:
        if patch_map is None:
            raise ConfigError(
                "'kelvin_scan' requires a patch-map potential "
                "('electrostatics.vm.kind' == 'patch_map')"
            )
        kel_doc = _expect_mapping(doc["kelvin_scan"], "kelvin_scan")
        _reject_unknown(kel_doc, {"z_m", "n_x", "n_y", "pitch_m"}, "kelvin_scan")
        kelvin = KelvinScanSpec(
            z_m=_get_number(kel_doc, "z_m", "kelvin_scan", minimum=0.0,
                            exclusive=True),
            n_x=_get_int(kel_doc, "n_x", "kelvin_scan", minimum=1),
            n_y=_get_int(kel_doc, "n_y", "kelvin_scan", minimum=1),
            pitch_m=_get_number(kel_doc, "pitch_m", "kelvin_scan", minimum=0.0,
                                exclusive=True),
        )
        xs, ys = kelvin.grid_axes(patch_map)
        ex, ey = patch_map.extent_m
        if xs[0] < 0 or ys[0] < 0 or xs[-1] > ex or ys[-1] > ey:
            raise ConfigError("'kelvin_scan' grid extends beyond the patch map")

    fit = _fit_options_from_doc(doc.get("fit"), thermal)
    return ExperimentBundle(config=config, patch_map=patch_map, kelvin=kelvin,
                            fit=fit)


def _fit_options_from_doc(value, thermal) -> FitOptions:
    if value is None:
        doc: dict = {}
    else:
        doc = _expect_mapping(value, "fit")
    _reject_unknown(doc, {"candidates", "sigma_override_hz", "rtol",
                          "include_n0_te"}, "fit")
    if "candidates" in doc:
        cand_doc = _expect_mapping(doc["candidates"], "fit.candidates")
        if not cand_doc:
            raise ConfigError("'fit.candidates' must name at least one model")
        candidates = {
            tag: material_from_doc(sub, f"fit.candidates.{tag}")
            for tag, sub in cand_doc.items()
        }
    else:
        candidates = {"drude": Drude.gold(), "plasma": Plasma.gold()}
    return FitOptions(
        candidates=candidates,
        sigma_override_hz=_get_number(doc, "sigma_override_hz", "fit",
                                      default=None, minimum=0.0, exclusive=True,
                                      allow_none=True),
        rtol=_get_number(doc, "rtol", "fit", default=1e-10, minimum=0.0,
                         exclusive=True),
        include_n0_te=_get_bool(doc, "include_n0_te", "fit", default=True),
    )


# --------------------------------------------------------------------------
# curve and Kelvin-map documents


@dataclass(frozen=True)
class CurveRequest:
    """Validated input of the model-curve command."""

    models: dict[str, PermittivityModel]
    thermal: ThermalState | None
    sphere_radius_m: float
    z_grid_m: np.ndarray
    rtol: float
    include_n0_te: bool


def build_curve_request(doc) -> CurveRequest:
    doc = _expect_mapping(doc, "")
    _reject_unknown(
        doc,
        {"models", "temperature_k", "geometry", "z_grid_m", "rtol",
         "include_n0_te"},
        "",
    )
    for key in ("models", "temperature_k", "geometry", "z_grid_m"):
        if key not in doc:
            raise _missing("", key)
    models_doc = _expect_mapping(doc["models"], "models")
    if not models_doc:
        raise ConfigError("'models' must name at least one model")
    models = {
        tag: material_from_doc(sub, f"models.{tag}")
        for tag, sub in models_doc.items()
    }
    geometry = _expect_mapping(doc["geometry"], "geometry")
    _reject_unknown(geometry, {"sphere_radius_m"}, "geometry")
    grid = _grid_from_doc(doc["z_grid_m"], "z_grid_m")
    grid = np.unique(np.sort(grid))
    return CurveRequest(
        models=models,
        thermal=_thermal_from_doc(doc, ""),
        sphere_radius_m=_get_number(geometry, "sphere_radius_m", "geometry",
                                    minimum=0.0, exclusive=True),
        z_grid_m=grid,
        rtol=_get_number(doc, "rtol", "", default=1e-10, minimum=0.0,
                         exclusive=True),
        include_n0_te=_get_bool(doc, "include_n0_te", "", default=True),
    )


@dataclass(frozen=True)
class KelvinRequest:
    """Validated input of the stand-alone Kelvin-map command."""

    patch_map: PatchMap
    sphere_radius_m: float
    scan: KelvinScanSpec


def build_kelvin_request(doc) -> KelvinRequest:
    doc = _expect_mapping(doc, "")
    _reject_unknown(doc, {"patch_map", "geometry", "scan"}, "")
    for key in ("patch_map", "geometry", "scan"):
        if key not in doc:
            raise _missing("", key)
    pm_doc = _expect_mapping(doc["patch_map"], "patch_map")
    patch_map = _patch_map_from_doc(pm_doc, "patch_map")
    geometry = _expect_mapping(doc["geometry"], "geometry")
    _reject_unknown(geometry, {"sphere_radius_m"}, "geometry")
    radius = _get_number(geometry, "sphere_radius_m", "geometry", minimum=0.0,
                         exclusive=True)
    scan_doc = _expect_mapping(doc["scan"], "scan")
    _reject_unknown(scan_doc, {"z_m", "n_x", "n_y", "pitch_m"}, "scan")
    scan = KelvinScanSpec(
        z_m=_get_number(scan_doc, "z_m", "scan", minimum=0.0, exclusive=True),
        n_x=_get_int(scan_doc, "n_x", "scan", minimum=1),
        n_y=_get_int(scan_doc, "n_y", "scan", minimum=1),
        pitch_m=_get_number(scan_doc, "pitch_m", "scan", minimum=0.0,
                            exclusive=True),
    )
    xs, ys = scan.grid_axes(patch_map)
    ex, ey = patch_map.extent_m
    if xs[0] < 0 or ys[0] < 0 or xs[-1] > ex or ys[-1] > ey:
        raise ConfigError("'scan' grid extends beyond the patch map")
    return KelvinRequest(patch_map=patch_map, sphere_radius_m=radius, scan=scan)


# --------------------------------------------------------------------------
# presets


def _realistic_base() -> dict:
    return {
        "temperature_k": 293.15,
        "geometry": {"sphere_radius_m": 4.0e-3},
        "resonator": {
            "f_m_hz": 1.0e5,
            "k_eff_n_per_m": 4000.0,
            "q_factor": 14000.0,
            "a_rms_m": 1.0e-8,
        },
        "noise": {"sigma_y_1s": 2.0e-9, "sample_interval_s": 0.4},
        "sweep": {
            "distances_m": {"start_m": 2.0e-6, "stop_m": 1.0e-7, "n_points": 35,
                            "spacing": "log"},
            "z_offset_true_m": 1.5e-7,
            "n_repeats": 10,
            "position_jitter_rms_m": 1.0e-9,
            "seed": 0,
        },
        "fit": {
            "candidates": {"drude": {"kind": "drude"}, "plasma": {"kind": "plasma"}},
        },
    }


def _preset_ideal() -> dict:
    return {
        "model": {"kind": "ideal"},
        "temperature_k": None,
        "geometry": {"sphere_radius_m": 4.0e-3},
        "resonator": {"f_m_hz": 1.0e5, "k_eff_n_per_m": 4000.0},
        "sweep": {
            "distances_m": {"start_m": 2.0e-6, "stop_m": 1.0e-7, "n_points": 35,
                            "spacing": "log"},
            "z_offset_true_m": 1.0e-7,
            "n_repeats": 2,
            "seed": 0,
        },
        "fit": {"candidates": {"ideal": {"kind": "ideal"}}},
    }


def _preset_sample_a() -> dict:
    doc = _realistic_base()
    doc["model"] = {"kind": "drude"}
    doc["electrostatics"] = {
        "v1_v": 0.03,
        "v_rms_v": 0.14,
        "vm": {
            "kind": "patch_map",
            "n_x": 256,
            "n_y": 256,
            "spacing_m": 2.0e-6,
            "correlation_length_m": 6.0e-5,
            "rms_v": 0.49,
            "mean_v": 0.0,
            "seed": 101,
        },
    }
    doc["kelvin_scan"] = {"z_m": 1.5e-7, "n_x": 24, "n_y": 24, "pitch_m": 8.0e-6}
    return doc


def _preset_sample_b() -> dict:
    doc = _realistic_base()
    doc["model"] = {"kind": "drude"}
    # 15 visits per direction keep the per-setpoint variance estimates tight
    # enough that the model-fit chi-squared stays within its expected band
    doc["sweep"]["n_repeats"] = 15
    doc["electrostatics"] = {
        "v1_v": 0.001,
        "v_rms_v": 0.0116,
        "vm": {
            "kind": "patch_map",
            "n_x": 256,
            "n_y": 256,
            "spacing_m": 2.0e-6,
            "correlation_length_m": 1.0e-5,
            "rms_v": 0.01,
            "mean_v": 0.0,
            "seed": 202,
        },
    }
    doc["kelvin_scan"] = {"z_m": 1.5e-7, "n_x": 24, "n_y": 24, "pitch_m": 8.0e-6}
    return doc


_PRESETS = {
    "ideal": _preset_ideal,
    "sample_a": _preset_sample_a,
    "sample_b": _preset_sample_b,
}


def preset_names() -> tuple[str, ...]:
    return tuple(sorted(_PRESETS))


def preset_document(name: str) -> dict:
    """The raw JSON-ready document of a named scenario.

    'ideal': perfect conductor at zero temperature, no noise, no
    electrostatic disorder; the cleanest round-trip sanity scenario.
    'sample_a': gold pair with strong patch disorder (potential spread of
    order 0.15 V) dominated by electrostatics at large distance.
    'sample_b': gold pair with weak patch disorder (residual spread
    11.6 mV), the Casimir-dominated discrimination scenario.
    """
    try:
        factory = _PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset '{name}'; choose one of {', '.join(preset_names())}"
        ) from None
    return factory()
