"""Sphere-plate electrostatics: bias forces, calibration curvature, residual
patch forces and surface-potential (patch) maps with the Kelvin-probe kernel.

Sign convention matches the force module: attractive forces and gradients are
negative.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .constants import epsilon_0
from .errors import BoundsError, DomainError

__all__ = [
    "ConstantVm",
    "ElectrostaticEnv",
    "PatchMap",
    "PatchVm",
    "TabulatedVm",
    "generate_patch_map",
    "kp_model",
    "residual_force",
    "residual_gradient",
    "sphere_plate_electrostatic_force",
    "vm_from_patches",
]


def sphere_plate_electrostatic_force(
    sphere_radius_m: float, z: float, delta_v: float, *, order: int = 0
) -> float:
    """Electrostatic sphere-plate force in the proximity limit z << R.

    order 0: F = -pi eps0 R (dV)^2 / z  [N]
    order 1: gradient -pi eps0 R (dV)^2 / z^2 [N/m] (attractive convention,
             the negative of the literal dF/dz).
    """
    if not sphere_radius_m > 0:
        raise DomainError("sphere radius must be > 0")
    if not z > 0:
        raise DomainError("separation z must be > 0")
    if order == 0:
        return -np.pi * epsilon_0 * sphere_radius_m * delta_v**2 / z
    if order == 1:
        return -np.pi * epsilon_0 * sphere_radius_m * delta_v**2 / z**2
    raise DomainError("electrostatic force order must be 0 or 1")


def kp_model(
    z: float,
    sphere_radius_m: float,
    f_m_hz: float,
    k_eff_n_per_m: float,
    z_offset_m: float,
):
    """Parabola curvature K_p(z) = eps0 pi R f_m^2 / (k_eff (z - z_off)^2).

    z is the raw position reading; z - z_off is the absolute distance and
    must be positive. Accepts array z. Units: Hz^2/V^2.
    """
    if not sphere_radius_m > 0:
        raise DomainError("sphere radius must be > 0")
    if not f_m_hz > 0 or not k_eff_n_per_m > 0:
        raise DomainError("resonator frequency and stiffness must be > 0")
    z_arr = np.asarray(z, dtype=float)
    d = z_arr - z_offset_m
    if np.any(d <= 0):
        raise DomainError("position must exceed the contact offset (z > z_off)")
    out = epsilon_0 * np.pi * sphere_radius_m * f_m_hz**2 / (k_eff_n_per_m * d * d)
    return float(out) if np.isscalar(z) or z_arr.ndim == 0 else out


# --------------------------------------------------------------------------
# minimizing-potential profiles


class ConstantVm:
    """z-independent minimizing potential."""

    def __init__(self, value_v: float):
        self.value_v = float(value_v)

    def __call__(self, z):
        z_arr = np.asarray(z, dtype=float)
        out = np.full_like(z_arr, self.value_v)
        return float(out) if np.isscalar(z) or z_arr.ndim == 0 else out

    def derivative(self, z):
        z_arr = np.asarray(z, dtype=float)
        out = np.zeros_like(z_arr)
        return float(out) if np.isscalar(z) or z_arr.ndim == 0 else out


class TabulatedVm:
    """Minimizing potential interpolated from (z, V_m) samples.

    Monotone-cubic interpolation; evaluation outside the sampled range is
    refused (no extrapolation).
    """

    def __init__(self, z_m, vm_v):
        z_arr = np.asarray(z_m, dtype=float)
        v_arr = np.asarray(vm_v, dtype=float)
        if z_arr.ndim != 1 or z_arr.size < 2 or z_arr.shape != v_arr.shape:
            raise DomainError("need matching 1-d arrays with >= 2 samples")
        if np.any(np.diff(z_arr) <= 0):
            raise DomainError("z samples must be strictly increasing")
        if not (np.all(np.isfinite(z_arr)) and np.all(np.isfinite(v_arr))):
            raise DomainError("samples must be finite")
        self.z_m = z_arr
        self.vm_v = v_arr
        self._pch = PchipInterpolator(z_arr, v_arr, extrapolate=False)
        self._dpch = self._pch.derivative()

    def _eval(self, fn, z):
        z_arr = np.asarray(z, dtype=float)
        lo, hi = self.z_m[0], self.z_m[-1]
        if np.any(z_arr < lo) or np.any(z_arr > hi):
            raise DomainError(
                f"z outside tabulated V_m range [{lo:.3e}, {hi:.3e}] m"
            )
        out = fn(z_arr)
        return float(out) if np.isscalar(z) or z_arr.ndim == 0 else out

    def __call__(self, z):
        return self._eval(self._pch, z)

    def derivative(self, z):
        return self._eval(self._dpch, z)


@dataclass(frozen=True)
class ElectrostaticEnv:
    """Residual-electrostatics environment of one sample.

    v1_v is the constant potential offset not captured by the minimizing
    potential; v_rms_v the rms of unresolved small-scale patches; vm the
    minimizing-potential profile V_m(z).
    """

    v1_v: float
    v_rms_v: float
    vm: ConstantVm | TabulatedVm | "PatchVm"

    def __post_init__(self):
        if self.v_rms_v < 0:
            raise DomainError("v_rms must be >= 0")


def residual_gradient(z, vm, dvm_dz, v1_v, v_rms_v, sphere_radius_m):
    """Gradient of the residual force given V_m and dV_m/dz at z.

    pi eps0 R [phi'/z - phi/z^2] with phi = (V_m + V1)^2 + V_rms^2 and
    phi' = 2 (V_m + V1) dV_m/dz. Broadcasts over arrays. Negative (attractive)
    whenever the phi'/z term does not dominate.
    """
    if not sphere_radius_m > 0:
        raise DomainError("sphere radius must be > 0")
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr <= 0):
        raise DomainError("separation z must be > 0")
    phi = (np.asarray(vm) + v1_v) ** 2 + v_rms_v**2
    dphi = 2.0 * (np.asarray(vm) + v1_v) * np.asarray(dvm_dz)
    out = np.pi * epsilon_0 * sphere_radius_m * (dphi / z_arr - phi / z_arr**2)
    return float(out) if np.isscalar(z) or z_arr.ndim == 0 else out


def residual_force(
    z: float,
    vm_profile,
    v1_v: float,
    v_rms_v: float,
    sphere_radius_m: float,
    *,
    order: int = 0,
) -> float:
    """Residual electrostatic force at nominally minimized bias.

    Force (order 0) is -pi eps0 R [(V_m(z)+V1)^2 + V_rms^2] / z, identical to
    sphere_plate_electrostatic_force with dV^2 = (V_m+V1)^2 + V_rms^2.
    order 1 returns the gradient in the attractive-negative convention,
        pi eps0 R [phi'(z)/z - phi(z)/z^2],   phi = (V_m+V1)^2 + V_rms^2,
    using the analytic derivative of the V_m profile.
    """
    if v_rms_v < 0:
        raise DomainError("v_rms must be >= 0")
    profile = ConstantVm(vm_profile) if isinstance(vm_profile, (int, float)) else vm_profile
    vm = profile(z)
    phi = (vm + v1_v) ** 2 + v_rms_v**2
    if order == 0:
        return sphere_plate_electrostatic_force(sphere_radius_m, z, np.sqrt(phi))
    if order == 1:
        return residual_gradient(
            z, vm, profile.derivative(z), v1_v, v_rms_v, sphere_radius_m
        )
    raise DomainError("residual force order must be 0 or 1")


# --------------------------------------------------------------------------
# patch maps


@dataclass(frozen=True)
class PatchMap:
    """Surface-potential map on a regular grid.

    values[i, j] is the potential [V] at (x, y) = (i, j) * spacing_m; the
    generation parameters ride along as metadata.
    """

    values: np.ndarray
    spacing_m: float
    correlation_length_m: float
    rms_v: float
    mean_v: float
    seed: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 2 or min(vals.shape) < 2:
            raise DomainError("patch map needs a 2-d grid of at least 2x2")
        if not np.all(np.isfinite(vals)):
            raise DomainError("patch map values must be finite")
        if not self.spacing_m > 0:
            raise DomainError("grid spacing must be > 0")

    @property
    def extent_m(self) -> tuple[float, float]:
        nx, ny = self.values.shape
        return ((nx - 1) * self.spacing_m, (ny - 1) * self.spacing_m)


def generate_patch_map(
    nx: int,
    ny: int,
    spacing_m: float,
    correlation_length_m: float,
    rms_v: float,
    mean_v: float = 0.0,
    seed: int = 0,
) -> PatchMap:
    """Gaussian random field with isotropic Gaussian correlation.

    Correlation function C(r) = rms^2 exp(-r^2 / l^2) with l the correlation
    length; synthesized spectrally (periodic), variance normalized so the
    ensemble pixel variance equals rms^2 exactly. Deterministic per seed.
    """
    if nx < 2 or ny < 2:
        raise DomainError("map must be at least 2x2")
    if spacing_m <= 0 or correlation_length_m <= 0:
        raise DomainError("spacing and correlation length must be > 0")
    if rms_v < 0:
        raise DomainError("rms amplitude must be >= 0")
    rng = np.random.default_rng(seed)
    white = rng.standard_normal((nx, ny))
    kx = 2.0 * np.pi * np.fft.fftfreq(nx, d=spacing_m)
    ky = 2.0 * np.pi * np.fft.fftfreq(ny, d=spacing_m)
    k2 = kx[:, None] ** 2 + ky[None, :] ** 2
    amp = np.exp(-k2 * correlation_length_m**2 / 8.0)
    raw = np.fft.ifft2(np.fft.fft2(white) * amp).real
    norm = np.sqrt(np.mean(amp**2))
    field = mean_v + raw * (rms_v / norm)
    return PatchMap(
        values=field,
        spacing_m=spacing_m,
        correlation_length_m=correlation_length_m,
        rms_v=rms_v,
        mean_v=mean_v,
        seed=seed,
    )


def _kelvin_weights(patch_map: PatchMap, sphere_xy_m, z: float, sphere_radius_m: float):
    if not z > 0:
        raise DomainError("separation z must be > 0")
    if not sphere_radius_m > 0:
        raise DomainError("sphere radius must be > 0")
    x0, y0 = float(sphere_xy_m[0]), float(sphere_xy_m[1])
    ex, ey = patch_map.extent_m
    if not (0.0 <= x0 <= ex and 0.0 <= y0 <= ey):
        raise BoundsError(
            f"sphere position ({x0:.3e}, {y0:.3e}) outside map extent "
            f"[0, {ex:.3e}] x [0, {ey:.3e}] m"
        )
    nx, ny = patch_map.values.shape
    xs = np.arange(nx) * patch_map.spacing_m
    ys = np.arange(ny) * patch_map.spacing_m
    r2 = (xs[:, None] - x0) ** 2 + (ys[None, :] - y0) ** 2
    return 1.0 / (z + r2 / (2.0 * sphere_radius_m))


def vm_from_patches(
    patch_map: PatchMap, sphere_xy_m, z: float, sphere_radius_m: float
) -> float:
    """Minimizing potential seen by the sphere above the patch map.

    Weighted mean of the map with the sphere-plate capacitance kernel
    w(r) = 1 / (z + r^2 / 2R), normalized to unit total weight over the map.
    Linear in the map values; tends to the plain map mean as z grows.
    """
    w = _kelvin_weights(patch_map, sphere_xy_m, z, sphere_radius_m)
    return float(np.sum(w * patch_map.values) / np.sum(w))


class PatchVm:
    """V_m(z) profile derived from a patch map at a fixed sphere position."""

    def __init__(self, patch_map: PatchMap, sphere_xy_m, sphere_radius_m: float):
        self.patch_map = patch_map
        self.sphere_xy_m = (float(sphere_xy_m[0]), float(sphere_xy_m[1]))
        self.sphere_radius_m = float(sphere_radius_m)

    def __call__(self, z: float) -> float:
        return vm_from_patches(
            self.patch_map, self.sphere_xy_m, float(z), self.sphere_radius_m
        )

    def derivative(self, z: float) -> float:
        # d/dz of sum(wV)/sum(w) with dw/dz = -w^2
        w = _kelvin_weights(
            self.patch_map, self.sphere_xy_m, float(z), self.sphere_radius_m
        )
        v = self.patch_map.values
        sw = np.sum(w)
        swv = np.sum(w * v)
        sw2 = np.sum(w * w)
        sw2v = np.sum(w * w * v)
        return float((swv * sw2 - sw2v * sw) / (sw * sw))
