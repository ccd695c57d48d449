"""Finite- and zero-temperature Lifshitz engine for plane-parallel metals.

Free energy per unit area between half-spaces separated by z:

    E(z, T) = (k_B T / 2 pi) sum'_n int_0^inf k dk
              sum_p ln(1 - r_p^2 exp(-2 kappa_n z))

with kappa_n = sqrt(k^2 + xi_n^2 / c^2), xi_n the Matsubara frequencies and
the primed sum giving the n = 0 term half weight. The pressure P = -dE/dz and
its first two z-derivatives are obtained by differentiating the integrand.
At T = 0 the frequency sum becomes (hbar / 2 pi k_B T) int dxi, evaluated
here as a scaled double quadrature.

Sign convention (repo-wide): attractive forces and gradients are negative.
The sphere-plate proximity-force mapping reports

    value = 2 pi R * E_pp     [N]
    d1    = 2 pi R * P_pp     [N/m]
    d3    = 2 pi R * P_pp''   [N/m^3]

so d1 is the negative of the literal dF/dz for an attractive force.
"""
from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from ..constants import c, hbar, k_B
from ..errors import DomainError, GeometryError, NumericalError
from ..materials import (
    Drude,
    PerfectConductor,
    Plasma,
    PermittivityModel,
    ThermalState,
    matsubara_xi,
)
from ._backend import xi_block_integrals
from ._quadrature import COARSE, FINE

DEFAULT_RTOL = 1e-10
MATSUBARA_CEILING = 100_000

PFA_WARN_RATIO = 1e-2
PFA_ERROR_RATIO = 0.1


class PfaAccuracyWarning(UserWarning):
    """Aspect ratio large enough that the proximity-force mapping degrades."""


# --------------------------------------------------------------------------
# reflection coefficients


def _model_tables(model: PermittivityModel, xi: np.ndarray):
    """Per-frequency kernel parameters (s, inv_eps, is_ideal).

    s = (eps - 1) xi^2 / c^2 so that kappa_m = sqrt(kappa^2 + s); inv_eps is
    1/eps. Both forms stay finite at xi = 0 and reproduce the analytic
    zero-frequency limits (Drude: s = 0 -> r_te = 0; any metal: inv_eps = 0
    -> r_tm = 1).
    """
    xi = np.asarray(xi, dtype=float)
    if isinstance(model, PerfectConductor):
        zeros = np.zeros_like(xi)
        return zeros, zeros, True
    if isinstance(model, Drude):
        s = model.omega_p**2 * xi / (c * c * (xi + model.gamma))
        poles = xi * (xi + model.gamma)
        inv_eps = poles / (poles + model.omega_p**2)
        return s, inv_eps, False
    if isinstance(model, Plasma):
        s = np.full_like(xi, (model.omega_p / c) ** 2)
        inv_eps = xi * xi / (xi * xi + model.omega_p**2)
        return s, inv_eps, False
    raise DomainError(f"unknown permittivity model: {model!r}")


def reflection_coeffs(model: PermittivityModel, xi: float, k):
    """Fresnel coefficients (r_te, r_tm) at imaginary frequency xi [rad/s].

    k is the transverse wavenumber [1/m], scalar or array, k > 0. The xi = 0
    values are the analytic limits: Drude (0, 1); Plasma
    ((k - sqrt(k^2 + omega_p^2/c^2)) / (k + sqrt(...)), 1); ideal (-1, 1).
    """
    if xi < 0:
        raise DomainError("xi must be >= 0")
    k_arr = np.asarray(k, dtype=float)
    scalar = np.isscalar(k) or k_arr.ndim == 0
    if np.any(k_arr <= 0):
        raise DomainError("transverse wavenumber k must be > 0")
    if isinstance(model, PerfectConductor):
        r_te = np.full_like(k_arr, -1.0)
        r_tm = np.ones_like(k_arr)
    else:
        s, inv_eps, _ = _model_tables(model, np.array([xi]))
        kap = np.sqrt(k_arr * k_arr + (xi / c) ** 2)
        kapm = np.sqrt(kap * kap + s[0])
        if s[0] == 0.0:
            r_te = np.zeros_like(k_arr)
        else:
            r_te = (kap - kapm) / (kap + kapm)
        r_tm = (kap - inv_eps[0] * kapm) / (kap + inv_eps[0] * kapm)
    if scalar:
        return float(r_te), float(r_tm)
    return r_te, r_tm


# --------------------------------------------------------------------------
# scaled integral drivers


def _compose_block(block: np.ndarray, n_start: int, include_n0_te: bool) -> np.ndarray:
    """Sum polarizations for a kernel block, applying the n = 0 rules."""
    terms = block[:, 0, :] + block[:, 1, :]
    if n_start == 0:
        first = block[0, 0, :] + block[0, 1, :] if include_n0_te else block[0, 1, :]
        terms[0] = 0.5 * first
    return terms


def _matsubara_orders(
    model: PermittivityModel,
    z: float,
    temperature_k: float,
    rtol: float,
    include_n0_te: bool,
) -> np.ndarray:
    """Primed Matsubara sums of the four kernel rows (scaled, z-independent
    prefactors applied by the caller)."""
    fine_n, fine_w = FINE
    coarse_n, coarse_w = COARSE
    totals = np.zeros(4)
    quad_err = np.zeros(4)
    n_start = 0
    block_size = 8
    converged = False
    last_rel = np.inf
    while n_start < MATSUBARA_CEILING:
        n_stop = min(n_start + block_size, MATSUBARA_CEILING)
        ns = np.arange(n_start, n_stop)
        xi = np.asarray(matsubara_xi(ns, temperature_k), dtype=float)
        u = np.ascontiguousarray(2.0 * xi * z / c)
        s, inv_eps, is_ideal = _model_tables(model, xi)
        s = np.ascontiguousarray(s)
        inv_eps = np.ascontiguousarray(inv_eps)
        blk_f = xi_block_integrals(z, u, s, inv_eps, is_ideal, fine_n, fine_w)
        blk_c = xi_block_integrals(z, u, s, inv_eps, is_ideal, coarse_n, coarse_w)
        terms_f = _compose_block(blk_f, n_start, include_n0_te)
        terms_c = _compose_block(blk_c, n_start, include_n0_te)
        totals += terms_f.sum(axis=0)
        quad_err += np.abs(terms_f - terms_c).sum(axis=0)
        scale = np.maximum(np.abs(totals), 1e-300)
        last_rel = float(np.max(np.abs(terms_f[-1]) / scale))
        if last_rel < rtol:
            converged = True
            break
        n_start = n_stop
        block_size = min(block_size * 2, 1024)
    if not converged:
        raise NumericalError(
            f"Matsubara sum did not reach rtol={rtol:g} within "
            f"{MATSUBARA_CEILING} terms (last relative term {last_rel:.3e})",
            achieved_residual=last_rel,
        )
    quad_rel = float(np.max(quad_err / np.maximum(np.abs(totals), 1e-300)))
    if quad_rel > rtol:
        raise NumericalError(
            f"transverse quadrature residual {quad_rel:.3e} exceeds rtol={rtol:g}",
            achieved_residual=quad_rel,
        )
    return totals


def _zero_t_orders(model: PermittivityModel, z: float, rtol: float) -> np.ndarray:
    """Scaled double integrals over (u, t) for the zero-temperature path."""
    fine_n, fine_w = FINE
    coarse_n, coarse_w = COARSE

    def evaluate(u_nodes, u_weights, t_nodes, t_weights):
        xi = c * u_nodes / (2.0 * z)
        s, inv_eps, is_ideal = _model_tables(model, xi)
        blk = xi_block_integrals(
            z,
            np.ascontiguousarray(u_nodes),
            np.ascontiguousarray(s),
            np.ascontiguousarray(inv_eps),
            is_ideal,
            t_nodes,
            t_weights,
        )
        inner = blk[:, 0, :] + blk[:, 1, :]
        return (inner * u_weights[:, None]).sum(axis=0)

    q_fine = evaluate(fine_n, fine_w, fine_n, fine_w)
    q_coarse = evaluate(coarse_n, coarse_w, coarse_n, coarse_w)
    rel = float(np.max(np.abs(q_fine - q_coarse) / np.maximum(np.abs(q_fine), 1e-300)))
    if rel > rtol:
        raise NumericalError(
            f"zero-temperature quadrature residual {rel:.3e} exceeds rtol={rtol:g}",
            achieved_residual=rel,
        )
    return q_fine


def _orders_si(
    model: PermittivityModel,
    z: float,
    thermal: ThermalState | None,
    rtol: float,
    include_n0_te: bool,
) -> np.ndarray:
    """(E, P, dP/dz, d2P/dz2) in SI units at separation z."""
    if not z > 0:
        raise DomainError("separation z must be > 0")
    if thermal is None:
        q = _zero_t_orders(model, z, rtol)
        pref = hbar * c / (32.0 * np.pi**2)
        return np.array(
            [
                pref * q[0] / z**3,
                -pref * q[1] / z**4,
                pref * q[2] / z**5,
                -pref * q[3] / z**6,
            ]
        )
    s = _matsubara_orders(model, z, thermal.temperature_k, rtol, include_n0_te)
    pref = k_B * thermal.temperature_k / (8.0 * np.pi)
    return np.array(
        [
            pref * s[0] / z**2,
            -pref * s[1] / z**3,
            pref * s[2] / z**4,
            -pref * s[3] / z**5,
        ]
    )


# --------------------------------------------------------------------------
# public plate-plate and sphere-plate operations


def plate_plate_energy(
    model: PermittivityModel,
    z: float,
    thermal: ThermalState | None,
    *,
    rtol: float = DEFAULT_RTOL,
    include_n0_te: bool = True,
) -> float:
    """Free energy per unit area [J/m^2] (negative, binding).

    thermal=None selects the zero-temperature integral path.
    """
    return float(_orders_si(model, z, thermal, rtol, include_n0_te)[0])


def plate_plate_pressure(
    model: PermittivityModel,
    z: float,
    thermal: ThermalState | None,
    *,
    order: int = 0,
    rtol: float = DEFAULT_RTOL,
    include_n0_te: bool = True,
) -> float:
    """Pressure between plates and its z-derivatives.

    order 0: P [Pa] (negative, attractive); order 1: dP/dz [Pa/m];
    order 2: d2P/dz2 [Pa/m^2].
    """
    if order not in (0, 1, 2):
        raise DomainError("pressure order must be 0, 1 or 2")
    return float(_orders_si(model, z, thermal, rtol, include_n0_te)[1 + order])


def _check_pfa(z: float, sphere_radius_m: float) -> None:
    if not sphere_radius_m > 0:
        raise DomainError("sphere radius must be > 0")
    if not z > 0:
        raise DomainError("separation z must be > 0")
    ratio = z / sphere_radius_m
    if ratio > PFA_ERROR_RATIO:
        raise GeometryError(
            f"z/R = {ratio:.3g} exceeds {PFA_ERROR_RATIO}; proximity-force "
            "mapping is not valid at this aspect ratio"
        )
    if ratio > PFA_WARN_RATIO:
        warnings.warn(
            f"z/R = {ratio:.3g} above {PFA_WARN_RATIO}; proximity-force "
            "corrections of order z/R are neglected",
            PfaAccuracyWarning,
            stacklevel=3,
        )


def sphere_plate_force(
    model: PermittivityModel,
    z: float,
    sphere_radius_m: float,
    thermal: ThermalState | None,
    *,
    order: int = 0,
    rtol: float = DEFAULT_RTOL,
    include_n0_te: bool = True,
) -> float:
    """Sphere-plate force via the proximity-force approximation.

    order 0: F = 2 pi R E_pp [N]; order 1: 2 pi R P_pp [N/m];
    order 3: 2 pi R P_pp'' [N/m^3]. All negative for Casimir attraction.
    """
    if order not in (0, 1, 3):
        raise DomainError("sphere-plate force order must be 0, 1 or 3")
    _check_pfa(z, sphere_radius_m)
    orders = _orders_si(model, z, thermal, rtol, include_n0_te)
    pick = {0: orders[0], 1: orders[1], 3: orders[3]}[order]
    return float(2.0 * np.pi * sphere_radius_m * pick)


def apparent_force_gradient(d1, d3, a_rms_m: float):
    """Vibration-corrected gradient d1 + (a_rms^2 / 6) d3.

    The resonator samples the force over its oscillation amplitude, so the
    measured gradient picks up the third-derivative term.
    """
    if a_rms_m < 0:
        raise DomainError("a_rms must be >= 0")
    return d1 + (a_rms_m**2 / 6.0) * d3


# --------------------------------------------------------------------------
# force curves


@dataclass(frozen=True)
class ForceCurve:
    """Sphere-plate Casimir curve on a z-grid (repo sign convention).

    Fields value/d1/d3 are orders 0/1/3 of sphere_plate_force. Strictly
    increasing z, all entries finite and negative.
    """

    z_m: np.ndarray
    value: np.ndarray
    d1: np.ndarray
    d3: np.ndarray
    model: PermittivityModel
    temperature_k: float | None
    sphere_radius_m: float

    def __post_init__(self):
        z = np.asarray(self.z_m, dtype=float)
        object.__setattr__(self, "z_m", z)
        for name in ("value", "d1", "d3"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if arr.shape != z.shape:
                raise DomainError(f"{name} shape {arr.shape} != z grid {z.shape}")
            if not np.all(np.isfinite(arr)):
                raise DomainError(f"{name} contains non-finite entries")
            if np.any(arr >= 0):
                raise DomainError(f"{name} must be negative (attractive convention)")
        if z.ndim != 1 or z.size < 1:
            raise DomainError("z grid must be a non-empty 1-d array")
        if np.any(z <= 0) or np.any(np.diff(z) <= 0):
            raise DomainError("z grid must be positive and strictly increasing")

    def interpolator(self, field: str):
        """Monotone-cubic interpolant of value/d1/d3 (log-log, sign restored).

        The returned callable accepts scalars or arrays inside the curve's z
        range and refuses extrapolation.
        """
        if field not in ("value", "d1", "d3"):
            raise DomainError("field must be one of value, d1, d3")
        arr = getattr(self, field)
        if self.z_m.size < 2:
            raise DomainError("need at least 2 grid points to interpolate")
        pch = PchipInterpolator(np.log(self.z_m), np.log(-arr), extrapolate=False)
        z_lo, z_hi = float(self.z_m[0]), float(self.z_m[-1])

        def evaluate(z):
            z_arr = np.asarray(z, dtype=float)
            if np.any(z_arr < z_lo) or np.any(z_arr > z_hi):
                raise DomainError(
                    f"requested z outside curve range [{z_lo:.3e}, {z_hi:.3e}] m"
                )
            out = -np.exp(pch(np.log(z_arr)))
            return float(out) if np.isscalar(z) or z_arr.ndim == 0 else out

        return evaluate


def _curve_threads(threads: int | None) -> int:
    if threads is None:
        raw = os.environ.get("CASIMIR_MEMBRANE_THREADS", "1").strip() or "1"
        try:
            threads = int(raw)
        except ValueError as exc:
            raise DomainError(f"CASIMIR_MEMBRANE_THREADS={raw!r} is not an integer") from exc
    return max(1, threads)


def casimir_force_curve(
    model: PermittivityModel,
    z_grid,
    sphere_radius_m: float,
    thermal: ThermalState | None,
    *,
    rtol: float = DEFAULT_RTOL,
    include_n0_te: bool = True,
    threads: int | None = None,
) -> ForceCurve:
    """Evaluate the sphere-plate curve (orders 0, 1, 3) on a z grid.

    Points are independent, so evaluation parallelizes over the grid; the
    thread count defaults to CASIMIR_MEMBRANE_THREADS (1 if unset). Results
    are ordered by grid position regardless of thread count.
    """
    z = np.asarray(z_grid, dtype=float)
    if z.ndim != 1 or z.size == 0:
        raise DomainError("z grid must be a non-empty 1-d array")
    if np.any(z <= 0) or np.any(np.diff(z) <= 0):
        raise DomainError("z grid must be positive and strictly increasing")
    _check_pfa(float(z[-1]), sphere_radius_m)

    def one(zi: float) -> np.ndarray:
        return _orders_si(model, zi, thermal, rtol, include_n0_te)

    n_threads = _curve_threads(threads)
    if n_threads > 1 and z.size > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            rows = list(pool.map(one, z))
    else:
        rows = [one(zi) for zi in z]
    orders = np.array(rows)
    factor = 2.0 * np.pi * sphere_radius_m
    temperature = None if thermal is None else thermal.temperature_k
    return ForceCurve(
        z_m=z,
        value=factor * orders[:, 0],
        d1=factor * orders[:, 1],
        d3=factor * orders[:, 3],
        model=model,
        temperature_k=temperature,
        sphere_radius_m=sphere_radius_m,
    )
