"""Analysis chain for voltage-sweep frequency data.

Stages: per-setpoint parabola extraction (f^2 vs V), electrostatic stiffness
calibration (K_p vs position), residual-potential fitting against candidate
force models, and frequency-stability statistics.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_triangular
from scipy.optimize import brentq
from scipy.special import digamma, gammaincc

from ._leastsq import levenberg_marquardt
from .constants import epsilon_0
from .electrostatics import TabulatedVm, residual_gradient
from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    FitError,
    InsufficientDataError,
    NumericalError,
)
from .lifshitz import ForceCurve, apparent_force_gradient
from .materials import PermittivityModel, ThermalState
from .resonator import ResonatorParams, distance_correction, freq_shift
from .simulator import SweepRecord, reference_curve

__all__ = [
    "AllanResult",
    "FitPipelineResult",
    "KpCalibration",
    "ModelFitReport",
    "ParabolaFitResult",
    "allan_deviation",
    "calibrate_kp",
    "chi2_probability_to_exceed",
    "compare_models",
    "fit_parabola",
    "fit_residual_potential",
    "run_fit_pipeline",
    "verdict_line",
]


# --------------------------------------------------------------------------
# parabola stage


@dataclass(frozen=True)
class ParabolaFitResult:
    """Least-squares parabola f^2 = c0 + c1 V + c2 V^2 in physical form.

    f0_hz is the vertex frequency, kp_hz2_per_v2 = -c2 the electrostatic
    curvature, vm_v the vertex voltage. cov is the 3x3 covariance of
    (f0, kp, vm), scaled by the residual variance. flags mark degenerate
    geometry; flagged results keep whatever quantities remain defined and
    set the rest to nan.
    """

    f0_hz: float
    kp_hz2_per_v2: float
    vm_v: float
    cov: np.ndarray
    n_points: int
    residual_rms_hz: float
    flags: tuple[str, ...]
    n_groups: int = 1

    @property
    def sigma_f0_hz(self) -> float:
        return math.sqrt(max(self.cov[0, 0], 0.0))

    @property
    def sigma_kp(self) -> float:
        return math.sqrt(max(self.cov[1, 1], 0.0))

    @property
    def sigma_vm_v(self) -> float:
        return math.sqrt(max(self.cov[2, 2], 0.0))


def fit_parabola(applied_v, measured_f_hz, groups=None) -> ParabolaFitResult:
    """Fit the bias parabola to pooled (V, f) samples of one setpoint.

    Needs at least three distinct voltages. The fit runs on f^2 with the
    voltage axis centered for conditioning; the covariance of the physical
    parameters follows from the polynomial covariance by error propagation
    and is scaled by the residual variance (dof = n - 3, zero when n == 3).

    groups optionally labels each sample with the visit it came from.
    Samples of one visit share the positioning error of that approach, so
    they scatter together; with groups given the covariance switches to a
    cluster-robust (per-visit sandwich) estimate that stays honest under
    that correlation. Central values are unaffected.
    """
    v = np.asarray(applied_v, dtype=float)
    f = np.asarray(measured_f_hz, dtype=float)
    if v.ndim != 1 or v.shape != f.shape:
        raise FitError("applied_v and measured_f_hz must be matching 1-d arrays")
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(f))):
        raise FitError("voltage sweep contains non-finite samples")
    if np.any(f <= 0):
        raise FitError("frequencies must be positive")
    if np.unique(v).size < 3:
        raise FitError(
            "rank-deficient sweep: need at least three distinct voltages "
            "for a parabola"
        )

    y = f * f
    v0 = float(np.mean(v))
    w = v - v0
    design = np.column_stack([np.ones_like(w), w, w * w])
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    b0, b1, b2 = (float(c) for c in coef)
    resid = y - design @ coef
    n = v.size
    ssr = float(resid @ resid)
    s2 = ssr / (n - 3) if n > 3 else 0.0
    xtx_inv = np.linalg.inv(design.T @ design)
    labels = None if groups is None else np.asarray(groups)
    if labels is not None and labels.shape != v.shape:
        raise FitError("groups must label every sample")
    if labels is not None and np.unique(labels).size > 1:
        meat = np.zeros((3, 3))
        for label in np.unique(labels):
            sel = labels == label
            xg = design[sel]
            rg = resid[sel]
            score = xg.T @ rg
            meat += np.outer(score, score)
        m = np.unique(labels).size
        scale = (m / (m - 1)) * ((n - 1) / (n - 3)) if n > 3 else m / (m - 1)
        cov_b = xtx_inv @ meat @ xtx_inv * scale
    else:
        cov_b = xtx_inv * s2

    flags: list[str] = []
    eps = np.finfo(float).eps
    y_scale = float(np.max(np.abs(y)))
    curv_span = abs(b2) * float(np.max(w * w))
    lin_span = abs(b1) * float(np.max(np.abs(w)))
    if curv_span <= 8.0 * eps * y_scale:
        # curvature indistinguishable from zero at float resolution
        flags.append("zero_curvature")
        kp = 0.0
        vm = math.nan
        f0 = math.sqrt(b0) if (lin_span <= 8.0 * eps * y_scale and b0 > 0) else math.nan
        jac = np.array([[1.0 / (2.0 * f0) if f0 > 0 else 0.0, 0.0, 0.0],
                        [0.0, 0.0, -1.0],
                        [0.0, 0.0, 0.0]])
    else:
        kp = -b2
        if kp < 0:
            flags.append("nonpositive_curvature")
        vm = v0 - b1 / (2.0 * b2)
        f0_sq = b0 - b1 * b1 / (4.0 * b2)
        if f0_sq <= 0:
            flags.append("imaginary_vertex")
            f0 = math.nan
            df0 = (0.0, 0.0, 0.0)
        else:
            f0 = math.sqrt(f0_sq)
            df0 = (
                1.0 / (2.0 * f0),
                -b1 / (4.0 * b2 * f0),
                b1 * b1 / (8.0 * b2 * b2 * f0),
            )
        jac = np.array([
            df0,
            (0.0, 0.0, -1.0),
            (0.0, -1.0 / (2.0 * b2), b1 / (2.0 * b2 * b2)),
        ])
    cov = jac @ cov_b @ jac.T
    y_fit = design @ coef
    if np.all(y_fit > 0):
        resid_f = f - np.sqrt(y_fit)
        residual_rms_hz = math.sqrt(float(resid_f @ resid_f) / n)
    else:
        residual_rms_hz = math.nan
    return ParabolaFitResult(
        f0_hz=f0,
        kp_hz2_per_v2=kp,
        vm_v=vm,
        cov=cov,
        n_points=n,
        residual_rms_hz=residual_rms_hz,
        flags=tuple(flags),
        n_groups=int(np.unique(labels).size) if labels is not None else 1,
    )


# --------------------------------------------------------------------------
# stiffness calibration


@dataclass(frozen=True)
class KpCalibration:
    """Calibrated stiffness and contact offset from K_p(z) samples.

    chi2_red is the reduced chi-squared of the fractional-residual fit
    (dof = n - 2); residual_rms the rms fractional misfit. cov is the 2x2
    covariance of (k_eff, z_offset), which downstream fits propagate into
    their frequency model as a coherent error.
    """

    k_eff_n_per_m: float
    z_offset_m: float
    sigma_k_eff: float
    sigma_z_offset: float
    n_points: int
    n_iter: int
    residual_rms: float
    chi2_red: float
    cov: np.ndarray = field(
        default_factory=lambda: np.full((2, 2), math.nan)
    )


def calibrate_kp(
    z_positions_m,
    kp_values,
    sphere_radius_m: float,
    f_m_hz: float,
) -> KpCalibration:
    """Fit K_p(z) = eps0 pi R f_m^2 / (k_eff (z - z_off)^2) for k_eff, z_off.

    Minimizes fractional residuals model/K_p - 1, which weights every
    setpoint comparably since the sweep design keeps the fractional K_p
    uncertainty roughly uniform. Initialized from the straight line
    1/sqrt(K_p) vs z. Warns if the fitted contact offset is not below the
    scanned range.
    """
    z = np.asarray(z_positions_m, dtype=float)
    kp = np.asarray(kp_values, dtype=float)
    if z.ndim != 1 or z.shape != kp.shape:
        raise FitError("positions and curvatures must be matching 1-d arrays")
    if np.unique(z).size < 3:
        raise FitError("need at least three distinct positions to calibrate")
    if not np.all(np.isfinite(z)) or not np.all(np.isfinite(kp)):
        raise FitError("calibration samples must be finite")
    if np.any(kp <= 0):
        raise FitError("curvature samples must be positive")
    if not sphere_radius_m > 0 or not f_m_hz > 0:
        raise DomainError("sphere radius and mode frequency must be > 0")

    coeff = epsilon_0 * np.pi * sphere_radius_m * f_m_hz**2
    slope, intercept = np.polyfit(z, 1.0 / np.sqrt(kp), 1)
    if slope <= 0:
        raise FitError("curvature does not fall off with distance; cannot calibrate")
    p0 = np.array([slope * slope * coeff, -intercept / slope])

    def model(p):
        k_eff, z_off = p
        d = z - z_off
        if k_eff <= 0 or np.any(d <= 0):
            raise DomainError("trial parameters leave the physical region")
        return coeff / (k_eff * d * d)

    def resid(p):
        return model(p) / kp - 1.0

    def jac(p):
        k_eff, z_off = p
        m = model(p)
        return np.column_stack([-m / (k_eff * kp), 2.0 * m / ((z - z_off) * kp)])

    z_span = float(np.max(z) - np.min(z)) or float(np.max(np.abs(z)))
    p, info = levenberg_marquardt(
        resid, jac, p0, x_scale=np.array([abs(p0[0]) + 1e-9, z_span])
    )
    r = resid(p)
    n = z.size
    dof = n - 2
    s2 = float(r @ r) / dof if dof > 0 else 0.0
    jtj = jac(p)
    cov = np.linalg.inv(jtj.T @ jtj) * s2
    k_eff, z_off = float(p[0]), float(p[1])
    # the model veto keeps z_off strictly below min(z) at convergence, so the
    # useful diagnostic is the margin: a vertex crowding the closest setpoint
    # means the inverse-square divergence is being pinned by a single point
    if float(np.min(z)) - z_off < 5e-3 * z_span:
        warnings.warn(
            "fitted contact offset sits within 0.5% of the scan span below "
            "the closest setpoint; calibration is pinned by the innermost "
            "points",
            stacklevel=2,
        )
    return KpCalibration(
        k_eff_n_per_m=k_eff,
        z_offset_m=z_off,
        sigma_k_eff=math.sqrt(max(cov[0, 0], 0.0)),
        sigma_z_offset=math.sqrt(max(cov[1, 1], 0.0)),
        n_points=n,
        n_iter=info["n_iter"],
        residual_rms=math.sqrt(float(r @ r) / n),
        chi2_red=s2,
        cov=cov,
    )


# --------------------------------------------------------------------------
# frequency stability


@dataclass(frozen=True)
class AllanResult:
    """Two-sample (Allan) deviation of fractional frequency vs averaging time."""

    tau_s: np.ndarray
    sigma_y: np.ndarray
    n_samples: int
    sample_interval_s: float
    mean_f_hz: float


def allan_deviation(series_hz, sample_interval_s: float, taus_s=None) -> AllanResult:
    """Non-overlapping Allan deviation of a frequency series.

    Fractional frequency is taken against the series mean. Averaging times
    must be integer multiples of the sample interval; each requires at least
    two contiguous blocks, otherwise InsufficientDataError reports the
    largest usable tau. Default taus double from the sample interval up.
    """
    f = np.asarray(series_hz, dtype=float)
    if f.ndim != 1:
        raise DomainError("series must be 1-d")
    if not np.all(np.isfinite(f)):
        raise DomainError("series contains non-finite samples")
    if not sample_interval_s > 0:
        raise DomainError("sample interval must be > 0")
    n = f.size
    if n < 2:
        raise InsufficientDataError("need at least two samples")
    f_mean = float(np.mean(f))
    if f_mean <= 0:
        raise DomainError("series mean must be positive for fractional frequency")

    max_m = n // 2
    if taus_s is None:
        ms = []
        m = 1
        while m <= max_m:
            ms.append(m)
            m *= 2
    else:
        taus_arr = np.atleast_1d(np.asarray(taus_s, dtype=float))
        ms = []
        for tau in taus_arr:
            m = int(round(tau / sample_interval_s))
            if m < 1 or abs(m * sample_interval_s - tau) > 1e-9 * sample_interval_s:
                raise DomainError(
                    f"tau {tau:g} s is not a positive integer multiple of the "
                    f"sample interval {sample_interval_s:g} s"
                )
            if m > max_m:
                raise InsufficientDataError(
                    f"tau {tau:g} s needs {2 * m} samples but only {n} are "
                    f"available; maximum usable tau is {max_m * sample_interval_s:g} s"
                )
            ms.append(m)

    taus_out = np.array([m * sample_interval_s for m in ms])
    sigma = np.empty(len(ms))
    y = f / f_mean
    for i, m in enumerate(ms):
        nb = n // m
        blocks = y[: nb * m].reshape(nb, m).mean(axis=1)
        d = np.diff(blocks)
        sigma[i] = math.sqrt(0.5 * float(np.mean(d * d)))
    return AllanResult(
        tau_s=taus_out,
        sigma_y=sigma,
        n_samples=n,
        sample_interval_s=sample_interval_s,
        mean_f_hz=f_mean,
    )


def chi2_probability_to_exceed(chi2: float, dof: int) -> float:
    """Upper-tail probability of a chi-squared variable with dof degrees."""
    if not chi2 >= 0 or not np.isfinite(chi2):
        raise DomainError("chi2 must be finite and >= 0")
    if dof <= 0:
        raise DomainError("dof must be positive")
    return float(gammaincc(dof / 2.0, chi2 / 2.0))


# --------------------------------------------------------------------------
# residual-potential fit


@dataclass(frozen=True)
class ModelFitReport:
    """Residual-potential fit of one candidate force model.

    v_rms_v reports sqrt of the fitted variance parameter; when that
    parameter runs negative it is clamped to zero, the fit repeated for V1
    alone and at_boundary set. chi2 is weighted when sigma values were
    available (weighted=True), otherwise a plain sum of squared Hz residuals.
    dof = n_points - 2 throughout.
    """

    model_tag: str
    v1_v: float
    v_rms_v: float
    sigma_v1_v: float
    sigma_v_rms_v: float
    chi2: float
    dof: int
    chi2_reduced: float
    pte: float
    at_boundary: bool
    weighted: bool
    n_points: int
    n_iter: int
    f_model_hz: np.ndarray
    flags: tuple[str, ...] = ()


def _profile_half_width(
    chi2_of, x_hat, target, step0, lo_bound=None, n_expand=60
):
    """Half-width of the chi2 <= target interval around a profile minimum.

    Walks outward from x_hat with geometrically growing steps until the
    profile crosses target (then refines the crossing with brentq), on both
    sides. lo_bound clips the downward walk (a parameter bounded below). If a
    side never crosses within n_expand steps the interval is open: returns
    (inf, True).
    """
    step0 = max(step0, 1e-12 * max(abs(x_hat), 1e-30))

    def crossing(direction):
        prev = x_hat
        step = step0
        for _ in range(n_expand):
            x = x_hat + direction * step
            clipped = lo_bound is not None and x <= lo_bound
            if clipped:
                x = lo_bound
            if chi2_of(x) >= target:
                return brentq(lambda t: chi2_of(t) - target, *sorted((prev, x)))
            if clipped:
                return x
            prev = x
            step *= 1.7
        return None

    hi = crossing(+1.0)
    lo = crossing(-1.0)
    if hi is None or lo is None:
        return math.inf, True
    return 0.5 * (hi - lo), False


def fit_residual_potential(
    distance_m,
    f0_hz,
    *,
    vm_profile,
    resonator: ResonatorParams,
    sphere_radius_m: float,
    casimir_curve: ForceCurve,
    sigma_f0_hz=None,
    cov_f0_hz2=None,
    model_tag: str | None = None,
) -> ModelFitReport:
    """Fit (V1, V_rms) of the residual electrostatic force to vertex data.

    The model composes the candidate Casimir gradient (vibration-corrected,
    interpolated from casimir_curve), the residual electrostatic gradient
    built on the measured V_m profile, and the gradient-to-frequency
    transduction:

        f0(z) = f_m + df_casimir(z) + df_residual(z; V1, V_rms^2).

    The variance parameter s = V_rms^2 is fitted unconstrained; a negative
    optimum is clamped to the physical boundary s = 0 and refitted. With
    sigma_f0_hz given the residuals are sigma-weighted and chi2 follows the
    usual statistic; without, chi2 is the raw sum of squares in Hz^2.
    cov_f0_hz2 optionally adds a coherent (full-matrix) covariance on top of
    the diagonal sigma^2, e.g. calibration errors shared by all setpoints;
    the residuals are then whitened with the Cholesky factor of the total.
    """
    z = np.asarray(distance_m, dtype=float)
    f0 = np.asarray(f0_hz, dtype=float)
    if z.ndim != 1 or z.shape != f0.shape:
        raise FitError("distance and frequency arrays must match")
    if z.size < 3:
        raise FitError("need at least three setpoints (dof = n - 2 >= 1)")
    if np.any(z <= 0) or not np.all(np.isfinite(z)) or not np.all(np.isfinite(f0)):
        raise FitError("distances must be positive and data finite")
    weighted = sigma_f0_hz is not None
    if weighted:
        sig = np.asarray(sigma_f0_hz, dtype=float)
        if sig.shape != z.shape or np.any(sig <= 0) or not np.all(np.isfinite(sig)):
            raise FitError("sigma values must be positive, finite and match the data")
    else:
        sig = np.ones_like(z)

    if cov_f0_hz2 is not None:
        if not weighted:
            raise FitError("coherent covariance needs per-point sigma values")
        cmat = np.asarray(cov_f0_hz2, dtype=float)
        if cmat.shape != (z.size, z.size) or not np.all(np.isfinite(cmat)):
            raise FitError("coherent covariance must be a finite n x n matrix")
        try:
            lmat = np.linalg.cholesky(cmat + np.diag(sig * sig))
        except np.linalg.LinAlgError as exc:
            raise FitError("total covariance is not positive definite") from exc

        def whiten(vec):
            return solve_triangular(lmat, vec, lower=True)

    else:

        def whiten(vec):
            return vec / sig

    res = resonator
    d1 = casimir_curve.interpolator("d1")(z)
    d3 = casimir_curve.interpolator("d3")(z)
    df_cas = freq_shift(res, apparent_force_gradient(d1, d3, res.a_rms_m))
    vm = np.asarray(vm_profile(z), dtype=float)
    dvm = np.asarray(vm_profile.derivative(z), dtype=float)
    if vm.shape != z.shape:
        vm = np.array([float(vm_profile(zi)) for zi in z])
        dvm = np.array([float(vm_profile.derivative(zi)) for zi in z])
    base = f0 - (res.f_m_hz + df_cas)
    gain = -res.f_m_hz / (2.0 * res.k_eff_n_per_m)
    coeff = np.pi * epsilon_0 * sphere_radius_m

    def f_res_model(v1: float, s: float) -> np.ndarray:
        phi = (vm + v1) ** 2 + s
        dphi = 2.0 * (vm + v1) * dvm
        return gain * (coeff * (dphi / z - phi / (z * z)))

    def resid2(p):
        return whiten(base - f_res_model(p[0], p[1]))

    def jac2(p):
        v1 = p[0]
        d_dv1 = gain * coeff * (2.0 * dvm / z - 2.0 * (vm + v1) / (z * z))
        d_ds = gain * coeff * (-1.0 / (z * z))
        return np.column_stack([whiten(-d_dv1), whiten(-d_ds)])

    v1_scale, s_scale = 1e-3, 1e-6
    flags: list[str] = []
    jac0 = jac2(np.zeros(2))
    # V1 enters only through (V_m + V1)^2, so with a vanishing measured V_m
    # profile the data constrain V1^2 + s but not V1 itself; pin V1 = 0 and
    # fit the combination through s
    v1_pinned = (
        float(np.linalg.norm(jac0[:, 0])) * v1_scale
        < 1e-6 * float(np.linalg.norm(jac0[:, 1])) * s_scale
    )

    if v1_pinned:
        flags.append("v1_unidentifiable")

        def resid_s(ps):
            return whiten(base - f_res_model(0.0, ps[0]))

        def jac_s(ps):
            return jac2(np.array([0.0, ps[0]]))[:, 1:]

        ps, info = levenberg_marquardt(
            resid_s, jac_s, np.zeros(1), x_scale=np.array([s_scale])
        )
        v1_hat, s_hat = 0.0, float(ps[0])
    else:
        p, info = levenberg_marquardt(
            resid2, jac2, np.zeros(2), x_scale=np.array([v1_scale, s_scale])
        )
        v1_hat, s_hat = float(p[0]), float(p[1])

    at_boundary = s_hat < 0.0
    if at_boundary:
        s_hat = 0.0
        if v1_pinned:
            v1_hat = 0.0
            r = resid2(np.zeros(2))
            jt = np.zeros((z.size, 0))
        else:
            def resid1(p1):
                return whiten(base - f_res_model(p1[0], 0.0))

            def jac1(p1):
                return jac2(np.array([p1[0], 0.0]))[:, :1]

            p1, info = levenberg_marquardt(
                resid1, jac1, np.array([v1_hat]), x_scale=np.array([v1_scale])
            )
            v1_hat = float(p1[0])
            r = resid1(p1)
            jt = jac1(p1)
    elif v1_pinned:
        r = resid_s(np.array([s_hat]))
        jt = jac_s(np.array([s_hat]))
    else:
        r = resid2(p)
        jt = jac2(p)

    n = z.size
    dof = n - 2
    chi2 = float(r @ r)
    if jt.shape[1] > 0:
        cov = np.linalg.pinv(jt.T @ jt)
        if not weighted:
            cov = cov * (chi2 / dof if dof > 0 else 0.0)
    else:
        cov = np.zeros((1, 1))

    if at_boundary:
        v_rms, sigma_v_rms = 0.0, math.nan
        sigma_v1 = math.nan if v1_pinned else math.sqrt(max(cov[0, 0], 0.0))
    elif v1_pinned:
        v_rms = math.sqrt(s_hat) if s_hat > 0 else 0.0
        sigma_v1 = math.nan
        sigma_s = math.sqrt(max(cov[0, 0], 0.0))
        sigma_v_rms = sigma_s / (2.0 * v_rms) if v_rms > 0 else math.nan
    else:
        v_rms = math.sqrt(s_hat) if s_hat > 0 else 0.0
        sigma_v1 = math.sqrt(max(cov[0, 0], 0.0))
        sigma_s = math.sqrt(max(cov[1, 1], 0.0))
        sigma_v_rms = sigma_s / (2.0 * v_rms) if v_rms > 0 else math.nan

        # The (V1, s) valley is curved: s trades against (mean V_m + V1)^2,
        # so the quadratic expansion at the optimum misstates both errors
        # (badly so near V1 = -mean V_m, where the local slope ds/dV1
        # vanishes). Report delta-chi2 = 1 profile half-widths instead.
        target = chi2 + (1.0 if weighted else chi2 / dof)
        t_vec = whiten(gain * coeff * (-1.0 / (z * z)))
        tt = float(t_vec @ t_vec)

        def chi2_given_v1(v1: float) -> float:
            u = whiten(base - f_res_model(v1, 0.0))
            ut = float(u @ t_vec)
            return float(u @ u) - ut * ut / tt

        warm = {"v1": v1_hat}

        def chi2_given_vrms(vr: float) -> float:
            s_fix = vr * vr

            def resid1(p1):
                return whiten(base - f_res_model(p1[0], s_fix))

            def jac1(p1):
                return jac2(np.array([p1[0], s_fix]))[:, :1]

            try:
                p1, _ = levenberg_marquardt(
                    resid1, jac1, np.array([warm["v1"]]), x_scale=np.array([v1_scale])
                )
            except ConvergenceError:
                return math.inf
            warm["v1"] = float(p1[0])
            rr = resid1(p1)
            return float(rr @ rr)

        half_v1, open_v1 = _profile_half_width(
            chi2_given_v1, v1_hat, target, max(sigma_v1, 0.1 * v1_scale)
        )
        warm["v1"] = v1_hat
        half_vr, open_vr = _profile_half_width(
            chi2_given_vrms,
            v_rms,
            target,
            max(sigma_v_rms if math.isfinite(sigma_v_rms) else 0.0, 0.1 * v1_scale),
            lo_bound=0.0,
        )
        sigma_v1 = half_v1
        sigma_v_rms = half_vr
        if open_v1:
            flags.append("v1_interval_open")
        if open_vr:
            flags.append("v_rms_interval_open")

    f_model = res.f_m_hz + df_cas + f_res_model(v1_hat, s_hat)
    tag = model_tag if model_tag is not None else casimir_curve.model.kind
    return ModelFitReport(
        model_tag=tag,
        v1_v=v1_hat,
        v_rms_v=v_rms,
        sigma_v1_v=sigma_v1,
        sigma_v_rms_v=sigma_v_rms,
        chi2=chi2,
        dof=dof,
        chi2_reduced=chi2 / dof if dof > 0 else math.inf,
        pte=chi2_probability_to_exceed(chi2, dof),
        at_boundary=at_boundary,
        weighted=weighted,
        n_points=n,
        n_iter=info["n_iter"],
        f_model_hz=f_model,
        flags=tuple(flags),
    )


def compare_models(
    distance_m,
    f0_hz,
    *,
    vm_profile,
    resonator: ResonatorParams,
    sphere_radius_m: float,
    candidates,
    sigma_f0_hz=None,
    cov_f0_hz2=None,
    thermal: ThermalState | None = None,
    rtol: float = 1e-10,
    include_n0_te: bool = True,
) -> list[ModelFitReport]:
    """Fit every candidate force model to the same data and rank the results.

    candidates maps tag -> ForceCurve (used as given) or tag ->
    PermittivityModel (a reference curve is computed over the data range at
    the given thermal state). Needs at least two candidates. A candidate
    whose fit fails is dropped from the ranking with a warning, but at
    least one must survive. Ranking is by probability to exceed, highest
    first; exact PTE ties (several saturated at 1) fall back to smaller
    chi2, and fully equal keys keep the candidate input order.
    """
    cands = dict(candidates)
    if len(cands) < 2:
        raise FitError("model comparison needs at least two candidates")
    z = np.asarray(distance_m, dtype=float)
    reports: list[ModelFitReport] = []
    for tag, cand in cands.items():
        try:
            if isinstance(cand, ForceCurve):
                curve = cand
            else:
                curve = reference_curve(
                    cand,
                    thermal,
                    sphere_radius_m,
                    float(np.min(z)),
                    float(np.max(z)),
                    rtol=rtol,
                    include_n0_te=include_n0_te,
                )
            reports.append(
                fit_residual_potential(
                    z,
                    f0_hz,
                    vm_profile=vm_profile,
                    resonator=resonator,
                    sphere_radius_m=sphere_radius_m,
                    casimir_curve=curve,
                    sigma_f0_hz=sigma_f0_hz,
                    cov_f0_hz2=cov_f0_hz2,
                    model_tag=tag,
                )
            )
        except (FitError, DomainError, NumericalError) as exc:
            warnings.warn(
                f"candidate {tag!r} dropped from the comparison: {exc}",
                stacklevel=2,
            )
    if not reports:
        raise FitError("every candidate model failed to fit")
    return sorted(reports, key=lambda rep: (-rep.pte, rep.chi2))


def verdict_line(ranked) -> str:
    """One-line comparison verdict from ranked reports."""
    ranked = list(ranked)
    if not ranked:
        raise FitError("no model reports to compare")
    best = ranked[0]
    parts = [f"preferred model: {best.model_tag} (PTE {best.pte:.4g})"]
    for rep in ranked[1:]:
        confidence = 100.0 * (1.0 - rep.pte)
        parts.append(
            f"{rep.model_tag} disfavored (PTE {rep.pte:.4g}, "
            f"rejected at {confidence:.2f}% confidence)"
        )
    return "; ".join(parts)


# --------------------------------------------------------------------------
# end-to-end pipeline


@dataclass(frozen=True)
class FitPipelineResult:
    """Everything the sweep analysis produces, in processing order.

    setpoints_m lists the distinct setpoints in approach order with their
    pooled parabola results (flagged setpoints are excluded from later
    stages and listed in excluded_setpoints_m). distance_m holds the
    motion-corrected absolute distances (ascending) entering the model fits.
    """

    setpoints_m: np.ndarray
    parabolas: tuple[ParabolaFitResult, ...]
    calibration: KpCalibration
    distance_m: np.ndarray
    f0_hz: np.ndarray
    sigma_f0_hz: np.ndarray | None
    vm_v: np.ndarray
    reports: tuple[ModelFitReport, ...]
    verdict: str
    excluded_setpoints_m: tuple[float, ...]


def _pool_sigma_model(distance_m, f0_hz, sigma_raw, k_dof):
    """Pool per-setpoint sigma estimates through a two-parameter noise model.

    A sigma estimated from m visit clusters carries chi2_{m-1} sampling
    noise; dividing squared residuals by such estimates inflates and widens
    the chi-squared statistic downstream. Physically the vertex-frequency
    variance is a white floor plus stage z-jitter leaking through the local
    slope, so var = a + b (df0/dz)^2 holds across setpoints and pooling the
    few dozen variance samples into (a, b) removes most of the sampling
    noise. The fit runs in log space, where that noise is homoscedastic,
    after subtracting the known E[log(chi2_k / k)] bias per point. Returns
    the raw sigmas unchanged if the model cannot be fitted.
    """
    g = np.gradient(f0_hz, distance_m) ** 2
    k = np.maximum(np.asarray(k_dof, dtype=float), 1.0)
    y = np.log(sigma_raw**2) - (digamma(k / 2.0) - np.log(k / 2.0))
    order = np.argsort(g)
    third = max(g.size // 3, 2)
    a0 = float(np.exp(np.mean(y[order[:third]])))
    hi_mean = float(np.exp(np.mean(y[order[-third:]])))
    g_hi = float(np.mean(g[order[-third:]]))
    if not (a0 > 0 and g_hi > 0 and np.all(np.isfinite(y))):
        return sigma_raw
    b0 = max(hi_mean - a0, 0.01 * a0) / g_hi

    def resid(p):
        w = np.exp(p[0]) + np.exp(p[1]) * g
        return y - np.log(w)

    def jac(p):
        a, b = np.exp(p[0]), np.exp(p[1])
        w = a + b * g
        return np.column_stack([-a / w, -b * g / w])

    try:
        p, _ = levenberg_marquardt(
            resid, jac, np.log([a0, b0]), x_scale=np.ones(2)
        )
    except (ConvergenceError, DomainError):
        return sigma_raw
    return np.sqrt(np.exp(p[0]) + np.exp(p[1]) * g)


def run_fit_pipeline(
    records,
    *,
    resonator: ResonatorParams,
    sphere_radius_m: float,
    thermal: ThermalState | None,
    candidates,
    sigma_override_hz: float | None = None,
    rtol: float = 1e-10,
    include_n0_te: bool = True,
) -> FitPipelineResult:
    """Full analysis of sweep records against candidate force models.

    candidates maps tag -> PermittivityModel (a reference curve is computed
    over the data range) or tag -> ForceCurve (used as given). The resonator
    argument supplies f_m, drive amplitude and Q; its stiffness is replaced
    by the calibrated value for all transduction steps. Per-point sigma for
    the model fits comes from the pooled-parabola covariance, unless
    sigma_override_hz forces a uniform value.
    """
    records = list(records)
    if not records:
        raise InsufficientDataError("no sweep records")
    by_setpoint: dict[float, list[SweepRecord]] = {}
    order: list[float] = []
    for rec in records:
        if rec.z_setpoint_m not in by_setpoint:
            by_setpoint[rec.z_setpoint_m] = []
            order.append(rec.z_setpoint_m)
        by_setpoint[rec.z_setpoint_m].append(rec)
    order.sort(reverse=True)  # approach order

    parabolas = []
    excluded = []
    for z_set in order:
        group = by_setpoint[z_set]
        par = fit_parabola(
            [g.applied_v for g in group],
            [g.measured_f_hz for g in group],
            groups=[f"{g.run_id}:{g.direction}" for g in group],
        )
        parabolas.append(par)
        if par.flags:
            excluded.append(z_set)
            warnings.warn(
                f"setpoint {z_set:.4e} m excluded from calibration/fit "
                f"(flags: {', '.join(par.flags)})",
                stacklevel=2,
            )
    keep = [i for i, par in enumerate(parabolas) if not par.flags]
    if len(keep) < 3:
        raise FitError("fewer than three usable setpoints after flag screening")
    z_clean = np.array([order[i] for i in keep])
    kp_clean = np.array([parabolas[i].kp_hz2_per_v2 for i in keep])
    f0_clean = np.array([parabolas[i].f0_hz for i in keep])
    vm_clean = np.array([parabolas[i].vm_v for i in keep])

    cal = calibrate_kp(z_clean, kp_clean, sphere_radius_m, resonator.f_m_hz)
    d_el = z_clean - cal.z_offset_m
    if np.any(d_el <= 0):
        raise FitError("calibrated contact offset places setpoints at contact")
    d_phys = distance_correction(d_el, resonator.a_rms_m)

    asc = np.argsort(d_phys)
    d_sorted = d_phys[asc]
    f0_sorted = f0_clean[asc]
    vm_sorted = vm_clean[asc]
    if sigma_override_hz is not None:
        if not sigma_override_hz > 0:
            raise ConfigError("sigma override must be positive")
        sig_sorted = np.full_like(d_sorted, float(sigma_override_hz))
        use_sigma = True
    else:
        sig_sorted = np.array([parabolas[i].sigma_f0_hz for i in keep])[asc]
        use_sigma = bool(np.all(sig_sorted > 0))
        if use_sigma and sig_sorted.size >= 8:
            k_dof = np.array(
                [
                    parabolas[i].n_groups - 1
                    if parabolas[i].n_groups > 1
                    else max(parabolas[i].n_points - 3, 1)
                    for i in keep
                ],
                dtype=float,
            )[asc]
            sig_sorted = _pool_sigma_model(d_sorted, f0_sorted, sig_sorted, k_dof)
    vm_profile = TabulatedVm(d_sorted, vm_sorted)
    res_cal = replace(resonator, k_eff_n_per_m=cal.k_eff_n_per_m)

    # calibration errors shift the whole frequency model coherently: a
    # stiffness error rescales every shift (model - f_m propto 1/k_eff), a
    # contact-offset error slides every point along the local slope; both
    # matter most at close range where the slope is steep, so propagate the
    # calibration covariance into the model fits as a rank-2 coherent term
    cov_coherent = None
    if use_sigma and sigma_override_hz is None and np.all(np.isfinite(cal.cov)):
        sens = np.column_stack(
            [
                -(f0_sorted - resonator.f_m_hz) / cal.k_eff_n_per_m,
                -np.gradient(f0_sorted, d_sorted),
            ]
        )
        cov_coherent = sens @ cal.cov @ sens.T

    cands = dict(candidates)
    if not cands:
        raise FitError("no candidate force models given")
    common = dict(
        vm_profile=vm_profile,
        resonator=res_cal,
        sphere_radius_m=sphere_radius_m,
        sigma_f0_hz=sig_sorted if use_sigma else None,
        cov_f0_hz2=cov_coherent,
    )
    if len(cands) == 1:
        ((tag, cand),) = cands.items()
        if isinstance(cand, ForceCurve):
            curve = cand
        else:
            curve = reference_curve(
                cand,
                thermal,
                sphere_radius_m,
                float(d_sorted[0]),
                float(d_sorted[-1]),
                rtol=rtol,
                include_n0_te=include_n0_te,
            )
        ranked = [
            fit_residual_potential(
                d_sorted, f0_sorted, casimir_curve=curve, model_tag=tag, **common
            )
        ]
    else:
        ranked = compare_models(
            d_sorted,
            f0_sorted,
            candidates=cands,
            thermal=thermal,
            rtol=rtol,
            include_n0_te=include_n0_te,
            **common,
        )
    return FitPipelineResult(
        setpoints_m=np.array(order),
        parabolas=tuple(parabolas),
        calibration=cal,
        distance_m=d_sorted,
        f0_hz=f0_sorted,
        sigma_f0_hz=sig_sorted if use_sigma else None,
        vm_v=vm_sorted,
        reports=tuple(ranked),
        verdict=verdict_line(ranked),
        excluded_setpoints_m=tuple(excluded),
    )
