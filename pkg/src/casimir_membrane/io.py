"""File formats for curves, sweep records, maps, series and fit reports.

Writers emit byte-deterministic output: floats in shortest round-trip form,
LF newlines, fixed column order, sorted JSON keys. Readers validate the
schema and raise ConfigError on mismatch so the CLI can map bad input to its
input-error exit code.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .analysis import AllanResult, FitPipelineResult, ModelFitReport
from .electrostatics import PatchMap
from .errors import ConfigError
from .lifshitz import ForceCurve
from .simulator import SweepRecord

__all__ = [
    "format_report_table",
    "read_series_csv",
    "read_sweep_records",
    "write_allan_csv",
    "write_curve_csv",
    "write_curve_json",
    "write_fit_report_json",
    "write_kelvin_csv",
    "write_patch_map_csv",
    "write_residuals_csv",
    "write_series_csv",
    "write_sweep_csv",
    "write_sweep_jsonl",
    "write_trace_json",
    "write_vm_profile_csv",
]

SWEEP_COLUMNS = ("run_id", "direction", "z_m", "V", "f_Hz")
SERIES_COLUMNS = ("t_s", "f_Hz")


def _fmt(x) -> str:
    """Shortest decimal form that parses back to exactly the same float."""
    return repr(float(x))


def _write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def _json_value(x):
    """JSON-safe scalar: non-finite floats become null (standard JSON)."""
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else None
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, np.ndarray):
        return [_json_value(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def _dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


# --------------------------------------------------------------------------
# force curves


def _model_metadata(model) -> dict:
    meta = {"kind": model.kind}
    if hasattr(model, "omega_p"):
        meta["omega_p_rad_per_s"] = _json_value(model.omega_p)
    if hasattr(model, "gamma"):
        meta["gamma_rad_per_s"] = _json_value(model.gamma)
    return meta


def write_curve_csv(curve: ForceCurve, path) -> None:
    """Curve grid as CSV columns z_m, value, d1, d3."""
    lines = ["z_m,value,d1,d3"]
    for i in range(curve.z_m.size):
        lines.append(
            f"{_fmt(curve.z_m[i])},{_fmt(curve.value[i])},"
            f"{_fmt(curve.d1[i])},{_fmt(curve.d3[i])}"
        )
    _write_text(path, "\n".join(lines) + "\n")


def write_curve_json(curve: ForceCurve, path) -> None:
    """Curve grid plus model/geometry/temperature metadata as one document."""
    doc = {
        "model": _model_metadata(curve.model),
        "sphere_radius_m": _json_value(curve.sphere_radius_m),
        "temperature_k": _json_value(curve.temperature_k),
        "z_m": _json_value(curve.z_m),
        "value": _json_value(curve.value),
        "d1": _json_value(curve.d1),
        "d3": _json_value(curve.d3),
    }
    _write_text(path, _dump_json(doc))


# --------------------------------------------------------------------------
# sweep records


def write_sweep_csv(records, path) -> None:
    lines = [",".join(SWEEP_COLUMNS)]
    for rec in records:
        lines.append(
            f"{rec.run_id},{rec.direction},{_fmt(rec.z_setpoint_m)},"
            f"{_fmt(rec.applied_v)},{_fmt(rec.measured_f_hz)}"
        )
    _write_text(path, "\n".join(lines) + "\n")


def write_sweep_jsonl(records, path) -> None:
    """One JSON object per record per line, fixed key order."""
    lines = []
    for rec in records:
        lines.append(
            json.dumps(
                {
                    "run_id": int(rec.run_id),
                    "direction": rec.direction,
                    "z_m": float(rec.z_setpoint_m),
                    "V": float(rec.applied_v),
                    "f_Hz": float(rec.measured_f_hz),
                },
                allow_nan=False,
            )
        )
    _write_text(path, "\n".join(lines) + "\n")


def _parse_sweep_row(fields: dict, where: str) -> SweepRecord:
    try:
        rec = SweepRecord(
            run_id=int(fields["run_id"]),
            direction=str(fields["direction"]),
            z_setpoint_m=float(fields["z_m"]),
            applied_v=float(fields["V"]),
            measured_f_hz=float(fields["f_Hz"]),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    if not rec.direction:
        raise ConfigError(f"{where}: empty direction")
    for name, value in (
        ("z_m", rec.z_setpoint_m),
        ("V", rec.applied_v),
        ("f_Hz", rec.measured_f_hz),
    ):
        if not math.isfinite(value):
            raise ConfigError(f"{where}: non-finite {name}")
    return rec


def read_sweep_records(path) -> list[SweepRecord]:
    """Sweep records from CSV or JSON-lines (detected from the content).

    The CSV header must be exactly run_id,direction,z_m,V,f_Hz; each
    JSON-lines object must carry exactly those keys. Anything else raises
    ConfigError naming the offending line.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ConfigError(f"{path}: empty sweep file")

    records = []
    if lines[0].lstrip().startswith("{"):
        for i, ln in enumerate(lines, start=1):
            try:
                obj = json.loads(ln)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}:{i}: not a JSON object: {exc}") from exc
            if not isinstance(obj, dict) or set(obj) != set(SWEEP_COLUMNS):
                raise ConfigError(
                    f"{path}:{i}: expected keys {', '.join(SWEEP_COLUMNS)}"
                )
            records.append(_parse_sweep_row(obj, f"{path}:{i}"))
    else:
        header = tuple(col.strip() for col in lines[0].split(","))
        if header != SWEEP_COLUMNS:
            raise ConfigError(
                f"{path}: expected sweep columns {','.join(SWEEP_COLUMNS)}, "
                f"got {','.join(header)}"
            )
        for i, ln in enumerate(lines[1:], start=2):
            parts = [p.strip() for p in ln.split(",")]
            if len(parts) != len(SWEEP_COLUMNS):
                raise ConfigError(
                    f"{path}:{i}: expected {len(SWEEP_COLUMNS)} fields, "
                    f"got {len(parts)}"
                )
            records.append(
                _parse_sweep_row(dict(zip(SWEEP_COLUMNS, parts)), f"{path}:{i}")
            )
    return records


# --------------------------------------------------------------------------
# potential maps and profiles


def write_patch_map_csv(patch_map: PatchMap, path) -> None:
    """Grid as CSV columns x, y, V plus a JSON sidecar <path>.json with the
    generation parameters."""
    lines = ["x,y,V"]
    n_x, n_y = patch_map.values.shape
    for i in range(n_x):
        x = i * patch_map.spacing_m
        for j in range(n_y):
            lines.append(f"{_fmt(x)},{_fmt(j * patch_map.spacing_m)},"
                         f"{_fmt(patch_map.values[i, j])}")
    _write_text(path, "\n".join(lines) + "\n")
    sidecar = {
        "spacing_m": _json_value(patch_map.spacing_m),
        "correlation_length_m": _json_value(patch_map.correlation_length_m),
        "rms_v": _json_value(patch_map.rms_v),
        "mean_v": _json_value(patch_map.mean_v),
        "seed": int(patch_map.seed),
        "n_x": int(n_x),
        "n_y": int(n_y),
    }
    _write_text(str(path) + ".json", _dump_json(sidecar))


def write_kelvin_csv(scan_x_m, scan_y_m, grid_v, path) -> None:
    """Kelvin scan as CSV columns x, y, V_m."""
    xs = np.asarray(scan_x_m, dtype=float)
    ys = np.asarray(scan_y_m, dtype=float)
    grid = np.asarray(grid_v, dtype=float)
    if grid.shape != (xs.size, ys.size):
        raise ConfigError("kelvin grid shape does not match the scan axes")
    lines = ["x,y,V_m"]
    for i in range(xs.size):
        for j in range(ys.size):
            lines.append(f"{_fmt(xs[i])},{_fmt(ys[j])},{_fmt(grid[i, j])}")
    _write_text(path, "\n".join(lines) + "\n")


def write_vm_profile_csv(z_m, vm_v, path) -> None:
    """Minimizing-potential profile as CSV columns z_m, V_m."""
    z = np.asarray(z_m, dtype=float)
    vm = np.asarray(vm_v, dtype=float)
    if z.shape != vm.shape or z.ndim != 1:
        raise ConfigError("profile arrays must be matching 1-d")
    lines = ["z_m,V_m"]
    for i in range(z.size):
        lines.append(f"{_fmt(z[i])},{_fmt(vm[i])}")
    _write_text(path, "\n".join(lines) + "\n")


# --------------------------------------------------------------------------
# frequency series and stability


def write_series_csv(t_s, f_hz, path) -> None:
    t = np.asarray(t_s, dtype=float)
    f = np.asarray(f_hz, dtype=float)
    if t.shape != f.shape or t.ndim != 1:
        raise ConfigError("series arrays must be matching 1-d")
    lines = [",".join(SERIES_COLUMNS)]
    for i in range(t.size):
        lines.append(f"{_fmt(t[i])},{_fmt(f[i])}")
    _write_text(path, "\n".join(lines) + "\n")


def read_series_csv(path):
    """(t_s, f_Hz) arrays from a two-column series CSV.

    Requires the exact header t_s,f_Hz and strictly increasing, finite
    sample times.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ConfigError(f"{path}: empty series file")
    header = tuple(col.strip() for col in lines[0].split(","))
    if header != SERIES_COLUMNS:
        raise ConfigError(
            f"{path}: expected series columns {','.join(SERIES_COLUMNS)}, "
            f"got {','.join(header)}"
        )
    t_vals, f_vals = [], []
    for i, ln in enumerate(lines[1:], start=2):
        parts = [p.strip() for p in ln.split(",")]
        if len(parts) != 2:
            raise ConfigError(f"{path}:{i}: expected 2 fields, got {len(parts)}")
        try:
            t_vals.append(float(parts[0]))
            f_vals.append(float(parts[1]))
        except ValueError as exc:
            raise ConfigError(f"{path}:{i}: {exc}") from exc
    t = np.array(t_vals)
    f = np.array(f_vals)
    if t.size and (not np.all(np.isfinite(t)) or not np.all(np.isfinite(f))):
        raise ConfigError(f"{path}: non-finite samples")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise ConfigError(f"{path}: sample times must be strictly increasing")
    return t, f


def write_allan_csv(result: AllanResult, path) -> None:
    lines = ["tau_s,sigma_y"]
    for i in range(result.tau_s.size):
        lines.append(f"{_fmt(result.tau_s[i])},{_fmt(result.sigma_y[i])}")
    _write_text(path, "\n".join(lines) + "\n")


# --------------------------------------------------------------------------
# fit reports


def _report_dict(rep: ModelFitReport) -> dict:
    return {
        "model_tag": rep.model_tag,
        "v1_v": _json_value(rep.v1_v),
        "v_rms_v": _json_value(rep.v_rms_v),
        "sigma_v1_v": _json_value(rep.sigma_v1_v),
        "sigma_v_rms_v": _json_value(rep.sigma_v_rms_v),
        "chi2": _json_value(rep.chi2),
        "dof": int(rep.dof),
        "chi2_reduced": _json_value(rep.chi2_reduced),
        "pte": _json_value(rep.pte),
        "at_boundary": bool(rep.at_boundary),
        "weighted": bool(rep.weighted),
        "n_points": int(rep.n_points),
        "n_iter": int(rep.n_iter),
        "f_model_hz": _json_value(rep.f_model_hz),
        "flags": list(rep.flags),
    }


def write_fit_report_json(result: FitPipelineResult, path) -> None:
    """Verdict, calibration and every model report (all fields) as JSON."""
    cal = result.calibration
    doc = {
        "verdict": result.verdict,
        "calibration": {
            "k_eff_n_per_m": _json_value(cal.k_eff_n_per_m),
            "z_offset_m": _json_value(cal.z_offset_m),
            "sigma_k_eff": _json_value(cal.sigma_k_eff),
            "sigma_z_offset": _json_value(cal.sigma_z_offset),
            "cov": _json_value(cal.cov),
            "n_points": int(cal.n_points),
            "n_iter": int(cal.n_iter),
            "residual_rms": _json_value(cal.residual_rms),
            "chi2_red": _json_value(cal.chi2_red),
        },
        "distance_m": _json_value(result.distance_m),
        "f0_hz": _json_value(result.f0_hz),
        "sigma_f0_hz": _json_value(result.sigma_f0_hz),
        "vm_v": _json_value(result.vm_v),
        "excluded_setpoints_m": _json_value(list(result.excluded_setpoints_m)),
        "reports": [_report_dict(rep) for rep in result.reports],
    }
    _write_text(path, _dump_json(doc))


def format_report_table(result: FitPipelineResult) -> str:
    """Human-readable ranking table plus calibration and verdict lines."""
    cal = result.calibration
    out = [
        f"calibration: k_eff = {cal.k_eff_n_per_m:.6g} N/m "
        f"(+- {cal.sigma_k_eff:.2g}), "
        f"z_off = {cal.z_offset_m * 1e9:.4g} nm "
        f"(+- {cal.sigma_z_offset * 1e9:.2g} nm)",
        "",
        f"{'model':<10} {'V1 [mV]':>12} {'V_rms [mV]':>14} "
        f"{'chi2/dof':>10} {'PTE':>10} {'flags':>20}",
    ]
    for rep in result.reports:
        v1 = f"{rep.v1_v * 1e3:+.3f}"
        if math.isfinite(rep.sigma_v1_v):
            v1 += f"+-{rep.sigma_v1_v * 1e3:.3f}"
        vr = f"{rep.v_rms_v * 1e3:.3f}"
        if math.isfinite(rep.sigma_v_rms_v):
            vr += f"+-{rep.sigma_v_rms_v * 1e3:.3f}"
        flags = ",".join(rep.flags) if rep.flags else "-"
        out.append(
            f"{rep.model_tag:<10} {v1:>12} {vr:>14} "
            f"{rep.chi2_reduced:>10.4g} {rep.pte:>10.3g} {flags:>20}"
        )
    out.extend(["", result.verdict])
    return "\n".join(out) + "\n"


def write_residuals_csv(result: FitPipelineResult, rep: ModelFitReport, path) -> None:
    """Per-point misfit of one model: z_m, f0_meas, f0_model, residual, sigma."""
    sig = (
        result.sigma_f0_hz
        if result.sigma_f0_hz is not None
        else np.full_like(result.f0_hz, math.nan)
    )
    lines = ["z_m,f0_meas,f0_model,residual,sigma"]
    for i in range(result.distance_m.size):
        resid = result.f0_hz[i] - rep.f_model_hz[i]
        lines.append(
            f"{_fmt(result.distance_m[i])},{_fmt(result.f0_hz[i])},"
            f"{_fmt(rep.f_model_hz[i])},{_fmt(resid)},{_fmt(sig[i])}"
        )
    _write_text(path, "\n".join(lines) + "\n")


def write_trace_json(trace, path) -> None:
    """Iteration trace of a failed fit: (iteration, parameters, cost) rows."""
    rows = [
        {
            "iteration": int(it),
            "params": _json_value(np.asarray(params)),
            "cost": _json_value(cost),
        }
        for it, params, cost in trace
    ]
    _write_text(path, _dump_json(rows))
