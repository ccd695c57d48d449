"""Command-line surface tying model curves, simulation and fitting together.

Subcommands: curve, simulate, fit, allan, kelvin-map. Every command is
deterministic given (config, seed); repeated runs produce byte-identical
files. Exit codes: 0 success (a rejected model is a result, not an error),
2 input or config error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io as fmt
from .analysis import allan_deviation, run_fit_pipeline
from .config import (
    build_curve_request,
    build_experiment_config,
    build_kelvin_request,
    load_config,
    preset_document,
    preset_names,
)
from .errors import (
    CasimirMembraneError,
    ConfigError,
    ConvergenceError,
    DomainError,
    FitError,
    InsufficientDataError,
    NumericalError,
)
from .lifshitz import casimir_force_curve
from .simulator import run_experiment, run_kelvin_scan

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


def _load_document(path_or_preset: str) -> dict:
    """Config document from a JSON file, or a preset expanded by name.

    A document whose top level is {"preset": <name>, ...} starts from that
    preset; any sibling key replaces the preset's section wholesale.
    """
    if path_or_preset in preset_names() and not Path(path_or_preset).exists():
        return preset_document(path_or_preset)
    doc = load_config(path_or_preset)
    if isinstance(doc, dict) and "preset" in doc:
        name = doc.pop("preset")
        if not isinstance(name, str):
            raise ConfigError("'preset' must be a preset name string")
        base = preset_document(name)
        base.update(doc)
        return base
    return doc


def _out_dir(args) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from exc
    return out


def cmd_curve(args) -> int:
    request = build_curve_request(_load_document(args.config))
    out = _out_dir(args)
    written = []
    for tag in sorted(request.models):
        curve = casimir_force_curve(
            request.models[tag],
            request.z_grid_m,
            request.sphere_radius_m,
            request.thermal,
            rtol=request.rtol,
            include_n0_te=request.include_n0_te,
        )
        path = out / f"curve_{tag}.{args.format}"
        if args.format == "json":
            fmt.write_curve_json(curve, path)
        else:
            fmt.write_curve_csv(curve, path)
        written.append(path)
    print(
        f"{len(written)} model curve(s), {request.z_grid_m.size} points over "
        f"z = {request.z_grid_m[0]:.6g}..{request.z_grid_m[-1]:.6g} m -> "
        + ", ".join(str(p) for p in written)
    )
    return EXIT_OK


def cmd_simulate(args) -> int:
    bundle = build_experiment_config(_load_document(args.config))
    config = bundle.config
    seed = config.seed if args.seed is None else args.seed
    records = run_experiment(config, seed=seed)
    out = _out_dir(args)
    if args.format == "json":
        sweep_path = out / "sweep.jsonl"
        fmt.write_sweep_jsonl(records, sweep_path)
    else:
        sweep_path = out / "sweep.csv"
        fmt.write_sweep_csv(records, sweep_path)
    extra = ""
    if bundle.kelvin is not None and bundle.patch_map is not None:
        xs, ys = bundle.kelvin.grid_axes(bundle.patch_map)
        grid = run_kelvin_scan(
            bundle.patch_map, xs, ys, bundle.kelvin.z_m, config.sphere_radius_m
        )
        kelvin_path = out / "kelvin.csv"
        fmt.write_kelvin_csv(xs, ys, grid, kelvin_path)
        extra = f" + {kelvin_path}"
    z = np.array([rec.z_setpoint_m for rec in records])
    print(
        f"{len(records)} records over z = {z.min():.6g}..{z.max():.6g} m "
        f"(seed {seed}) -> {sweep_path}{extra}"
    )
    return EXIT_OK


def cmd_fit(args) -> int:
    bundle = build_experiment_config(_load_document(args.config))
    records = fmt.read_sweep_records(args.data)
    out = _out_dir(args)
    try:
        result = run_fit_pipeline(
            records,
            resonator=bundle.config.resonator,
            sphere_radius_m=bundle.config.sphere_radius_m,
            thermal=bundle.config.thermal,
            candidates=bundle.fit.candidates,
            sigma_override_hz=bundle.fit.sigma_override_hz,
            rtol=bundle.fit.rtol,
            include_n0_te=bundle.fit.include_n0_te,
        )
    except ConvergenceError as exc:
        trace_path = out / "fit_trace.json"
        fmt.write_trace_json(exc.trace, trace_path)
        print(f"error: {exc} (iteration trace: {trace_path})", file=sys.stderr)
        return EXIT_NUMERICAL
    report_path = out / "report.json"
    fmt.write_fit_report_json(result, report_path)
    for rep in result.reports:
        fmt.write_residuals_csv(result, rep, out / f"residuals_{rep.model_tag}.csv")
    print(fmt.format_report_table(result), end="")
    print(f"report -> {report_path}")
    return EXIT_OK


def cmd_allan(args) -> int:
    t_s, f_hz = fmt.read_series_csv(args.series)
    if t_s.size < 2:
        raise InsufficientDataError(
            "series must contain at least two samples to form one difference"
        )
    steps = np.diff(t_s)
    dt = float(steps[0])
    if np.any(np.abs(steps - dt) > 1e-6 * dt):
        raise ConfigError("series is not uniformly sampled")
    taus = None
    if args.taus:
        try:
            taus = [float(part) for part in args.taus.split(",") if part.strip()]
        except ValueError as exc:
            raise ConfigError(f"--taus: {exc}") from exc
        if not taus:
            raise ConfigError("--taus lists no values")
    result = allan_deviation(f_hz, dt, taus_s=taus)
    out = _out_dir(args)
    path = out / "allan.csv"
    fmt.write_allan_csv(result, path)
    print(
        f"{result.tau_s.size} tau value(s) from {result.n_samples} samples "
        f"at {dt:.6g} s -> {path}"
    )
    return EXIT_OK


def cmd_kelvin_map(args) -> int:
    request = build_kelvin_request(_load_document(args.config))
    xs, ys = request.scan.grid_axes(request.patch_map)
    grid = run_kelvin_scan(
        request.patch_map, xs, ys, request.scan.z_m, request.sphere_radius_m
    )
    out = _out_dir(args)
    path = out / "kelvin_map.csv"
    fmt.write_kelvin_csv(xs, ys, grid, path)
    rms = float(np.sqrt(np.mean(grid**2)))
    print(
        f"{xs.size}x{ys.size} map at z = {request.scan.z_m:.6g} m, "
        f"rms V_m = {rms:.6g} V -> {path}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="casimir-membrane",
        description=(
            "Casimir force-gradient experiment engine: model curves, synthetic "
            "sweeps, stability analysis and model-discrimination fits."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, config=True, seed=False, fmt_choice=False):
        if config:
            p.add_argument(
                "--config",
                required=True,
                help="JSON config file, or a preset name "
                f"({', '.join(preset_names())})",
            )
        p.add_argument("--out", required=True, help="output directory")
        if seed:
            p.add_argument("--seed", type=int, default=None,
                           help="override the config's RNG seed")
        if fmt_choice:
            p.add_argument("--format", choices=("csv", "json"), default="csv",
                           help="output file format (default csv)")

    p = sub.add_parser("curve", help="evaluate force/gradient curves per model")
    add_common(p, fmt_choice=True)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("simulate", help="generate a synthetic sweep campaign")
    add_common(p, seed=True, fmt_choice=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="calibrate and rank force models on a sweep")
    add_common(p)
    p.add_argument("--data", required=True, help="sweep records (CSV or JSON-lines)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("allan", help="Allan deviation table of a frequency series")
    add_common(p, config=False)
    p.add_argument("--series", required=True, help="two-column t_s,f_Hz CSV")
    p.add_argument("--taus", default=None,
                   help="comma-separated averaging times in seconds "
                        "(default: doubling from the sample interval)")
    p.set_defaults(func=cmd_allan)

    p = sub.add_parser("kelvin-map", help="minimizing-potential map over a scan grid")
    add_common(p)
    p.set_defaults(func=cmd_kelvin_map)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, DomainError, InsufficientDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except FitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CasimirMembraneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main(argv=None))
