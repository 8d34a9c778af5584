"""Command-line interface.

Subcommands mirror the library surface: spectra, fits, correlations,
switching traces, power sweeps, named scenarios and the acceptance suite.
Failures print a machine-parsable JSON error record to stderr and exit
nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, acceptance, csvio, plots
from .config import device_from_config, emitter_from_config, stark_from_config
from .device import Spectrum, apply_blinking, inactive_model, normalize_spectrum, spectrum_sweep
from .errors import ValidationError, WgqedError
from .fitting import fit, get_model
from .photonstats import (
    DriveParams,
    MasterEquationOracle,
    OracleOptions,
    g2_transmitted,
    symmetric_delays,
)
from .quantities import HC_UEV_NM
from .scenarios import (
    power_extinction_curve,
    run_scenario,
    scenario_names,
)
from .tuning import SwitchDrive, rise_time_10_90, switch_trace


def _load_config(path: str) -> dict:
    if path is None:
        raise ValidationError("config", "a --config file is required")
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ValidationError("config", f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise ValidationError("config", f"invalid JSON: {exc}")


def _out_dir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_report(out: Path, report: dict):
    (out / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(json.dumps(report, indent=2, sort_keys=True))


def _cmd_simulate_spectrum(args) -> int:
    cfg = _load_config(args.config)
    out = _out_dir(args)
    emitter = emitter_from_config(cfg) if cfg.get("emitter", True) else None
    model = device_from_config(cfg, emitter)
    lam0 = emitter.resonance_wavelength_nm if emitter else float(cfg.get("resonance_wavelength_nm", 893.0))
    span = float(cfg.get("sweep_span_nm", 0.03))
    points = int(cfg.get("sweep_points", 401))
    grid = np.linspace(lam0 - span / 2, lam0 + span / 2, points)
    spec = spectrum_sweep(model, grid)
    report = {"points": points, "span_nm": span}
    if cfg.get("normalize", True) and emitter is not None:
        off = spectrum_sweep(inactive_model(model), grid)
        spec = normalize_spectrum(spec, off)
        blink = model.blinking_fraction
        if blink > 0:
            spec = apply_blinking(
                spec, Spectrum(grid, np.ones_like(grid), spec.axis_name), blink
            )
        report["dip_depth"] = float(1.0 - spec.values.min())
    csvio.write_spectrum(out / "spectrum.csv", spec)
    if args.figures:
        plots.plot_spectrum(spec, out / "spectrum.svg")
    _write_report(out, report)
    return 0


def _cmd_fit(args) -> int:
    out = _out_dir(args)
    data = csvio.ingest_csv(args.data)
    if not isinstance(data, Spectrum):
        raise ValidationError("data", "fit expects a spectrum CSV")
    result = fit(get_model(args.model), data)
    (out / "fit_report.txt").write_text(result.report() + "\n", encoding="utf-8")
    _write_report(out, result.as_dict())
    if args.figures:
        model = get_model(args.model)
        plots.plot_spectrum(
            data, out / "fit.svg", fit_curve=model.func(data.axis, result.values)
        )
    return 0


def _cmd_g2(args) -> int:
    cfg = _load_config(args.config)
    out = _out_dir(args)
    emitter = emitter_from_config(cfg)
    kind = cfg.get("kind", "transmitted")
    detuning = float(cfg.get("detuning_ueV", 0.0))
    delays = symmetric_delays(
        float(cfg.get("delay_span_ns", 6.0)), int(cfg.get("delay_points_half", 400))
    )
    if kind == "transmitted":
        trace = g2_transmitted(emitter, detuning, delays)
    elif kind in ("oracle", "fluorescence"):
        drive = DriveParams.from_saturation(
            emitter, float(cfg.get("saturation_s0", 1e-4)), detuning
        )
        oracle = MasterEquationOracle(emitter, drive, OracleOptions())
        trace = (
            oracle.g2_transmitted(delays)
            if kind == "oracle"
            else oracle.g2_fluorescence(delays)
        )
    else:
        raise ValidationError("kind", f"unknown correlation kind '{kind}'")
    csvio.write_g2(out / "g2.csv", trace)
    mid = delays.size // 2
    _write_report(out, {"kind": kind, "g2_zero": float(trace.values[mid]),
                        "g2_max": float(trace.values.max())})
    if args.figures:
        plots.plot_g2(trace, out / "g2.svg")
    return 0


def _cmd_switch_trace(args) -> int:
    cfg = _load_config(args.config)
    out = _out_dir(args)
    emitter = emitter_from_config(cfg)
    laser_energy = HC_UEV_NM / emitter.resonance_wavelength_nm
    stark = stark_from_config(cfg, laser_energy)
    drive = SwitchDrive(
        low_bias_v=float(cfg.get("low_bias_V", stark.reference_bias_v + 0.1)),
        high_bias_v=float(cfg.get("high_bias_V", stark.reference_bias_v)),
        period_ns=float(cfg.get("period_ns", 1500.0)),
        rc_ns=float(cfg.get("rc_ns", 36.4)),
    )
    t_grid = np.arange(
        0.0, drive.period_ns, float(cfg.get("sample_interval_ns", 0.25))
    )
    trace = switch_trace(drive, stark, emitter, laser_energy, t_grid)
    csvio.write_timeseries(out / "switch_trace.csv", trace)
    _write_report(out, {"rise_10_90_ns": float(rise_time_10_90(trace)),
                        "rc_ns": drive.rc_ns})
    if args.figures:
        plots.plot_timeseries(trace, out / "switch_trace.svg")
    return 0


def _cmd_power_sweep(args) -> int:
    cfg = _load_config(args.config)
    out = _out_dir(args)
    emitter = emitter_from_config(cfg)
    powers = np.linspace(
        0.0, float(cfg.get("max_power_nW", 200.0)), int(cfg.get("power_points", 81))
    )
    curve = power_extinction_curve(
        emitter, powers, float(cfg.get("saturation_power_nW", 8.5))
    )
    csvio.write_power_curve(out / "power_sweep.csv", curve)
    _write_report(out, {"weak_field_extinction": float(curve.extinctions[0]),
                        "max_power_nW": float(powers[-1])})
    if args.figures:
        plots.plot_power_curve(powers, curve.extinctions, out / "power_sweep.svg")
    return 0


def _cmd_run_scenario(args) -> int:
    overrides = _load_config(args.config) if args.config else None
    manifest = run_scenario(
        args.name,
        _out_dir(args),
        seed=args.seed,
        overrides=overrides,
        figures=args.figures,
    )
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return 0


def _cmd_acceptance(args) -> int:
    results = acceptance.run_all()
    if args.out:
        out = _out_dir(args)
        (out / "acceptance.txt").write_text(
            "\n".join(r.line() for r in results) + "\n", encoding="utf-8"
        )
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wgqed",
        description="Simulate and analyse a two-level emitter in a nano-photonic waveguide.",
    )
    parser.add_argument("--version", action="version", version=f"wgqed {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", help="JSON config file", default=None)
        p.add_argument("--out", help="output directory", default=None)
        p.add_argument("--seed", type=int, help="64-bit PRNG seed", default=None)
        p.add_argument(
            "--no-figures", dest="figures", action="store_false",
            help="skip SVG figure rendering",
        )

    p = sub.add_parser("simulate-spectrum", help="device transmission sweep")
    common(p)
    p.set_defaults(func=_cmd_simulate_spectrum)

    p = sub.add_parser("fit", help="fit a lineshape model to a spectrum CSV")
    p.add_argument("--model", choices=("lorentzian", "fano"), required=True)
    p.add_argument("--data", required=True, help="spectrum CSV file")
    common(p)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("g2", help="second-order correlation traces")
    common(p)
    p.set_defaults(func=_cmd_g2)

    p = sub.add_parser("switch-trace", help="RC-limited switching trace")
    common(p)
    p.set_defaults(func=_cmd_switch_trace)

    p = sub.add_parser("power-sweep", help="extinction versus optical power")
    common(p)
    p.set_defaults(func=_cmd_power_sweep)

    p = sub.add_parser("run-scenario", help="run a named scenario end to end")
    p.add_argument("--name", required=True, choices=scenario_names())
    common(p)
    p.set_defaults(func=_cmd_run_scenario)

    p = sub.add_parser("acceptance", help="run the acceptance suite")
    common(p)
    p.set_defaults(func=_cmd_acceptance)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except WgqedError as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ValidationError):
            record["field"] = exc.field
        print(json.dumps(record, sort_keys=True), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
