"""Command-line surface: one subcommand per module.

Every stochastic command requires an explicit ``--seed`` so any run can be
reproduced byte-for-byte. Errors print a single machine-parsable line
``code=<n> msg=<text>`` to stderr and exit with 2 (configuration), 3
(data/schema) or 4 (numerical failure).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, figures, io, metrology, synth
from .circuit import get_preset, load_circuit_file
from .dft import RatiometricAnalyzer, analyzer_from_mapping
from .dose import box_stats, fit_dose_response, sem_by_dose
from .errors import (
    EXIT_CONFIG,
    EXIT_DATA,
    EXIT_OK,
    ConfigurationError,
    EisKitError,
    SchemaError,
)
from .noise import NoiseBudget, composite_noise_terms, load_budget_file
from .regarima import (
    FitConfig,
    acf,
    fit,
    model_from_json,
    model_to_json,
    predict,
    residual_histogram,
)

COMMANDS = ("measure", "noise", "dose", "fom", "mard", "acf", "fit", "predict", "synth")
_STOCHASTIC = frozenset({"measure", "synth"})


@dataclass(frozen=True)
class RunConfig:
    """Parsed invocation: command, seed and per-command parameter block."""

    command: str
    seed: int | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigurationError(f"unknown command {self.command!r}")
        if self.command in _STOCHASTIC and self.seed is None:
            raise ConfigurationError(
                f"command {self.command!r} is stochastic and requires --seed"
            )


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise ConfigurationError(f"{what} must be comma-separated numbers, got {text!r}")
    if not values:
        raise ConfigurationError(f"{what} must be non-empty")
    return values


def _load_circuit(args):
    if args.circuit is not None:
        return load_circuit_file(args.circuit)
    return get_preset(args.preset)


# ---------------------------------------------------------------------------
# Command implementations
# ---------------------------------------------------------------------------


def _run_measure(cfg: RunConfig) -> int:
    p = cfg.params
    mapping = io.read_keyvalue(p["config"]) if p["config"] else {}
    analyzer_cfg = analyzer_from_mapping(mapping, {"rng_seed": cfg.seed})
    dut = p["dut"]
    freqs = p["freqs"] if p["freqs"] else [analyzer_cfg.f_excite]
    analyzer = RatiometricAnalyzer(analyzer_cfg)
    duts = [dut] * analyzer_cfg.n_channels
    measurements = analyzer.tdm_sweep(duts, freqs)
    figures.export_figure_data("sweep", measurements, p["out"])
    return EXIT_OK


def _run_noise(cfg: RunConfig) -> int:
    p = cfg.params
    budget = load_budget_file(p["budget"]) if p["budget"] else NoiseBudget()
    if not (p["fmin"] > 0 and p["fmax"] > p["fmin"]):
        raise ConfigurationError("need 0 < fmin < fmax")
    if p["points"] < 2:
        raise ConfigurationError("need at least 2 frequency points")
    f_grid = np.logspace(np.log10(p["fmin"]), np.log10(p["fmax"]), p["points"])
    terms = [composite_noise_terms(budget, f) for f in f_grid]
    figures.export_figure_data("noise_spectrum", (f_grid, terms), p["out"])
    return EXIT_OK


def _run_dose(cfg: RunConfig) -> int:
    p = cfg.params
    points = io.read_dose_points(p["infile"])
    ph_values = sorted({pt.ph for pt in points})
    fits = {}
    for ph in ph_values:
        try:
            f = fit_dose_response(points, ph, axis=p["axis"])
        except ValueError as exc:
            raise SchemaError(f"pH {ph}: {exc}")
        fits[repr(ph)] = {
            "slope": f.slope,
            "intercept": f.intercept,
            "r_squared": f.r_squared,
            "ldr_pct": f.ldr_pct,
            "rmse": f.rmse,
            "axis": f.axis,
            "n_points": f.n_points,
            "residual_tol": f.residual_tol,
        }
    payload = {
        "schema": "dose-fit",
        "version": __version__,
        "fits": fits,
        "sem_by_dose": {repr(c): s for c, s in sem_by_dose(points).items()},
    }
    Path(p["out"]).write_text(json.dumps(payload, indent=2) + "\n")
    if p["box"]:
        concentrations = sorted({pt.concentration for pt in points})
        rows = []
        for c in concentrations:
            if sum(pt.concentration == c for pt in points) >= 4:
                rows.append((c, box_stats(points, c)))
        figures.export_figure_data("box", rows, p["box"])
    if p["cdr"]:
        cells: dict[tuple[float, float], list[float]] = {}
        for pt in points:
            cells.setdefault((pt.concentration, pt.ph), []).append(pt.delta_z_pct)
        rows = []
        for (c, ph) in sorted(cells):
            vals = np.asarray(cells[(c, ph)])
            sem = float(vals.std() / np.sqrt(vals.size)) if vals.size > 1 else 0.0
            rows.append((c, ph, float(vals.mean()), sem))
        figures.export_figure_data("cdr", rows, p["cdr"])
    return EXIT_OK


def _run_fom(cfg: RunConfig) -> int:
    p = cfg.params
    values = io.read_keyvalue(p["profile"])
    keys = {
        "i_sleep_a": "i_sleep",
        "t_sleep_s": "t_sleep",
        "i_active_a": "i_active",
        "t_active_s": "t_active",
        "v_batt_v": "v_batt",
        "battery_capacity_ah": "battery_capacity_ah",
        "n_channels": "n_channels",
        "points_per_cycle": "points_per_cycle",
        "n_bits": "n_bits",
        "f_s_hz": "f_s",
    }
    kwargs = {}
    sensor = {}
    for key, raw in values.items():
        if key in ("ldr_pct", "sst_pct"):
            sensor[key] = float(raw)
            continue
        if key not in keys:
            known = ", ".join(sorted(keys) + ["ldr_pct", "sst_pct"])
            raise ConfigurationError(f"unknown profile key {key!r} (known: {known})")
        name = keys[key]
        kwargs[name] = int(raw) if name in ("n_channels", "points_per_cycle", "n_bits") else float(raw)
    try:
        profile = metrology.PowerProfile(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad power profile: {exc}")
    i_avg = metrology.average_current(profile)
    print(f"i_avg_a={io.format_value(i_avg)}")
    print(f"battery_life_h={io.format_value(metrology.battery_life(profile))}")
    print(f"fom_device_j_per_point={io.format_value(metrology.fom_device(profile, i_avg))}")
    if sensor:
        if set(sensor) != {"ldr_pct", "sst_pct"}:
            raise ConfigurationError("sensor figures need both ldr_pct and sst_pct")
        figs = metrology.SensorFigures(sensor["ldr_pct"], sensor["sst_pct"])
        print(f"fom_sensor={io.format_value(metrology.fom_sensor(figs))}")
    return EXIT_OK


def _run_mard(cfg: RunConfig) -> int:
    p = cfg.params
    pred = io.read_reference(p["pred"])
    ref = io.read_reference(p["ref"])
    if len(pred) != len(ref):
        raise SchemaError(
            f"pred has {len(pred)} rows but ref has {len(ref)}; they must align"
        )
    try:
        value = metrology.mard([g for _, g in pred], [g for _, g in ref])
    except ValueError as exc:
        raise SchemaError(str(exc))
    print(f"mard_pct={io.format_value(value)}")
    return EXIT_OK


def _run_acf(cfg: RunConfig) -> int:
    p = cfg.params
    tracks = io.read_series_tracks(p["series"])
    if p["column"] not in tracks:
        raise ConfigurationError(
            f"unknown column {p['column']!r} (known: {', '.join(sorted(tracks))})"
        )
    result = acf(tracks[p["column"]], p["max_lag"])
    figures.export_figure_data("acf", result, p["out"])
    return EXIT_OK


def _parse_orders(text: str) -> tuple[int, int, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigurationError(f"--orders must be p,d,q, got {text!r}")
    try:
        p, d, q = (int(v) for v in parts)
    except ValueError:
        raise ConfigurationError(f"--orders must be integers, got {text!r}")
    if p < 0 or d < 0 or q < 0:
        raise ConfigurationError("orders must be non-negative")
    return p, d, q


def _run_fit(cfg: RunConfig) -> int:
    p = cfg.params
    subject = io.read_subject_series(p["series"], p["ref"])
    predictors = [s.strip() for s in p["predictors"].split(",") if s.strip()]
    if not predictors:
        raise ConfigurationError("--predictors must name at least one track")
    try:
        model = fit(
            subject,
            p["orders"],
            predictors,
            config=FitConfig(max_iter=p["max_iter"]),
            interp_method=p["interp"],
            output_scale=p["output_scale"],
        )
    except ValueError as exc:
        raise ConfigurationError(str(exc))
    Path(p["out"]).write_text(model_to_json(model) + "\n")
    if p["prediction"] or p["histogram"]:
        result = predict(model, subject, interp_method=p["interp"])
        if p["prediction"]:
            figures.export_figure_data("prediction", result, p["prediction"])
        if p["histogram"]:
            hist = residual_histogram(result.residuals, p["bins"])
            figures.export_figure_data("histogram", hist, p["histogram"])
    return EXIT_OK


def _run_predict(cfg: RunConfig) -> int:
    p = cfg.params
    model_path = Path(p["model"])
    try:
        model = model_from_json(model_path.read_text())
    except OSError as exc:
        raise SchemaError(f"cannot read model {model_path}: {exc}")
    subject = io.read_subject_series(p["series"], p["ref"])
    result = predict(model, subject, interp_method=p["interp"])
    figures.export_figure_data("prediction", result, p["out"])
    if p["histogram"]:
        hist = residual_histogram(result.residuals, p["bins"])
        figures.export_figure_data("histogram", hist, p["histogram"])
    return EXIT_OK


def _run_synth(cfg: RunConfig) -> int:
    p = cfg.params
    records = synth.synth_cohort(
        p["outdir"],
        p["subjects"],
        duration_h=p["hours"],
        cadence_s=p["cadence"],
        scenario=p["scenario"],
        seed=cfg.seed,
    )
    print(f"subjects={len(records)} outdir={p['outdir']}")
    return EXIT_OK


_RUNNERS = {
    "measure": _run_measure,
    "noise": _run_noise,
    "dose": _run_dose,
    "fom": _run_fom,
    "mard": _run_mard,
    "acf": _run_acf,
    "fit": _run_fit,
    "predict": _run_predict,
    "synth": _run_synth,
}


def run(config: RunConfig) -> int:
    """Execute one parsed command."""
    return _RUNNERS[config.command](config)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eis-kit",
        description="Impedance-spectroscopy biosensing toolkit",
    )
    parser.add_argument("--version", action="version", version=f"eis-kit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("measure", help="simulate a ratiometric TDM impedance sweep")
    m.add_argument("--config", default=None, help="analyzer key=value config file")
    m.add_argument("--preset", default="sensor-default", help="DUT circuit preset name")
    m.add_argument("--circuit", default=None, help="DUT circuit key=value file")
    m.add_argument("--freqs", default=None, help="comma-separated frequencies, Hz")
    m.add_argument("--out", required=True)
    m.add_argument("--seed", type=int, required=True)

    n = sub.add_parser("noise", help="evaluate the noise budget over a frequency grid")
    n.add_argument("--budget", default=None, help="noise budget key=value file")
    n.add_argument("--fmin", type=float, default=1.0)
    n.add_argument("--fmax", type=float, default=10000.0)
    n.add_argument("--points", type=int, default=200)
    n.add_argument("--out", required=True)

    d = sub.add_parser("dose", help="dose-response fits and box statistics")
    d.add_argument("--in", dest="infile", required=True)
    d.add_argument("--out", required=True, help="fit JSON output")
    d.add_argument("--box", default=None, help="box-whisker CSV output")
    d.add_argument("--cdr", default=None, help="mean/SEM dose-response CSV output")
    d.add_argument("--axis", choices=("log10", "linear"), default="log10")

    f = sub.add_parser("fom", help="power / figure-of-merit report")
    f.add_argument("--profile", required=True, help="power profile key=value file")

    r = sub.add_parser("mard", help="mean absolute relative difference of two series")
    r.add_argument("--pred", required=True)
    r.add_argument("--ref", required=True)

    a = sub.add_parser("acf", help="autocorrelation of a subject track")
    a.add_argument("--series", required=True)
    a.add_argument("--column", default="zmod")
    a.add_argument("--max-lag", dest="max_lag", type=int, default=50)
    a.add_argument("--out", required=True)

    t = sub.add_parser("fit", help="fit the regression-ARIMA model")
    t.add_argument("--series", required=True)
    t.add_argument("--ref", required=True)
    t.add_argument("--orders", required=True, help="p,d,q")
    t.add_argument(
        "--predictors",
        default="zimag,zmod,zphase,zreal,dzimag,dzmod,dzphase,dzreal,rh",
    )
    t.add_argument("--out", required=True, help="model JSON output")
    t.add_argument("--prediction", default=None, help="prediction CSV output")
    t.add_argument("--histogram", default=None, help="residual histogram CSV output")
    t.add_argument("--bins", type=int, default=20)
    t.add_argument("--interp", choices=("pchip", "linear"), default="pchip")
    t.add_argument(
        "--output-scale", dest="output_scale",
        choices=("identity", "log"), default="identity",
    )
    t.add_argument("--max-iter", dest="max_iter", type=int, default=500)

    q = sub.add_parser("predict", help="predict with a stored model")
    q.add_argument("--model", required=True)
    q.add_argument("--series", required=True)
    q.add_argument("--ref", required=True)
    q.add_argument("--out", required=True)
    q.add_argument("--histogram", default=None)
    q.add_argument("--bins", type=int, default=20)
    q.add_argument("--interp", choices=("pchip", "linear"), default="pchip")

    s = sub.add_parser("synth", help="generate a synthetic cohort")
    s.add_argument("--subjects", type=int, required=True)
    s.add_argument("--hours", type=float, default=8.0)
    s.add_argument("--cadence", type=float, default=60.0)
    s.add_argument("--scenario", default="baseline")
    s.add_argument("--outdir", required=True)
    s.add_argument("--seed", type=int, required=True)

    return parser


def _config_from_args(args) -> RunConfig:
    params = {k: v for k, v in vars(args).items() if k not in ("command", "func", "seed")}
    if args.command == "measure":
        params["dut"] = _load_circuit(args)
        params["freqs"] = _parse_floats(args.freqs, "--freqs") if args.freqs else None
    if args.command == "fit":
        params["orders"] = _parse_orders(args.orders)
    return RunConfig(
        command=args.command,
        seed=getattr(args, "seed", None),
        params=params,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run(_config_from_args(args))
    except EisKitError as exc:
        print(f"code={exc.exit_code} msg={exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, KeyError, IndexError) as exc:
        print(f"code={EXIT_CONFIG} msg={exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"code={EXIT_DATA} msg={exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
