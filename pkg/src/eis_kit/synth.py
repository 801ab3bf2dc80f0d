"""Synthetic continuous-wear cohort generator.

Each subject gets an 8-hour-style recording: impedance tracks carrying
meal-shaped responses (breakfast half an hour in, lunch at three hours)
on top of slow seeded wander, temperature and humidity tracks, and a
glucose target produced by a hidden regression-ARMA ground-truth model

    g_t = c + sum_j beta_j * track_j(t) + u_t,   ARMA(p,q) errors u_t.

Four sparse reference samples are drawn from the true glucose at the
scheduled collection times (start, one hour, four hours, end of
recording). The ground-truth parameters and the full true glucose track
are written alongside the series so closed-loop oracle tests can fit the
generator's own model family against an error-free target.

All output is a pure function of (scenario, seed, subject index).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from . import __version__
from .errors import ConfigurationError
from .io import write_reference, write_subject_series
from .regarima.series import SubjectSeries


@dataclass(frozen=True)
class CohortScenario:
    """Ground-truth parameter set for cohort synthesis."""

    name: str
    intercept: float
    betas: dict[str, float]
    ar: tuple[float, ...]
    ma: tuple[float, ...]
    innovation_sd: float
    meal_times_h: tuple[float, ...] = (0.5, 3.0)
    ref_times_h: tuple[float, ...] = (0.0, 1.0, 4.0, 8.0)
    z_base_ohm: tuple[float, float] = (3800.0, 4200.0)
    meal_bump_ohm: tuple[float, float] = (150.0, 250.0)
    meal_rise_min: float = 40.0


SCENARIOS: dict[str, CohortScenario] = {
    "baseline": CohortScenario(
        name="baseline",
        intercept=10.0,
        betas={"zmod": 0.02, "dzmod": 0.5, "rh": -0.1},
        ar=(0.6, -0.2),
        ma=(0.4,),
        innovation_sd=1.0,
    ),
    "flat": CohortScenario(
        name="flat",
        intercept=10.0,
        betas={"zmod": 0.02, "dzmod": 0.5, "rh": -0.1},
        ar=(0.6, -0.2),
        ma=(0.4,),
        innovation_sd=1.0,
        meal_times_h=(),
    ),
}


def get_scenario(name: str) -> CohortScenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        known = ", ".join(sorted(SCENARIOS))
        raise ConfigurationError(f"unknown scenario {name!r} (known: {known})")


def _ar1(rng, n: int, phi: float, sd: float) -> np.ndarray:
    e = rng.standard_normal(n + 100) * sd
    return lfilter([1.0], [1.0, -phi], e)[100:]


def _arma(rng, n: int, ar, ma, sd: float) -> np.ndarray:
    e = rng.standard_normal(n + 200) * sd
    b = np.r_[1.0, np.asarray(ma, dtype=float)]
    a = np.r_[1.0, -np.asarray(ar, dtype=float)]
    return lfilter(b, a, e)[200:]


def _meal_bump(t_min: np.ndarray, t_meal_min: float, amp: float, rise_min: float) -> np.ndarray:
    x = (t_min - t_meal_min) / rise_min
    bump = np.where(x > 0.0, x * np.exp(1.0 - x), 0.0)
    return amp * bump


def generate_subject(
    scenario: CohortScenario,
    duration_h: float,
    cadence_s: float,
    rng: np.random.Generator,
) -> tuple[SubjectSeries, dict]:
    """One subject's tracks plus its ground-truth record."""
    n = int(round(duration_h * 3600.0 / cadence_s))
    if n < 4:
        raise ConfigurationError("duration/cadence give fewer than 4 samples")
    ts = np.arange(n) * cadence_s
    t_min = ts / 60.0
    span = ts[-1] if ts[-1] > 0 else 1.0

    z0 = rng.uniform(*scenario.z_base_ohm)
    zmod = z0 + _ar1(rng, n, 0.98, 3.0)
    for t_meal in scenario.meal_times_h:
        amp = rng.uniform(*scenario.meal_bump_ohm)
        zmod = zmod + _meal_bump(t_min, t_meal * 60.0, amp, scenario.meal_rise_min)

    phase0 = rng.uniform(0.0, 2.0 * math.pi)
    zphase = -15.0 + 2.0 * np.sin(2.0 * math.pi * ts / span + phase0)
    zphase = zphase + _ar1(rng, n, 0.95, 0.2)
    zreal = zmod * np.cos(np.radians(zphase))
    zimag = zmod * np.sin(np.radians(zphase))

    skin_temp = 33.5 + 0.6 * np.sin(2.0 * math.pi * ts / span + rng.uniform(0, 2 * math.pi))
    skin_temp = skin_temp + _ar1(rng, n, 0.9, 0.05)
    rh = 55.0 + 8.0 * np.sin(3.0 * math.pi * ts / span + rng.uniform(0, 2 * math.pi))
    rh = np.clip(rh + _ar1(rng, n, 0.95, 0.4), 20.0, 95.0)

    tracks = {
        "zmod": zmod,
        "zphase": zphase,
        "zreal": zreal,
        "zimag": zimag,
        "skin_temp": skin_temp,
        "rh": rh,
    }
    for base in ("zreal", "zimag", "zmod", "zphase"):
        d = np.empty(n)
        d[0] = 0.0
        d[1:] = np.diff(tracks[base])
        tracks["d" + base] = d

    noise = _arma(rng, n, scenario.ar, scenario.ma, scenario.innovation_sd)
    glucose = scenario.intercept + noise
    for name, beta in scenario.betas.items():
        glucose = glucose + beta * tracks[name]

    ref_idx = sorted(
        {min(int(round(h * 3600.0 / cadence_s)), n - 1) for h in scenario.ref_times_h}
    )
    if len(ref_idx) < 2:
        raise ConfigurationError("scenario reference schedule collapses to < 2 samples")
    refs = tuple((float(ts[i]), float(glucose[i])) for i in ref_idx)

    subject = SubjectSeries(
        timestamps=ts,
        zreal=zreal,
        zimag=zimag,
        zmod=zmod,
        zphase=zphase,
        skin_temp=skin_temp,
        rh=rh,
        ref_points=refs,
    )
    truth = {
        "scenario": scenario.name,
        "intercept": scenario.intercept,
        "betas": dict(scenario.betas),
        "ar": list(scenario.ar),
        "ma": list(scenario.ma),
        "innovation_sd": scenario.innovation_sd,
        "glucose_true": glucose,
    }
    return subject, truth


def synth_cohort(
    outdir,
    n_subjects: int,
    duration_h: float = 8.0,
    cadence_s: float = 60.0,
    scenario: str = "baseline",
    seed: int = 0,
) -> list[dict]:
    """Generate and write a cohort; returns per-subject file records.

    Per subject: ``sNN_series.csv`` (480 rows for the default 8 h at 60 s),
    ``sNN_ref.csv`` (the sparse reference samples), ``sNN_glucose.csv``
    (dense true glucose) and ``sNN_truth.json`` (ground-truth parameters).
    """
    if n_subjects < 1:
        raise ConfigurationError(f"n_subjects must be >= 1, got {n_subjects!r}")
    scn = get_scenario(scenario)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    width = max(2, len(str(n_subjects)))
    records = []
    for i in range(1, n_subjects + 1):
        rng = np.random.default_rng([seed, i])
        subject, truth = generate_subject(scn, duration_h, cadence_s, rng)
        tag = f"s{i:0{width}d}"
        series_path = outdir / f"{tag}_series.csv"
        ref_path = outdir / f"{tag}_ref.csv"
        glucose_path = outdir / f"{tag}_glucose.csv"
        truth_path = outdir / f"{tag}_truth.json"

        write_subject_series(series_path, subject)
        write_reference(ref_path, subject.ref_points)
        glucose = truth.pop("glucose_true")
        write_reference(glucose_path, zip(subject.timestamps, glucose))
        truth_payload = {"schema": "cohort-truth", "version": __version__, "seed": seed,
                         "subject": i, **truth}
        truth_path.write_text(json.dumps(truth_payload, indent=2) + "\n")

        records.append(
            {
                "subject": i,
                "series": str(series_path),
                "ref": str(ref_path),
                "glucose_true": str(glucose_path),
                "truth": str(truth_path),
            }
        )
    return records
