"""Error and performance algebra for the wearable platform.

Covers the noisy-measurement model (systematic bias plus coefficient of
variation), the MARD accuracy metric, duty-cycled average current and
battery lifetime, the device energy-per-point figure of merit, the sensor
range-over-threshold figure of merit, and the accuracy/mismatch fractions
used to judge sub-block integration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import SchemaError


@dataclass(frozen=True)
class MardModel:
    """Noisy-measurement synthesis model.

    A noisy reading of a true value ``G`` is
    ``G * (1 + bias_pct/100 + (cv_pct/100) * eps)`` with ``eps`` standard
    normal. Percent fields are plain percent numbers (``-1.25`` means
    -1.25%). Synthesis is a pure function of ``(g_true, n, rng_seed)``, so
    instances are safe to share.
    """

    bias_pct: float
    cv_pct: float
    rng_seed: int = 0

    def __post_init__(self):
        if self.cv_pct < 0.0:
            raise ValueError(f"cv_pct must be non-negative, got {self.cv_pct!r}")


def synthesize_noisy(m: MardModel, g_true: float, n: int) -> np.ndarray:
    """Draw ``n`` noisy readings of ``g_true`` under model ``m``."""
    if not g_true > 0.0:
        raise ValueError(f"g_true must be positive, got {g_true!r}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    rng = np.random.default_rng(m.rng_seed)
    eps = rng.standard_normal(n)
    return g_true * (1.0 + m.bias_pct / 100.0 + (m.cv_pct / 100.0) * eps)


def mard(pred, ref) -> float:
    """Mean absolute relative difference, percent: 100*mean(|pred-ref|/ref)."""
    pred = np.asarray(pred, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if pred.shape != ref.shape or pred.ndim != 1 or pred.size < 1:
        raise ValueError(
            f"pred and ref must be equal-length 1-D series, got {pred.shape} vs {ref.shape}"
        )
    if np.any(ref <= 0.0):
        raise ValueError("reference values must be positive")
    return float(100.0 * np.mean(np.abs(pred - ref) / ref))


@dataclass(frozen=True)
class PowerProfile:
    """Duty-cycled current profile plus converter bookkeeping.

    ``f_s`` is the conversion rate (one over the per-conversion time),
    ``points_per_cycle`` the number of points in one measurement cycle and
    ``n_bits`` the converter resolution used in the device figure of merit.
    """

    i_sleep: float  # A
    t_sleep: float  # s
    i_active: float  # A
    t_active: float  # s
    v_batt: float = 3.7  # V
    battery_capacity_ah: float = 0.3  # Ah
    n_channels: int = 4
    points_per_cycle: int = 10
    n_bits: int = 16
    f_s: float = 1.0 / 0.013  # Hz

    def __post_init__(self):
        if self.i_sleep < 0.0 or self.i_active < 0.0:
            raise ValueError("currents must be non-negative")
        if self.t_sleep < 0.0 or self.t_active < 0.0:
            raise ValueError("durations must be non-negative")
        if not self.t_sleep + self.t_active > 0.0:
            raise ValueError("t_sleep + t_active must be positive")
        if not (self.v_batt > 0.0 and self.battery_capacity_ah > 0.0):
            raise ValueError("v_batt and battery_capacity_ah must be positive")
        if not self.f_s > 0.0:
            raise ValueError(f"f_s must be positive, got {self.f_s!r}")

    @property
    def t_total(self) -> float:
        return self.t_sleep + self.t_active


@dataclass(frozen=True)
class SensorFigures:
    """Linear dynamic range and specific signal threshold, both percent."""

    ldr_pct: float
    sst_pct: float

    def __post_init__(self):
        if not self.sst_pct > 0.0:
            raise ValueError(f"sst_pct must be positive, got {self.sst_pct!r}")


def average_current(p: PowerProfile) -> float:
    """Duty-cycle-weighted mean current over one program cycle, ampere."""
    return (p.i_sleep * p.t_sleep + p.i_active * p.t_active) / p.t_total


def battery_life(p: PowerProfile) -> float:
    """Battery lifetime in hours: capacity divided by average current."""
    i_avg = average_current(p)
    if not i_avg > 0.0:
        raise ValueError("average current must be positive for a finite lifetime")
    return p.battery_capacity_ah / i_avg


def fom_device(p: PowerProfile, i_avg: float) -> float:
    """Energy per converted point: n*p*V*I_avg / (f_s * 2^NBITS), joule."""
    return (
        p.n_channels
        * p.points_per_cycle
        * p.v_batt
        * i_avg
        / (p.f_s * 2.0**p.n_bits)
    )


def fom_sensor(s: SensorFigures) -> float:
    """Range-over-threshold figure of merit: %LDR / %SST."""
    return s.ldr_pct / s.sst_pct


def accuracy(x: float, x_true: float) -> float:
    """Fractional accuracy (x - X) / X of a measured value against truth."""
    if x_true == 0.0:
        raise ValueError("true value must be non-zero")
    return (x - x_true) / x_true


def mismatch(x1: float, x_true1: float, x2: float, x_true2: float) -> float:
    """Fractional mismatch of the ratio x2/x1 against the ideal X2/X1."""
    if x1 == 0.0 or x_true1 == 0.0 or x_true2 == 0.0:
        raise ValueError("x1, x_true1 and x_true2 must be non-zero")
    ideal = x_true2 / x_true1
    return ((x2 / x1) - ideal) / ideal


# ---------------------------------------------------------------------------
# Machine-readable error budget (per-source bias / cv ledger)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BudgetRow:
    """One error source: percent range plus provenance note."""

    component: str  # "bias" or "cv"
    source: str
    min_pct: float
    max_pct: float
    note: str = ""

    def value(self, pick: str = "mid") -> float:
        if pick == "min":
            return self.min_pct
        if pick == "max":
            return self.max_pct
        if pick == "mid":
            return 0.5 * (self.min_pct + self.max_pct)
        raise ValueError(f"pick must be min, mid or max, got {pick!r}")


def load_error_budget() -> list[BudgetRow]:
    """Load the shipped per-source error budget ledger."""
    text = resources.files("eis_kit").joinpath("data/error_budget.json").read_text()
    return _parse_budget(text)


def _parse_budget(text: str) -> list[BudgetRow]:
    try:
        payload = json.loads(text)
        rows = [
            BudgetRow(
                component=r["component"],
                source=r["source"],
                min_pct=float(r["min_pct"]),
                max_pct=float(r["max_pct"]),
                note=r.get("note", ""),
            )
            for r in payload["rows"]
        ]
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise SchemaError(f"malformed error budget: {exc}")
    for row in rows:
        if row.component not in ("bias", "cv"):
            raise SchemaError(f"budget component must be bias or cv, got {row.component!r}")
    return rows


def compose_bias_pct(rows, sources=None, pick: str = "mid") -> float:
    """Sum selected bias rows; uncorrelated offsets compose additively."""
    selected = [r for r in rows if r.component == "bias"]
    if sources is not None:
        selected = [r for r in selected if r.source in set(sources)]
    return sum(r.value(pick) for r in selected)


def compose_cv_pct(rows, sources=None, pick: str = "mid") -> float:
    """Combine selected cv rows in quadrature (uncorrelated spreads).

    Signs in the ledger record the direction of the underlying artifact;
    magnitudes are what combine.
    """
    selected = [r for r in rows if r.component == "cv"]
    if sources is not None:
        selected = [r for r in selected if r.source in set(sources)]
    return math.sqrt(sum(abs(r.value(pick)) ** 2 for r in selected))


def mard_model_from_budget(
    rows=None,
    bias_sources=None,
    cv_sources=None,
    pick: str = "mid",
    rng_seed: int = 0,
) -> MardModel:
    """Build a MardModel preset by composing ledger rows."""
    if rows is None:
        rows = load_error_budget()
    return MardModel(
        bias_pct=compose_bias_pct(rows, bias_sources, pick),
        cv_pct=compose_cv_pct(rows, cv_sources, pick),
        rng_seed=rng_seed,
    )
