"""Dose-response calibration analytics.

Works on percent impedance change per (concentration, pH, replicate)
point: ordinary least squares against log10 concentration (or linear, by
flag), specific-signal-threshold and linear-dynamic-range extraction, and
pooled box-whisker / standard-error statistics across buffers.

%LDR here is the fraction of the tested concentration span over which the
response stays linear: a concentration counts as linear when every one of
its replicate residuals sits inside a tolerance band (default twice the
fit RMSE), and the retained span is measured between the smallest and
largest such concentration on the linear axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Tested design range of the assay, mg/dL.
CONCENTRATION_RANGE = (5.0, 200.0)

# Absolute slack added to the residual band so noiseless fits are not
# rejected by float rounding.
_BAND_EPS = 1e-9


@dataclass(frozen=True)
class DoseResponsePoint:
    """One calibration reading: percent impedance change at a dose."""

    concentration: float  # mg/dL
    ph: float
    delta_z_pct: float
    replicate: int = 0

    def __post_init__(self):
        lo, hi = CONCENTRATION_RANGE
        if not lo <= self.concentration <= hi:
            raise ValueError(
                f"concentration {self.concentration!r} outside design range "
                f"[{lo}, {hi}] mg/dL"
            )
        if not math.isfinite(self.delta_z_pct):
            raise ValueError(f"delta_z_pct must be finite, got {self.delta_z_pct!r}")


@dataclass(frozen=True)
class DoseFit:
    """Linear dose-response fit summary.

    ``slope`` is percent per decade of concentration when ``axis`` is
    ``log10``, percent per mg/dL when linear. ``intercept`` is the
    specific signal threshold (percent).
    """

    slope: float
    intercept: float
    r_squared: float
    ldr_pct: float
    rmse: float
    axis: str
    n_points: int
    residual_tol: float


@dataclass(frozen=True)
class BoxStats:
    """Quartile summary with Tukey whiskers clamped to the data."""

    q1: float
    median: float
    q3: float
    iqr: float
    whisker_lo: float
    whisker_hi: float
    n: int


def percent_delta_z(z: float, z_baseline: float) -> float:
    """Percent change of impedance against its baseline."""
    if not z_baseline > 0.0:
        raise ValueError(f"z_baseline must be positive, got {z_baseline!r}")
    return 100.0 * (z - z_baseline) / z_baseline


def _fit_axis(concentration: np.ndarray, axis: str) -> np.ndarray:
    if axis == "log10":
        return np.log10(concentration)
    if axis == "linear":
        return concentration.astype(float)
    raise ValueError(f"axis must be 'log10' or 'linear', got {axis!r}")


def fit_dose_response(
    points,
    ph: float,
    axis: str = "log10",
    residual_tol: float | None = None,
) -> DoseFit:
    """OLS dose-response fit for one buffer pH.

    Requires at least two distinct concentrations at the given pH. The
    intercept is reported as the specific signal threshold and ``ldr_pct``
    per the module-level definition.
    """
    subset = [p for p in points if p.ph == ph]
    if not subset:
        raise ValueError(f"no points at pH {ph!r}")
    conc = np.array([p.concentration for p in subset])
    y = np.array([p.delta_z_pct for p in subset])
    distinct = np.unique(conc)
    if distinct.size < 2:
        raise ValueError(
            f"need >= 2 distinct concentrations to fit, got {distinct.size}"
        )
    x = _fit_axis(conc, axis)

    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    resid = y - fitted
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot > 0.0:
        r_squared = max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    else:
        r_squared = 1.0 if ss_res <= _BAND_EPS else 0.0
    rmse = math.sqrt(ss_res / len(y))

    tol = 2.0 * rmse if residual_tol is None else float(residual_tol)
    band = tol + _BAND_EPS * max(1.0, float(np.max(np.abs(y))))
    in_band = [
        c
        for c in distinct
        if np.all(np.abs(resid[conc == c]) <= band)
    ]
    full_span = float(distinct.max() - distinct.min())
    if in_band:
        ldr = 100.0 * (max(in_band) - min(in_band)) / full_span
    else:
        ldr = 0.0

    return DoseFit(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r_squared,
        ldr_pct=ldr,
        rmse=rmse,
        axis=axis,
        n_points=len(y),
        residual_tol=tol,
    )


def box_stats(points, concentration: float) -> BoxStats:
    """Quartile summary of all points at one dose, pooled across pH.

    Quartiles use linear interpolation of order statistics; whiskers sit at
    the most extreme data points within 1.5*IQR of the quartiles.
    """
    vals = np.array(
        [p.delta_z_pct for p in points if p.concentration == concentration]
    )
    if vals.size < 4:
        raise ValueError(
            f"need >= 4 points at concentration {concentration!r}, got {vals.size}"
        )
    q1, med, q3 = np.percentile(vals, [25.0, 50.0, 75.0])
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    whisker_lo = float(vals[vals >= lo_fence].min())
    whisker_hi = float(vals[vals <= hi_fence].max())
    return BoxStats(
        q1=float(q1),
        median=float(med),
        q3=float(q3),
        iqr=float(iqr),
        whisker_lo=whisker_lo,
        whisker_hi=whisker_hi,
        n=int(vals.size),
    )


def sem_by_dose(points) -> dict[float, float]:
    """Standard error of the mean per concentration (population std / sqrt n).

    Concentrations with a single replicate have no defined SEM and are
    omitted from the result.
    """
    by_conc: dict[float, list[float]] = {}
    for p in points:
        by_conc.setdefault(p.concentration, []).append(p.delta_z_pct)
    out = {}
    for c in sorted(by_conc):
        vals = np.array(by_conc[c])
        if vals.size < 2:
            continue
        out[c] = float(np.std(vals) / math.sqrt(vals.size))
    return out


# ---------------------------------------------------------------------------
# Synthetic scenarios
# ---------------------------------------------------------------------------


def synthesize_dose_points(
    concentrations,
    ph_values,
    slope: float,
    intercept: float,
    cv_pct: float = 0.0,
    noise_sd: float = 0.0,
    seed: int = 0,
    axis: str = "log10",
) -> list[DoseResponsePoint]:
    """Points on a straight dose-response line with optional spread:
    ``cv_pct`` multiplies values by (1 + cv/100 * eps) while ``noise_sd``
    adds homoscedastic Gaussian noise in percent units."""
    rng = np.random.default_rng(seed)
    points = []
    for ph_i, ph in enumerate(ph_values):
        for c in concentrations:
            x = math.log10(c) if axis == "log10" else c
            value = intercept + slope * x
            if cv_pct > 0.0:
                value *= 1.0 + (cv_pct / 100.0) * rng.standard_normal()
            if noise_sd > 0.0:
                value += noise_sd * rng.standard_normal()
            points.append(
                DoseResponsePoint(
                    concentration=float(c),
                    ph=float(ph),
                    delta_z_pct=float(value),
                    replicate=ph_i,
                )
            )
    return points


def threshold_limited_scenario(
    intercept: float = 11.0,
    slope: float = 8.0,
    deviation_pct: float = 6.0,
) -> list[DoseResponsePoint]:
    """Reference calibration scenario: linear response over most of the
    tested range, erratic below the signal threshold.

    The second concentration sits at the onset of the linear range so the
    retained span is exactly 95% of the full 5..200 mg/dL span. At the
    lowest dose each buffer carries replicates deviating by +d, -d and 0:
    the dose falls out of the residual band, but the deviations cancel in
    the normal equations so every per-pH fit keeps the exact intercept.
    """
    concentrations = [5.0, 14.75, 30.0, 60.0, 100.0, 150.0, 200.0]
    ph_values = [4.0, 6.0, 8.0]
    points = []
    for ph in ph_values:
        for c in concentrations:
            value = intercept + slope * math.log10(c)
            points.append(
                DoseResponsePoint(
                    concentration=c, ph=ph, delta_z_pct=value, replicate=0
                )
            )
        low = concentrations[0]
        base = intercept + slope * math.log10(low)
        for replicate, dev in ((1, deviation_pct), (2, -deviation_pct)):
            points.append(
                DoseResponsePoint(
                    concentration=low,
                    ph=ph,
                    delta_z_pct=base + dev,
                    replicate=replicate,
                )
            )
    return points
