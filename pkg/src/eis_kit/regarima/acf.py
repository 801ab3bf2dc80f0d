"""Autocorrelation with a 3-sigma band and AR-order selection.

The AR order is chosen from the autocorrelation of the primary predictor
tracks: count the initial run of lags whose sample autocorrelation falls
outside the +-3/sqrt(N) band, take the maximum over predictors and
subjects, floor at one, clamp to a ceiling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import UndefinedAcfError
from .series import SubjectSeries


@dataclass(frozen=True)
class AcfResult:
    """Sample autocorrelations r[0..max_lag] plus the 3-sigma band."""

    lags: np.ndarray
    r: np.ndarray
    band: float

    @property
    def max_lag(self) -> int:
        return int(self.lags[-1])


def acf(series, max_lag: int) -> AcfResult:
    """Sample autocorrelation function up to ``max_lag``.

    r_k = sum_t (x_t - xbar)(x_{t+k} - xbar) / sum_t (x_t - xbar)^2, with
    the confidence band at +-3/sqrt(N). A constant series has no defined
    autocorrelation and raises :class:`UndefinedAcfError`.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise ValueError("series must be 1-D")
    n = x.size
    if not 1 <= max_lag < n:
        raise ValueError(f"need series length > max_lag >= 1, got N={n}, max_lag={max_lag}")
    xc = x - x.mean()
    denom = float(np.dot(xc, xc))
    if denom <= 0.0 or not math.isfinite(denom):
        raise UndefinedAcfError("autocorrelation undefined for a constant series")
    r = np.empty(max_lag + 1)
    r[0] = 1.0
    for k in range(1, max_lag + 1):
        r[k] = float(np.dot(xc[:-k], xc[k:])) / denom
    return AcfResult(lags=np.arange(max_lag + 1), r=r, band=3.0 / math.sqrt(n))


def significant_initial_lags(result: AcfResult) -> int:
    """Length of the initial run of lags (from 1) outside the band."""
    count = 0
    for k in range(1, result.r.size):
        if abs(result.r[k]) > result.band:
            count += 1
        else:
            break
    return count


def select_order(subjects, predictors=("zmod", "dzmod"), max_p: int = 10) -> int:
    """AR order from ACF runs of the given predictors across subjects.

    ``subjects`` may be a single :class:`SubjectSeries` or an iterable of
    them. Returns at least 1 and at most ``max_p``.
    """
    if max_p < 1:
        raise ValueError(f"max_p must be >= 1, got {max_p!r}")
    if isinstance(subjects, SubjectSeries):
        subjects = [subjects]
    else:
        subjects = list(subjects)
    if not subjects:
        raise ValueError("need at least one subject")
    best = 0
    for subject in subjects:
        for name in predictors:
            track = subject.predictor(name)
            result = acf(track, min(max_p, track.size - 1))
            best = max(best, significant_initial_lags(result))
    return max(1, min(best, max_p))
