"""Reference-glucose interpolation onto the measurement grid."""

from __future__ import annotations

import numpy as np
from scipy.interpolate import PchipInterpolator

from ..errors import ConfigurationError


def interpolate_reference(ref_points, target_timestamps, method: str = "pchip") -> np.ndarray:
    """Interpolate sparse reference samples to every target timestamp.

    The default is shape-preserving monotone piecewise-cubic interpolation
    (no overshoot between sparse samples); ``method="linear"`` switches to
    straight lines. Targets outside the reference span are held constant
    at the endpoint values.
    """
    refs = [(float(t), float(g)) for t, g in ref_points]
    if len(refs) < 2:
        raise ValueError("need at least 2 reference points")
    times = np.array([t for t, _ in refs])
    values = np.array([g for _, g in refs])
    if np.any(np.diff(times) <= 0.0):
        raise ValueError("reference times must be strictly increasing without duplicates")
    targets = np.asarray(target_timestamps, dtype=float)
    clipped = np.clip(targets, times[0], times[-1])
    if method == "linear":
        return np.interp(clipped, times, values)
    if method == "pchip":
        return PchipInterpolator(times, values)(clipped)
    raise ConfigurationError(f"unknown interpolation method {method!r}")
