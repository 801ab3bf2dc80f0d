"""Per-subject measurement container for the time-series engine."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# All predictor tracks a subject exposes. Derivative tracks are first
# differences of the base track with d[0] = 0.
PREDICTOR_NAMES = (
    "zreal",
    "zimag",
    "zmod",
    "zphase",
    "dzreal",
    "dzimag",
    "dzmod",
    "dzphase",
    "skin_temp",
    "rh",
)

# Default regression set: the eight impedance features plus relative
# humidity. Skin temperature is recorded but off by default; enable it
# explicitly when fitting.
DEFAULT_PREDICTORS = (
    "zimag",
    "zmod",
    "zphase",
    "zreal",
    "dzimag",
    "dzmod",
    "dzphase",
    "dzreal",
    "rh",
)

_REL_CADENCE_TOL = 1e-6


def _as_track(name: str, values, n: int) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size != n:
        raise ValueError(f"{name} must be a 1-D array of length {n}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def _first_difference(track: np.ndarray) -> np.ndarray:
    d = np.empty_like(track)
    d[0] = 0.0
    d[1:] = np.diff(track)
    d.flags.writeable = False
    return d


@dataclass(frozen=True)
class SubjectSeries:
    """Uniformly sampled impedance/temperature/humidity tracks plus sparse
    reference glucose samples for one subject.

    Derivative tracks are computed on construction; all arrays are frozen.
    ``ref_points`` must hold at least two time-sorted (time_s, mg/dL)
    samples inside the recording span.
    """

    timestamps: np.ndarray
    zreal: np.ndarray
    zimag: np.ndarray
    zmod: np.ndarray
    zphase: np.ndarray
    skin_temp: np.ndarray
    rh: np.ndarray
    ref_points: tuple[tuple[float, float], ...]
    dzreal: np.ndarray = field(init=False)
    dzimag: np.ndarray = field(init=False)
    dzmod: np.ndarray = field(init=False)
    dzphase: np.ndarray = field(init=False)

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=float)
        if ts.ndim != 1 or ts.size < 2:
            raise ValueError("timestamps must be a 1-D array of length >= 2")
        steps = np.diff(ts)
        if np.any(steps <= 0.0):
            raise ValueError("timestamps must be strictly increasing")
        cadence = steps[0]
        if np.any(np.abs(steps - cadence) > _REL_CADENCE_TOL * cadence):
            raise ValueError("timestamps must be uniformly spaced")
        ts = ts.copy()
        ts.flags.writeable = False
        object.__setattr__(self, "timestamps", ts)

        n = ts.size
        for name in ("zreal", "zimag", "zmod", "zphase", "skin_temp", "rh"):
            object.__setattr__(self, name, _as_track(name, getattr(self, name), n))
        for base in ("zreal", "zimag", "zmod", "zphase"):
            object.__setattr__(self, "d" + base, _first_difference(getattr(self, base)))

        refs = tuple((float(t), float(g)) for t, g in self.ref_points)
        if len(refs) < 2:
            raise ValueError("need at least 2 reference points")
        times = [t for t, _ in refs]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("reference times must be strictly increasing")
        if times[0] < ts[0] or times[-1] > ts[-1]:
            raise ValueError("reference times must lie within the recording span")
        object.__setattr__(self, "ref_points", refs)

    @property
    def n_samples(self) -> int:
        return self.timestamps.size

    @property
    def cadence(self) -> float:
        """Sampling interval in seconds."""
        return float(self.timestamps[1] - self.timestamps[0])

    def predictor(self, name: str) -> np.ndarray:
        """Look up a predictor track by name; unknown names raise KeyError."""
        if name not in PREDICTOR_NAMES:
            raise KeyError(
                f"unknown predictor {name!r} (known: {', '.join(PREDICTOR_NAMES)})"
            )
        return getattr(self, name)

    def predictor_matrix(self, names) -> np.ndarray:
        """Column-stacked predictor matrix, one column per name."""
        names = tuple(names)
        if not names:
            return np.empty((self.n_samples, 0))
        return np.column_stack([self.predictor(n) for n in names])
