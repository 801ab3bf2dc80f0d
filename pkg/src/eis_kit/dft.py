"""Ratiometric single-bin DFT impedance analyzer with TDM channels.

The simulated instrument excites the device under test and a precision
calibration resistor with the same single-tone voltage, extracts the
excitation bin of both current waveforms with a Goertzel recursion, and
reports

    Z_dut = z_cal * (I_cal_bin / I_dut_bin)

so any gain common to both paths cancels. Two instrumentation errors are
injectable: a multiplicative systematic gain offset (percent) and a fixed
per-channel additive magnitude error drawn once per analyzer instance,
reproducing inter-channel variability rather than per-sample noise.

Coherent sampling is enforced by construction: the configured sample rate
is adjusted so the excitation lands exactly on an integer DFT bin, which
removes spectral leakage without any window function.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .circuit import CalCell, CircuitModel, impedance_at, synthesize_waveform
from .errors import ConfigurationError, MeasurementUnderflowError

_BIN_TOL = 1e-9
_UNDERFLOW_FLOOR = 1e-18


@dataclass(frozen=True)
class AnalyzerConfig:
    """Analyzer settings; immutable once constructed.

    ``fs_sample`` is treated as a request: the constructor solves
    ``fs = f_excite * n_dft / m`` for the integer bin ``m`` that brings the
    rate closest to the request and stores the coherent rate. The chosen
    bin is available as ``excite_bin``.
    """

    f_excite: float = 100.0  # Hz
    v_rms: float = 0.010  # V
    fs_sample: float = 16000.0  # Hz (requested; replaced by coherent rate)
    n_dft: int = 2048
    n_channels: int = 4
    t_conversion: float = 0.013  # s per single-frequency conversion
    gain_offset_pct: float = 0.0
    channel_jitter_ohm: float = 0.0
    rng_seed: int = 0
    excite_bin: int = field(init=False)

    def __post_init__(self):
        if self.n_dft < 16:
            raise ConfigurationError(f"n_dft must be >= 16, got {self.n_dft!r}")
        if self.n_channels < 1:
            raise ConfigurationError(f"n_channels must be >= 1, got {self.n_channels!r}")
        if not self.t_conversion > 0.0:
            raise ConfigurationError(
                f"t_conversion must be positive, got {self.t_conversion!r}"
            )
        if not (self.f_excite > 0.0 and self.v_rms > 0.0 and self.fs_sample > 0.0):
            raise ConfigurationError("f_excite, v_rms and fs_sample must be positive")
        if self.channel_jitter_ohm < 0.0:
            raise ConfigurationError("channel_jitter_ohm must be non-negative")
        m = round(self.f_excite * self.n_dft / self.fs_sample)
        m = max(m, 1)
        if m >= self.n_dft // 2:
            raise ConfigurationError(
                "requested fs_sample puts the excitation at or above Nyquist"
            )
        object.__setattr__(self, "excite_bin", int(m))
        object.__setattr__(self, "fs_sample", self.f_excite * self.n_dft / m)

    @property
    def bin_width(self) -> float:
        """DFT bin spacing in hertz."""
        return self.fs_sample / self.n_dft

    def bin_for(self, f: float) -> int:
        """Integer DFT bin for frequency ``f``; non-aligned f is a config error."""
        b = f * self.n_dft / self.fs_sample
        nearest = round(b)
        if abs(b - nearest) > _BIN_TOL * max(1.0, abs(b)) or nearest < 1:
            raise ConfigurationError(
                f"frequency {f!r} Hz is not bin-aligned "
                f"(bin width {self.bin_width!r} Hz)"
            )
        if nearest >= self.n_dft // 2:
            raise ConfigurationError(f"frequency {f!r} Hz is at or above Nyquist")
        return int(nearest)


@dataclass(frozen=True)
class Measurement:
    """One impedance reading from the analyzer."""

    channel: int
    timestamp: float  # s since the analyzer started
    freq_hz: float
    z: complex
    zmod: float
    zphase: float  # degrees in (-180, 180]

    @classmethod
    def from_complex(cls, channel: int, timestamp: float, freq_hz: float, z: complex):
        return cls(
            channel=channel,
            timestamp=timestamp,
            freq_hz=freq_hz,
            z=z,
            zmod=abs(z),
            zphase=math.degrees(cmath.phase(z)),
        )


def single_bin_dft(samples, bin_index: int) -> complex:
    """Goertzel evaluation of one DFT bin.

    Returns ``X[bin] = sum_k x[k] * exp(-2j*pi*k*bin/N)`` with
    ``N = len(samples)``, identical to the matching bin of a full DFT.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    if not 0 <= bin_index < n / 2:
        raise IndexError(f"bin {bin_index!r} out of range [0, {n / 2})")
    w = 2.0 * math.pi * bin_index / n
    c = 2.0 * math.cos(w)
    s = lfilter([1.0], [1.0, -c, 1.0], x)
    return cmath.exp(1j * w) * s[-1] - s[-2]


class RatiometricAnalyzer:
    """Stateful analyzer instance: fixed channel-error pattern plus a
    running conversion clock. Not safe to share across threads; create one
    instance per thread instead. Produced measurements are immutable.
    """

    def __init__(self, cfg: AnalyzerConfig, cal: CalCell | None = None):
        self.cfg = cfg
        self.cal = cal if cal is not None else CalCell()
        rng = np.random.default_rng(cfg.rng_seed)
        self._channel_error = rng.normal(
            0.0, cfg.channel_jitter_ohm, cfg.n_channels
        )
        self._conversions = 0

    @property
    def channel_errors(self) -> np.ndarray:
        """Fixed additive magnitude error per channel, ohm."""
        return self._channel_error.copy()

    def measure(
        self,
        dut: CircuitModel | CalCell,
        channel: int = 0,
        frequency: float | None = None,
    ) -> Measurement:
        """One ratiometric conversion of ``dut`` on ``channel``.

        The timestamp is the conversion-complete time: ``t_conversion``
        advances once per measurement.
        """
        cfg = self.cfg
        if not 0 <= channel < cfg.n_channels:
            raise ConfigurationError(
                f"channel {channel!r} out of range [0, {cfg.n_channels})"
            )
        f = cfg.f_excite if frequency is None else frequency
        bin_index = cfg.bin_for(f)

        i_cal = synthesize_waveform(self.cal, f, cfg.v_rms, cfg.fs_sample, cfg.n_dft, 0)
        i_dut = synthesize_waveform(dut, f, cfg.v_rms, cfg.fs_sample, cfg.n_dft, 0)
        x_cal = single_bin_dft(i_cal, bin_index)
        x_dut = single_bin_dft(i_dut, bin_index)
        if abs(x_dut) < _UNDERFLOW_FLOOR:
            raise MeasurementUnderflowError(
                f"DUT bin magnitude {abs(x_dut)!r} below numeric floor"
            )

        z = self.cal.z_cal * (x_cal / x_dut)
        z *= 1.0 + cfg.gain_offset_pct / 100.0
        zmod = abs(z) + self._channel_error[channel]
        z_measured = cmath.rect(zmod, cmath.phase(z))

        self._conversions += 1
        timestamp = self._conversions * cfg.t_conversion
        return Measurement.from_complex(channel, timestamp, f, z_measured)

    def tdm_sweep(self, duts, frequencies) -> list[Measurement]:
        """Round-robin sweep: one measurement per (channel, frequency).

        Channels cycle fastest; the conversion clock advances by
        ``t_conversion`` per measurement.
        """
        duts = list(duts)
        frequencies = list(frequencies)
        if not 1 <= len(duts) <= self.cfg.n_channels:
            raise ConfigurationError(
                f"need between 1 and {self.cfg.n_channels} DUTs, got {len(duts)}"
            )
        if not frequencies:
            raise ConfigurationError("frequency list must be non-empty")
        for f in frequencies:
            self.cfg.bin_for(f)  # validate alignment up front
        out = []
        for f in frequencies:
            for channel, dut in enumerate(duts):
                out.append(self.measure(dut, channel=channel, frequency=f))
        return out


def measure_ratiometric(
    cfg: AnalyzerConfig, cal: CalCell, dut: CircuitModel | CalCell
) -> Measurement:
    """Single conversion using a fresh analyzer instance seeded from ``cfg``."""
    return RatiometricAnalyzer(cfg, cal).measure(dut)


def tdm_sweep(
    cfg: AnalyzerConfig, duts, frequencies, cal: CalCell | None = None
) -> list[Measurement]:
    """Full TDM sweep using a fresh analyzer instance seeded from ``cfg``."""
    return RatiometricAnalyzer(cfg, cal).tdm_sweep(duts, frequencies)


# Jitter preset sized so four channel draws span roughly the 150 ohm peak
# inter-channel spread seen on a single physical device replicate.
JITTER_REFERENCE_OHM = 73.0
JITTER_REFERENCE_SEED = 1


_ANALYZER_KEYS = {
    "f_excite_hz": ("f_excite", float),
    "v_rms_v": ("v_rms", float),
    "fs_sample_hz": ("fs_sample", float),
    "n_dft": ("n_dft", int),
    "n_channels": ("n_channels", int),
    "t_conversion_s": ("t_conversion", float),
    "gain_offset_pct": ("gain_offset_pct", float),
    "channel_jitter_ohm": ("channel_jitter_ohm", float),
    "rng_seed": ("rng_seed", int),
}


def analyzer_from_mapping(values: dict, overrides: dict | None = None) -> AnalyzerConfig:
    """Build an AnalyzerConfig from ``key=value`` entries plus overrides."""
    kwargs = {}
    for key, raw in values.items():
        if key not in _ANALYZER_KEYS:
            known = ", ".join(sorted(_ANALYZER_KEYS))
            raise ConfigurationError(f"unknown analyzer key {key!r} (known: {known})")
        name, cast = _ANALYZER_KEYS[key]
        try:
            kwargs[name] = cast(raw)
        except (TypeError, ValueError):
            raise ConfigurationError(f"analyzer value for {key!r} must be numeric")
    if overrides:
        kwargs.update(overrides)
    return AnalyzerConfig(**kwargs)
