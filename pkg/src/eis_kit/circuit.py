"""Lumped-element equivalent circuits of the biosensor and calibration cell.

The sensor is modeled as a series chain of three sections: bulk solution
resistance, the electrode interface (charge-transfer resistance in parallel
with the double-layer capacitance), and the active semiconducting film
(film resistance in parallel with film capacitance):

    Z(f) = r_s + (r_ct || 1/(j*w*c_dl)) + (r_asa || 1/(j*w*c_asa)),  w = 2*pi*f

The calibration cell is a single precision resistor with purely real
impedance. Both feed the ratiometric analyzer in :mod:`eis_kit.dft` and
serve as analytic ground truth for closed-loop tests.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

TWO_PI = 2.0 * math.pi

# Exact key set for plain-text circuit preset files.
_CONFIG_KEYS = ("r_s_ohm", "r_ct_ohm", "c_dl_f", "r_asa_ohm", "c_asa_f")


@dataclass(frozen=True)
class CircuitModel:
    """Three-section sensor equivalent circuit.

    Parameters
    ----------
    r_s : float
        Solution resistance, ohm.
    r_ct : float
        Charge-transfer resistance, ohm.
    c_dl : float
        Double-layer capacitance, farad.
    r_asa : float
        Active semiconducting film resistance, ohm.
    c_asa : float
        Active semiconducting film capacitance, farad.

    All elements must be positive and finite. Instances are immutable and
    safe to share across threads.
    """

    r_s: float
    r_ct: float
    c_dl: float
    r_asa: float
    c_asa: float

    def __post_init__(self):
        for name in ("r_s", "r_ct", "c_dl", "r_asa", "c_asa"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")

    def impedance(self, f: float) -> complex:
        """Complex impedance at frequency ``f`` in hertz."""
        return impedance_at(self, f)


@dataclass(frozen=True)
class CalCell:
    """Universal calibration cell: one precision resistor, purely real."""

    z_cal: float = 3990.0

    def __post_init__(self):
        if not (math.isfinite(self.z_cal) and self.z_cal > 0.0):
            raise ValueError(f"z_cal must be positive and finite, got {self.z_cal!r}")

    def impedance(self, f: float) -> complex:
        if not (math.isfinite(f) and f > 0.0):
            raise ValueError(f"frequency must be positive, got {f!r}")
        return complex(self.z_cal, 0.0)


def _parallel_rc(r: float, c: float, omega: float) -> complex:
    # Admittance form: well behaved as c grows large (capacitor shorts out).
    return 1.0 / complex(1.0 / r, omega * c)


def impedance_at(model: CircuitModel | CalCell, f: float) -> complex:
    """Evaluate the complex impedance of ``model`` at frequency ``f`` (Hz).

    Raises ``ValueError`` for non-positive frequency or a non-finite result.
    """
    if not (math.isfinite(f) and f > 0.0):
        raise ValueError(f"frequency must be positive, got {f!r}")
    if isinstance(model, CalCell):
        return complex(model.z_cal, 0.0)
    omega = TWO_PI * f
    z = (
        model.r_s
        + _parallel_rc(model.r_ct, model.c_dl, omega)
        + _parallel_rc(model.r_asa, model.c_asa, omega)
    )
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite impedance for {model!r} at f={f!r}")
    return z


def synthesize_waveform(
    model: CircuitModel | CalCell,
    f: float,
    v_rms: float,
    fs_sample: float,
    n_samples: int,
    seed: int,
    noise=None,
) -> np.ndarray:
    """Sampled current response to a single-tone RMS voltage excitation.

    Returns current samples ``i[k] = sqrt(2)*v_rms/|Z| * sin(2*pi*f*k/fs + phi)``
    with ``phi = -arg Z(f)``. When a :class:`~eis_kit.noise.NoiseBudget` is
    supplied, additive Gaussian noise with the budget's RMS voltage at ``f``
    (referred to current through ``|Z|``) is mixed in. Deterministic for a
    fixed ``seed``.

    Raises
    ------
    ConfigurationError
        If ``fs_sample <= 2*f`` (aliasing).
    ValueError
        If ``n_samples < 16`` or ``v_rms <= 0``.
    """
    if fs_sample <= 2.0 * f:
        raise ConfigurationError(
            f"fs_sample={fs_sample!r} must exceed twice the excitation "
            f"frequency {f!r} (aliasing)"
        )
    if n_samples < 16:
        raise ValueError(f"n_samples must be >= 16, got {n_samples!r}")
    if not v_rms > 0.0:
        raise ValueError(f"v_rms must be positive, got {v_rms!r}")

    z = impedance_at(model, f)
    zmod = abs(z)
    phi = -cmath.phase(z)
    amp = math.sqrt(2.0) * v_rms / zmod
    k = np.arange(n_samples)
    current = amp * np.sin(TWO_PI * f * k / fs_sample + phi)
    if noise is not None:
        rng = np.random.default_rng(seed)
        i_noise_rms = noise.rms_voltage(f) / zmod
        current = current + rng.normal(0.0, i_noise_rms, n_samples)
    return current


# Shipped preset: plumbing defaults for the sensor model, not measured values.
SENSOR_DEFAULT = CircuitModel(
    r_s=100.0, r_ct=10e3, c_dl=1e-6, r_asa=5e3, c_asa=0.1e-6
)

CIRCUIT_PRESETS: dict[str, CircuitModel | CalCell] = {
    "sensor-default": SENSOR_DEFAULT,
    "cal-3990": CalCell(3990.0),
    "cal-4000": CalCell(4000.0),
}


def get_preset(name: str) -> CircuitModel | CalCell:
    """Look up a named circuit preset; unknown names are a configuration error."""
    try:
        return CIRCUIT_PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(CIRCUIT_PRESETS))
        raise ConfigurationError(f"unknown circuit preset {name!r} (known: {known})")


def circuit_from_mapping(values: dict) -> CircuitModel:
    """Build a CircuitModel from the plain-text config key set.

    Expected keys (exactly): ``r_s_ohm, r_ct_ohm, c_dl_f, r_asa_ohm, c_asa_f``.
    """
    missing = [k for k in _CONFIG_KEYS if k not in values]
    if missing:
        raise ConfigurationError(f"circuit config missing keys: {', '.join(missing)}")
    extra = sorted(set(values) - set(_CONFIG_KEYS))
    if extra:
        raise ConfigurationError(f"circuit config has unknown keys: {', '.join(extra)}")
    try:
        nums = {k: float(values[k]) for k in _CONFIG_KEYS}
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"circuit config values must be numeric: {exc}")
    return CircuitModel(
        r_s=nums["r_s_ohm"],
        r_ct=nums["r_ct_ohm"],
        c_dl=nums["c_dl_f"],
        r_asa=nums["r_asa_ohm"],
        c_asa=nums["c_asa_f"],
    )


def load_circuit_file(path) -> CircuitModel:
    """Load a CircuitModel from a ``key=value`` text file."""
    from .io import read_keyvalue

    return circuit_from_mapping(read_keyvalue(path))
