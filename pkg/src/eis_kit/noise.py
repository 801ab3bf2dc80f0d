"""Four-term biosensor noise model: thermal, interface-current, kT/C, flicker.

All spectral densities are one-sided voltage PSDs in V^2/Hz and all RMS
values assume the measurement bandwidth of 1 Hz that a single-tone
impedance readout implies. The composite spectrum is the plain sum of the
four terms and each term stays individually retrievable so tests and
exports never depend on the composition.

The interface-current term is natively a current PSD (shot-noise-like,
``2*z*q*I``); it is referred to voltage by the squared magnitude of the
local interface impedance ``r_ct || 1/(j*w*c_dl)`` and shaped by a
first-order low-pass ``M(w) = 1/(1 + j*w*tau)`` standing in for the slow
ionic response. Both choices are conventions of this library, kept
explicit and toggleable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

K_BOLTZMANN = 1.380649e-23  # J/K, exact SI value
ELEMENTARY_CHARGE = 1.602176634e-19  # C, exact SI value


@dataclass(frozen=True)
class NoiseBudget:
    """Parameter set for the four noise sources.

    Defaults form the shipped reference budget: flicker-dominated, tuned so
    the total RMS at 100 Hz sits near 1% of a 10 mV RMS excitation (inside
    the 0.35%..2% band expected of a non-functionalized sensor).

    Individual terms can be disabled: ``r_thermal=0`` (thermal),
    ``i_bias=0`` (interface), ``c_asa=inf`` (kT/C), ``k_flicker=0``
    (flicker). ``bandwidth`` is fixed at 1 Hz by model assumption.
    """

    temperature: float = 300.0  # K
    r_thermal: float = 5100.0  # ohm; solution + film resistance in series
    c_asa: float = 0.1e-6  # F, shunting the semiconducting film
    k_flicker: float = 1e-18  # process parameter of the 1/f term
    w_gate: float = 100e-6  # m
    l_gate: float = 100e-6  # m
    c_ox: float = 1e-4  # F per unit area
    z_valence: int = 1
    q_charge: float = ELEMENTARY_CHARGE  # C
    i_bias: float = 1e-6  # A
    m_omega_tau: float = 1e-3  # s, time constant of M(w)
    r_ct: float = 10e3  # ohm
    c_dl: float = 1e-6  # F
    bandwidth: float = 1.0  # Hz, fixed

    def __post_init__(self):
        if not self.temperature > 0.0:
            raise ValueError(f"temperature must be > 0 K, got {self.temperature!r}")
        if self.bandwidth != 1.0:
            raise ValueError("bandwidth is fixed at 1 Hz for single-tone readout")
        for name in (
            "r_thermal",
            "c_asa",
            "k_flicker",
            "w_gate",
            "l_gate",
            "c_ox",
            "z_valence",
            "q_charge",
            "i_bias",
            "m_omega_tau",
            "r_ct",
            "c_dl",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def rms_voltage(self, f: float) -> float:
        """Total RMS noise voltage at ``f`` over the 1 Hz bandwidth."""
        return math.sqrt(composite_noise_psd(self, f) * self.bandwidth)


class NoiseTerms(NamedTuple):
    """Per-source voltage PSDs (V^2/Hz) at one frequency."""

    thermal: float
    interface: float
    ktc: float
    flicker: float

    @property
    def total(self) -> float:
        return self.thermal + self.interface + self.ktc + self.flicker


def thermal_noise_rms(r: float, t: float) -> float:
    """RMS thermal (Johnson) noise voltage sqrt(4*k*T*R), 1 Hz bandwidth."""
    if r < 0.0:
        raise ValueError(f"resistance must be non-negative, got {r!r}")
    if not t > 0.0:
        raise ValueError(f"temperature must be positive, got {t!r}")
    return math.sqrt(4.0 * K_BOLTZMANN * t * r)


def ktc_noise_rms(c: float, t: float) -> float:
    """RMS noise voltage sqrt(k*T/C) of a capacitor-shunted resistive source."""
    if not c > 0.0:
        raise ValueError(f"capacitance must be positive, got {c!r}")
    if not t > 0.0:
        raise ValueError(f"temperature must be positive, got {t!r}")
    return math.sqrt(K_BOLTZMANN * t / c)


def flicker_noise_rms(k_flicker: float, w: float, l: float, c_ox: float, f: float) -> float:
    """RMS 1/f noise voltage sqrt(K/(W*L*Cox) * 1/f), 1 Hz bandwidth."""
    if not f > 0.0:
        raise ValueError(f"frequency must be positive, got {f!r}")
    if k_flicker < 0.0:
        raise ValueError(f"k_flicker must be non-negative, got {k_flicker!r}")
    area_cap = w * l * c_ox
    if not area_cap > 0.0:
        raise ValueError(f"w*l*c_ox must be positive, got {area_cap!r}")
    return math.sqrt(k_flicker / area_cap / f)


def _interface_psd(b: NoiseBudget, f: float) -> float:
    # Current PSD 2*z*q*I shaped by |M(w)|, referred to voltage by |Zrc|^2.
    if b.i_bias == 0.0 or b.z_valence == 0:
        return 0.0
    omega = 2.0 * math.pi * f
    m_mag = 1.0 / math.hypot(1.0, omega * b.m_omega_tau)
    if b.r_ct == 0.0:
        return 0.0
    z_rc = 1.0 / complex(1.0 / b.r_ct, omega * b.c_dl)
    return 2.0 * b.z_valence * b.q_charge * b.i_bias * m_mag * abs(z_rc) ** 2


def composite_noise_terms(b: NoiseBudget, f: float) -> NoiseTerms:
    """Evaluate the four voltage-PSD terms of the budget at ``f`` (Hz)."""
    if not f > 0.0:
        raise ValueError(f"frequency must be positive, got {f!r}")
    thermal = 4.0 * K_BOLTZMANN * b.temperature * b.r_thermal
    interface = _interface_psd(b, f)
    ktc = K_BOLTZMANN * b.temperature / b.c_asa if b.c_asa > 0.0 else 0.0
    if math.isinf(b.c_asa):
        ktc = 0.0
    if b.k_flicker == 0.0:
        flicker = 0.0
    else:
        flicker = flicker_noise_rms(b.k_flicker, b.w_gate, b.l_gate, b.c_ox, f) ** 2
    return NoiseTerms(thermal=thermal, interface=interface, ktc=ktc, flicker=flicker)


def composite_noise_psd(b: NoiseBudget, f: float) -> float:
    """Composite voltage PSD: plain sum of the four terms at ``f``."""
    return composite_noise_terms(b, f).total


def noise_settling_series(
    b: NoiseBudget,
    f_grid,
    t_points,
    decay_tau: float,
    excess: float = 1.0,
) -> np.ndarray:
    """RMS noise spectra over time while the wetted surface equilibrates.

    The baseline spectrum is scaled by ``(1 + excess*exp(-t/decay_tau))``
    so the RMS at any fixed frequency decays strictly toward the
    equilibrium value while the 1/f shape over frequency is preserved.

    Returns a ``(len(t_points), len(f_grid))`` array of RMS volts.
    """
    f_grid = np.asarray(f_grid, dtype=float)
    t_points = np.asarray(t_points, dtype=float)
    if f_grid.size == 0 or t_points.size == 0:
        raise ValueError("f_grid and t_points must be non-empty")
    if np.any(np.diff(t_points) <= 0.0):
        raise ValueError("t_points must be strictly increasing")
    if not decay_tau > 0.0:
        raise ValueError(f"decay_tau must be positive, got {decay_tau!r}")
    if excess < 0.0:
        raise ValueError(f"excess must be non-negative, got {excess!r}")
    base = np.array([math.sqrt(composite_noise_psd(b, f) * b.bandwidth) for f in f_grid])
    scale = 1.0 + excess * np.exp(-t_points / decay_tau)
    return scale[:, None] * base[None, :]


_BUDGET_KEYS = {
    "temperature_k": "temperature",
    "r_thermal_ohm": "r_thermal",
    "c_asa_f": "c_asa",
    "k_flicker": "k_flicker",
    "w_gate_m": "w_gate",
    "l_gate_m": "l_gate",
    "c_ox_f_per_m2": "c_ox",
    "z_valence": "z_valence",
    "i_bias_a": "i_bias",
    "m_omega_tau_s": "m_omega_tau",
    "r_ct_ohm": "r_ct",
    "c_dl_f": "c_dl",
}


def budget_from_mapping(values: dict) -> NoiseBudget:
    """Build a NoiseBudget from ``key=value`` text config entries.

    Unknown keys are a configuration error; omitted keys keep the
    reference-budget defaults.
    """
    from .errors import ConfigurationError

    kwargs = {}
    for key, raw in values.items():
        if key not in _BUDGET_KEYS:
            known = ", ".join(sorted(_BUDGET_KEYS))
            raise ConfigurationError(f"unknown noise budget key {key!r} (known: {known})")
        field = _BUDGET_KEYS[key]
        try:
            value = int(raw) if field == "z_valence" else float(raw)
        except (TypeError, ValueError):
            raise ConfigurationError(f"noise budget value for {key!r} must be numeric")
        kwargs[field] = value
    try:
        return NoiseBudget(**kwargs)
    except ValueError as exc:
        raise ConfigurationError(str(exc))


def load_budget_file(path) -> NoiseBudget:
    """Load a NoiseBudget from a ``key=value`` text file."""
    from .io import read_keyvalue

    return budget_from_mapping(read_keyvalue(path))
