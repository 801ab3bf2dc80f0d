"""Single-bin DFT, ratiometric measurement, TDM sweeps, error injection."""

import cmath
import math

import numpy as np
import pytest

from eis_kit.circuit import CalCell, CircuitModel, SENSOR_DEFAULT, impedance_at
from eis_kit.dft import (
    AnalyzerConfig,
    RatiometricAnalyzer,
    measure_ratiometric,
    single_bin_dft,
    tdm_sweep,
)
from eis_kit.errors import ConfigurationError, MeasurementUnderflowError


def brute_force_bin(x, k):
    """Independent oracle: direct summation of the DFT definition."""
    n = len(x)
    return sum(x[j] * cmath.exp(-2j * math.pi * j * k / n) for j in range(n))


class TestSingleBinDft:
    def test_cosine_at_bin_m(self):
        n, m = 256, 9
        x = np.cos(2 * np.pi * np.arange(n) * m / n)
        value = single_bin_dft(x, m)
        assert value.real == pytest.approx(n / 2, rel=1e-12)
        assert value.imag == pytest.approx(0.0, abs=1e-9)

    def test_all_zero_input(self):
        assert single_bin_dft(np.zeros(64), 5) == 0

    def test_matches_brute_force_oracle_every_bin(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal(64)
        for k in range(32):
            ref = brute_force_bin(x, k)
            got = single_bin_dft(x, k)
            assert abs(got - ref) <= 1e-9 * max(abs(ref), 1.0)

    def test_bin_out_of_range(self):
        with pytest.raises(IndexError):
            single_bin_dft(np.zeros(64), 32)
        with pytest.raises(IndexError):
            single_bin_dft(np.zeros(64), -1)


class TestAnalyzerConfig:
    def test_coherent_rate_derivation(self):
        cfg = AnalyzerConfig()  # request 16 kHz, 100 Hz excitation, 2048-point
        # nearest integer bin to 100*2048/16000 = 12.8 is 13
        assert cfg.excite_bin == 13
        assert cfg.fs_sample == pytest.approx(100.0 * 2048 / 13)
        # coherence invariant: excitation lands exactly on a bin
        assert cfg.f_excite * cfg.n_dft / cfg.fs_sample == pytest.approx(13.0)

    def test_bin_for_alignment(self):
        cfg = AnalyzerConfig(fs_sample=40960.0)  # 20 Hz bins
        assert cfg.excite_bin == 5
        assert cfg.bin_for(80.0) == 4
        assert cfg.bin_for(1000.0) == 50
        with pytest.raises(ConfigurationError):
            cfg.bin_for(90.0)

    def test_invalid_configs(self):
        with pytest.raises(ConfigurationError):
            AnalyzerConfig(n_dft=8)
        with pytest.raises(ConfigurationError):
            AnalyzerConfig(n_channels=0)
        with pytest.raises(ConfigurationError):
            AnalyzerConfig(t_conversion=0.0)
        with pytest.raises(ConfigurationError):
            AnalyzerConfig(fs_sample=150.0)  # excitation above Nyquist


def ideal_config(**kwargs):
    kwargs.setdefault("rng_seed", 0)
    return AnalyzerConfig(fs_sample=40960.0, **kwargs)


class TestMeasureRatiometric:
    def test_self_ratio_identity(self):
        m = measure_ratiometric(ideal_config(), CalCell(3990.0), CalCell(3990.0))
        assert m.zmod == pytest.approx(3990.0, rel=1e-3)
        assert m.zphase == pytest.approx(0.0, abs=1e-6)

    def test_gain_offset_produces_systematic_negative_shift(self):
        cfg = ideal_config(gain_offset_pct=-1.25)
        m = measure_ratiometric(cfg, CalCell(3990.0), CalCell(4000.0))
        assert m.zmod == pytest.approx(3950.0, abs=0.5)

    def test_closed_loop_recovers_analytic_impedance(self):
        cfg = ideal_config()
        m = measure_ratiometric(cfg, CalCell(3990.0), SENSOR_DEFAULT)
        z_true = impedance_at(SENSOR_DEFAULT, cfg.f_excite)
        assert m.zmod == pytest.approx(abs(z_true), rel=1e-3)
        assert m.zphase == pytest.approx(math.degrees(cmath.phase(z_true)), abs=0.1)

    def test_error_composition(self):
        # gain sweep with zero jitter: zmod = true * (1 + g/100)
        for g in (-5.0, -1.25, 0.0, 2.0):
            m = measure_ratiometric(
                ideal_config(gain_offset_pct=g), CalCell(3990.0), CalCell(1000.0)
            )
            assert m.zmod == pytest.approx(1000.0 * (1 + g / 100.0), rel=1e-6)
        # jitter with zero gain: zmod = true + fixed channel error
        cfg = ideal_config(channel_jitter_ohm=50.0, rng_seed=5)
        analyzer = RatiometricAnalyzer(cfg, CalCell(3990.0))
        for channel in range(cfg.n_channels):
            m = analyzer.measure(CalCell(1000.0), channel=channel)
            expected = 1000.0 + analyzer.channel_errors[channel]
            assert m.zmod == pytest.approx(expected, rel=1e-9)

    def test_channel_errors_fixed_per_instance(self):
        cfg = ideal_config(channel_jitter_ohm=80.0, rng_seed=9)
        analyzer = RatiometricAnalyzer(cfg, CalCell())
        first = [analyzer.measure(CalCell(2000.0), channel=c).zmod for c in range(4)]
        again = [analyzer.measure(CalCell(2000.0), channel=c).zmod for c in range(4)]
        assert first == again

    def test_underflow(self):
        # DUT impedance so large the bin current vanishes numerically
        huge = CalCell(1e30)
        with pytest.raises(MeasurementUnderflowError):
            measure_ratiometric(ideal_config(), CalCell(3990.0), huge)


class TestTdmSweep:
    def test_counts_and_total_time(self):
        cfg = ideal_config()
        freqs = [20.0 * k for k in (4, 5, 10, 15, 20, 25, 30, 40, 45, 50)]
        out = tdm_sweep(cfg, [SENSOR_DEFAULT] * 4, freqs)
        assert len(out) == 40
        assert out[-1].timestamp == pytest.approx(40 * 0.013)

    def test_single_measurement_timestamp(self):
        out = tdm_sweep(ideal_config(n_channels=1), [SENSOR_DEFAULT], [100.0])
        assert len(out) == 1
        assert out[0].timestamp == pytest.approx(0.013)

    def test_identical_duts_zero_jitter_symmetry(self):
        out = tdm_sweep(ideal_config(), [SENSOR_DEFAULT] * 4, [100.0])
        mods = {m.zmod for m in out}
        assert len(out) == 4
        assert max(mods) - min(mods) < 1e-9

    def test_round_robin_channel_order(self):
        out = tdm_sweep(ideal_config(), [SENSOR_DEFAULT] * 4, [100.0, 200.0])
        assert [m.channel for m in out] == [0, 1, 2, 3, 0, 1, 2, 3]
        assert [m.freq_hz for m in out] == [100.0] * 4 + [200.0] * 4

    def test_non_aligned_frequency_rejected(self):
        with pytest.raises(ConfigurationError):
            tdm_sweep(ideal_config(), [SENSOR_DEFAULT], [93.7])

    def test_too_many_duts(self):
        with pytest.raises(ConfigurationError):
            tdm_sweep(ideal_config(), [SENSOR_DEFAULT] * 5, [100.0])
        with pytest.raises(ConfigurationError):
            tdm_sweep(ideal_config(), [], [100.0])
