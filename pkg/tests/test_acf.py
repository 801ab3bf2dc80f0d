"""Autocorrelation and ACF-driven order selection."""

import math

import numpy as np
import pytest
from scipy.signal import lfilter

from eis_kit.errors import UndefinedAcfError
from eis_kit.regarima import acf, select_order, significant_initial_lags
from eis_kit.regarima.series import SubjectSeries


def make_subject(zmod, seed=0):
    """Wrap a zmod track into a full subject with bland other tracks."""
    rng = np.random.default_rng(seed)
    n = len(zmod)
    ts = np.arange(n) * 60.0
    return SubjectSeries(
        timestamps=ts,
        zreal=zmod * 0.95,
        zimag=-0.3 * zmod,
        zmod=zmod,
        zphase=-15.0 + 0.01 * rng.standard_normal(n),
        skin_temp=33.0 + 0.01 * rng.standard_normal(n),
        rh=55.0 + 0.01 * rng.standard_normal(n),
        ref_points=((0.0, 80.0), (float(ts[-1]), 90.0)),
    )


class TestAcf:
    def test_lag_zero_is_one(self):
        rng = np.random.default_rng(0)
        result = acf(rng.standard_normal(500), 10)
        assert result.r[0] == 1.0

    def test_white_noise_coverage(self):
        # 3-sigma band: expect at least 99% of lags 1..50 inside
        rng = np.random.default_rng(42)
        result = acf(rng.standard_normal(2000), 50)
        inside = np.sum(np.abs(result.r[1:]) <= result.band)
        assert inside >= 0.99 * 50

    def test_band_is_three_over_sqrt_n(self):
        result = acf(np.sin(np.arange(400)), 5)
        assert result.band == pytest.approx(3.0 / math.sqrt(400))

    def test_ar1_analytic_oracle(self):
        # AR(1) with phi=0.8 has r_k ~= 0.8^k
        rng = np.random.default_rng(3)
        x = lfilter([1.0], [1.0, -0.8], rng.standard_normal(20_000))[1000:]
        result = acf(x, 8)
        for k in range(1, 9):
            assert result.r[k] == pytest.approx(0.8**k, abs=0.04)

    def test_constant_series_undefined(self):
        with pytest.raises(UndefinedAcfError):
            acf(np.full(100, 3.3), 5)

    def test_bad_lags(self):
        with pytest.raises(ValueError):
            acf(np.arange(10.0), 0)
        with pytest.raises(ValueError):
            acf(np.arange(10.0), 10)


class TestSelectOrder:
    def test_white_noise_floors_at_one(self):
        rng = np.random.default_rng(1)
        subject = make_subject(4000.0 + rng.standard_normal(2000))
        assert select_order(subject, max_p=10) == 1

    def test_two_subject_maximum(self):
        n = 4000
        # subject A: zmod is MA(5) (all-ones kernel), exactly 5 initial lags
        rng_a = np.random.default_rng(0)
        zmod_a = 4000.0 + 25.0 * np.convolve(
            rng_a.standard_normal(n + 5), np.ones(6), mode="valid"
        )
        a = make_subject(zmod_a)
        assert significant_initial_lags(acf(a.zmod, 20)) == 5

        # subject B: increments are MA(10), so dzmod shows 10 initial lags
        rng_b = np.random.default_rng(100)
        d = np.convolve(rng_b.standard_normal(n + 10), np.ones(11), mode="valid")
        zmod_b = 4000.0 + 0.5 * np.cumsum(d)
        b = make_subject(zmod_b)
        assert significant_initial_lags(acf(b.dzmod, 20)) == 10

        assert select_order([a, b], predictors=("zmod", "dzmod"), max_p=10) == 10

    def test_persistent_series_clamps_to_max_p(self):
        rng = np.random.default_rng(7)
        ar = np.array([0.35, 0.25, 0.1, 0.08, 0.06, 0.05, 0.03, 0.02, 0.02, 0.01, 0.01, 0.01])
        x = lfilter([1.0], np.r_[1.0, -ar], rng.standard_normal(4300))[300:]
        subject = make_subject(4000.0 + 20.0 * x)
        assert select_order(subject, predictors=("zmod",), max_p=10) == 10

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            select_order([], max_p=10)
        subject = make_subject(4000.0 + np.random.default_rng(0).standard_normal(100))
        with pytest.raises(ValueError):
            select_order(subject, max_p=0)
        with pytest.raises(KeyError):
            select_order(subject, predictors=("bogus",), max_p=5)
