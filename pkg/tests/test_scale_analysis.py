import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shockflow.errors import InputError, NoOscillatoryMode, NoTroughFound, ZeroVarianceSource
from shockflow.hht import IMFSet, emd_decompose
from shockflow.scale_analysis import (
    Shape, analyze_series, dominance_table, select_dominant, shock_recovery_timescales,
)


def imf_set(*imfs, n=None):
    n = n or len(imfs[0])
    return IMFSet(tuple(np.asarray(m, dtype=float) for m in imfs), np.zeros(n), n)


class TestDominance:
    def test_single_imf(self):
        x = np.sin(np.arange(64) / 3)
        table = dominance_table(x, imf_set(x))
        assert table.dominant_index == 1
        assert table.dominant.nu == pytest.approx(1.0)

    def test_selects_largest_correlation(self):
        assert select_dominant([0.1456, 0.0576, 0.4219, 0.7394]) == 4

    def test_tie_goes_to_lower_frequency(self):
        assert select_dominant([0.5, 0.9, 0.9, 0.1]) == 3

    def test_empty(self):
        with pytest.raises(NoOscillatoryMode):
            select_dominant([])

    @pytest.mark.parametrize("seed", range(8))
    def test_low_frequency_mode_wins(self, seed):
        t = np.arange(512)
        slow = np.sin(2 * np.pi * t / 128)
        x = slow + 0.02 * np.random.default_rng(seed).standard_normal(512)
        imfs = emd_decompose(x)
        table = dominance_table(x, imfs)
        dom = imfs.imfs[table.dominant_index - 1]
        assert table.dominant.nu >= 0.9
        assert np.corrcoef(dom, slow)[0, 1] >= 0.9

    def test_values_match_numpy(self):
        x = np.random.default_rng(3).standard_normal(200).cumsum()
        imfs = emd_decompose(x)
        table = dominance_table(x, imfs)
        for row, imf in zip(table.rows, imfs.imfs):
            assert row.nu == pytest.approx(np.corrcoef(x, imf)[0, 1], abs=1e-12)
            assert row.sigma2 == pytest.approx(np.var(imf), rel=1e-12)

    def test_constant_source(self):
        with pytest.raises(ZeroVarianceSource):
            dominance_table(np.ones(16), imf_set(np.sin(np.arange(16))))

    def test_no_imfs(self):
        with pytest.raises(NoOscillatoryMode):
            dominance_table(np.arange(16.0), IMFSet((), np.arange(16.0), 16))

    def test_length_must_match(self):
        with pytest.raises(InputError):
            dominance_table(np.arange(10.0), imf_set(np.sin(np.arange(16))))

    @settings(max_examples=40, deadline=None)
    @given(st.floats(1e-3, 1e3), st.floats(-1e3, 1e3), st.integers(0, 2**31))
    def test_affine_invariance(self, a, b, seed):
        x = np.random.default_rng(seed).standard_normal(256).cumsum()
        imfs = emd_decompose(x)
        if not len(imfs):
            return
        base = dominance_table(x, imfs)
        moved = dominance_table(a * x + b, imfs)
        assert moved.dominant_index == base.dominant_index
        for r, s in zip(base.rows, moved.rows):
            assert s.nu == pytest.approx(r.nu, abs=1e-9)

    @given(st.lists(st.floats(-1, 1), min_size=1, max_size=20))
    def test_dominant_is_a_maximum(self, nus):
        k = select_dominant(nus)
        assert nus[k - 1] == max(nus)
        assert all(v < max(nus) for v in nus[k:])


class TestTimescales:
    def test_symmetric_v(self):
        x = np.abs(np.arange(101) - 50.0)
        est = shock_recovery_timescales(x)
        assert (est.shock_days, est.recovery_days) == (50, 50)
        assert est.shape is Shape.V_SHAPE

    def test_sawtooth(self):
        x = np.r_[np.zeros(10), np.linspace(0, -20, 21)[1:], np.linspace(-20, 0, 41)[1:], np.zeros(10)]
        est = shock_recovery_timescales(x)
        assert (est.shock_days, est.recovery_days) == (20, 40)
        assert est.shape is Shape.V_SHAPE and est.recovered

    def test_no_recovery(self):
        x = np.r_[np.ones(10), np.linspace(1, -1, 20), np.linspace(-1, 0, 20)]
        est = shock_recovery_timescales(x)
        assert not est.recovered and est.shape is Shape.L_SHAPE
        assert est.trough_day + est.recovery_days == len(x) - 1

    def test_hint_skips_earlier_minimum(self):
        x = np.r_[5, 0, 5, 5, 4, 3, 2, 3, 4, 5, 6.0]
        assert shock_recovery_timescales(x).trough_day == 1
        est = shock_recovery_timescales(x, shock_start_hint=3)
        assert est.trough_day == 6 and est.peak_day == 3
        assert (est.shock_days, est.recovery_days) == (3, 3)

    @pytest.mark.parametrize("x", [np.arange(20.0), -np.arange(20.0), np.ones(20)])
    def test_monotonic(self, x):
        with pytest.raises(NoTroughFound):
            shock_recovery_timescales(x)

    def test_no_descent_after_hint(self):
        x = np.r_[3, 2, 1, 0, 1, 2, 3, 4.0]
        with pytest.raises(NoTroughFound):
            shock_recovery_timescales(x, shock_start_hint=4)

    def test_hint_out_of_range(self):
        with pytest.raises(InputError):
            shock_recovery_timescales(np.abs(np.arange(20) - 10.0), 30)

    @settings(max_examples=100)
    @given(st.integers(1, 60), st.integers(1, 60), st.integers(0, 20), st.floats(0.1, 100))
    def test_piecewise_linear_v(self, fall, rise, flat, depth):
        x = np.r_[np.zeros(flat + 1), np.linspace(0, -depth, fall + 1)[1:],
                  np.linspace(-depth, 0, rise + 1)[1:], np.zeros(3)]
        if len(x) < 8:
            return
        est = shock_recovery_timescales(x)
        assert est.shock_days == fall
        assert est.recovery_days == rise
        assert est.shape is Shape.V_SHAPE


class TestAnalyzeSeries:
    def test_end_to_end(self):
        t = np.arange(400)
        x = 2 * np.sin(2 * np.pi * t / 200) + 0.1 * np.sin(2 * np.pi * t / 9)
        out = analyze_series(x, shock_start_hint=50)
        assert len(out.mean_periods) == len(out.imfs)
        assert out.table.dominant.nu > 0.9
        assert out.timescales.trough_day == pytest.approx(150, abs=5)

    def test_ramp(self):
        with pytest.raises(NoOscillatoryMode):
            analyze_series(np.linspace(0, 1, 50))
