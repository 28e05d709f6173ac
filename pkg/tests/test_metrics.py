import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from afcecho.comb import CombSpec, Sampled, fourier_a
from afcecho.metrics import (
    DomainError,
    UndefinedSNRError,
    background_upper_limit,
    efficiency,
    fidelity_from_snr,
    gain_condition,
    metric_point,
    optimal_cloning_fidelity,
    snr,
    square_efficiency,
    square_snr,
    zero_background_limits,
)

GRID = [(float(b), float(chi), float(f))
        for b in np.linspace(0, 0.9, 20)
        for chi in np.linspace(0, 1, 20)
        for f in np.linspace(2, 12, 20)]


class TestEfficiency:
    def test_published_values(self):
        assert efficiency(CombSpec(0, 2, 1)) == pytest.approx(1.621, abs=1e-3)
        assert efficiency(CombSpec(0, 1e6, 1)) == pytest.approx(4.0, abs=1e-5)
        assert efficiency(CombSpec(0, 3, 1)) == pytest.approx(2.7357, abs=1e-4)

    def test_no_comb_no_echo(self):
        for chi in (0, 0.5, 1):
            assert efficiency(CombSpec(1, 4, chi)) == 0

    def test_closed_form_consistency(self):
        for b, chi, f in GRID:
            spec = CombSpec(b, f, chi)
            assert efficiency(spec) == pytest.approx(square_efficiency(b, chi, f), rel=1e-12, abs=1e-300)
            if chi > 0:
                assert snr(spec) == pytest.approx(square_snr(b, chi, f), rel=1e-12)

    def test_chi_scaling(self):
        for b, chi, f in GRID:
            base = efficiency(CombSpec(b, f, 0))
            if base > 0:
                assert efficiency(CombSpec(b, f, chi)) / base == pytest.approx((1 + chi) ** 2, rel=1e-12)


class TestSNR:
    def test_values(self):
        assert snr(CombSpec(0, 2, 1)) == pytest.approx(16 / math.pi**2, rel=1e-14)
        x = math.pi / 3
        assert snr(CombSpec(0, 3, 1)) == pytest.approx(2 * (math.sin(x) / x) ** 2, rel=1e-14)

    def test_infinite_without_excited_population(self):
        assert snr(CombSpec(0.3, 5, 0)) == math.inf

    def test_zero_without_echo(self):
        assert snr(CombSpec(1, 5, 0.5)) == 0.0

    def test_undefined(self):
        with pytest.raises(UndefinedSNRError):
            snr(CombSpec(1, 5, 0))

    @pytest.mark.parametrize("b,f", [(0, 2), (0.2, 3.5), (0.6, 9)])
    def test_decreasing_in_chi(self, b, f):
        vals = [snr(CombSpec(b, f, chi)) for chi in np.linspace(0.01, 1, 100)]
        assert all(v2 < v1 for v1, v2 in zip(vals, vals[1:]))

    @given(chi=st.floats(0.01, 1), f=st.floats(2, 40))
    def test_zero_background_relation(self, chi, f):
        spec = CombSpec(0, f, chi)
        a0 = fourier_a(0, spec).a_n
        assert snr(spec) == pytest.approx(efficiency(spec) * a0 / (chi * (f - a0)), rel=1e-12)


class TestFidelity:
    def test_values(self):
        assert fidelity_from_snr(math.inf) == 1.0
        assert fidelity_from_snr(1.0) == pytest.approx(2 / 3)
        assert fidelity_from_snr(0.0) == 0.5

    def test_domain(self):
        with pytest.raises(DomainError):
            fidelity_from_snr(-0.1)

    @given(s1=st.floats(0, 1e9), s2=st.floats(0, 1e9))
    def test_monotone(self, s1, s2):
        lo, hi = sorted((s1, s2))
        assert fidelity_from_snr(lo) <= fidelity_from_snr(hi)

    def test_optimal_cloner(self):
        assert optimal_cloning_fidelity(1.0) == 1.0
        assert optimal_cloning_fidelity(2.7357) == pytest.approx(0.7204, abs=1e-4)
        assert optimal_cloning_fidelity(1e9) == pytest.approx(2 / 3, abs=1e-9)
        with pytest.raises(DomainError):
            optimal_cloning_fidelity(0.99)

    def test_fidelity_below_optimal_cloner(self):
        for b, chi, f in GRID:
            mp = metric_point(CombSpec(b, f, chi))
            assert 0.5 <= mp.fidelity <= 1.0
            if mp.eta >= 1:
                assert mp.fidelity <= mp.f_opt + 1e-12


class TestMetricPoint:
    def test_showcase(self):
        mp = metric_point(CombSpec(0, 3, 1))
        assert mp.eta == pytest.approx(2.7357, abs=1e-4)
        assert mp.snr == pytest.approx(1.367836, abs=1e-6)
        assert mp.fidelity == pytest.approx(0.703073, abs=1e-6)
        assert mp.f_opt == pytest.approx(0.7204, abs=1e-4)
        assert mp.in_cloning_region

    def test_memory_only(self):
        mp = metric_point(CombSpec(0, 10, 0))
        x = math.pi / 10
        assert mp.eta == pytest.approx((math.sin(x) / x) ** 2, rel=1e-14)
        assert mp.snr == math.inf and mp.fidelity == 1.0
        assert mp.f_opt is None and not mp.in_cloning_region

    def test_background_kills_gain(self):
        assert not metric_point(CombSpec(0.5, 10, 1)).in_cloning_region

    def test_undefined_flag(self):
        mp = metric_point(CombSpec(1, 5, 0))
        assert mp.eta == 0 and mp.snr is None and mp.fidelity is None
        assert "undefined-snr" in mp.warnings

    def test_low_finesse_flag_propagates(self):
        mp = metric_point(CombSpec(0, 1.8, 1, allow_low_finesse=True))
        assert "finesse-below-2" in mp.warnings

    def test_sampled_tooth(self):
        tri = Sampled((-1.0, 0.0, 1.0), (0.0, 1.0, 0.0))
        spec = CombSpec(0.1, 4, 0.5, tri)
        a0, a1 = fourier_a(0, spec).a_n, fourier_a(1, spec).a_n
        expect = (1.5 * 0.9 * a1 / (0.4 + 0.9 * a0)) ** 2
        assert efficiency(spec) == pytest.approx(expect, rel=1e-12)


class TestBounds:
    def test_gain_condition(self):
        assert gain_condition(CombSpec(1 / 3, 2, 1))
        assert not gain_condition(CombSpec(0.4, 2, 1))
        for chi in (0.01, 0.5, 1):
            for f in (2, 7, 50):
                assert gain_condition(CombSpec(0, f, chi))

    def test_gain_condition_is_necessary(self):
        for b, chi, f in GRID:
            spec = CombSpec(b, f, chi)
            if efficiency(spec) >= 1:
                assert gain_condition(spec)

    def test_background_upper_limit(self):
        assert background_upper_limit(1, 2) == 1 / 3
        assert background_upper_limit(1, 4) == pytest.approx(0.2)
        assert background_upper_limit(0.5, 2) == pytest.approx(0.2)
        assert background_upper_limit(0, 2) == 0

    def test_zero_background_limits(self):
        assert zero_background_limits(1, 1, 1, 1e6)[0] == 4
        assert zero_background_limits(0, 1, 1, 5) == (1, math.inf)
        eta, s = zero_background_limits(1, 1, 2 / math.pi, 2)
        assert eta == pytest.approx(16 / math.pi**2) and s == pytest.approx(16 / math.pi**2)

    @given(chi=st.floats(0, 1), f=st.floats(2, 60))
    def test_zero_background_matches_general(self, chi, f):
        spec = CombSpec(0, f, chi)
        eta, s = zero_background_limits(chi, fourier_a(0, spec).a_n, fourier_a(1, spec).a_n, f)
        assert eta == pytest.approx(efficiency(spec), rel=1e-12)
        if chi == 0:
            assert s == math.inf == snr(spec)
        else:
            assert s == pytest.approx(snr(spec), rel=1e-12)
