import math

import numpy as np
import pytest

from wiwi.clock import ClockNoiseConfig, ClockState, advance, lo_phase, lo_phase_excess, read_time

F_C = 2.4e9


class TestAdvance:
    def test_linear_drift(self):
        st = ClockState(rate=1e-11)
        st = advance(st, 100.0)
        assert st.offset == pytest.approx(1.0e-9, rel=1e-12)

    def test_zero_rate_identity(self):
        st = ClockState(offset=3e-9)
        for dt in (0.1, 5.0, 1234.5):
            assert advance(st, dt).offset == 3e-9

    def test_six_minute_rubidium_scale_drift(self):
        # rate 2.8e-12 over 360 s gives the ~1 ns/6 min wander scale
        st = advance(ClockState(rate=2.8e-12), 360.0)
        assert st.offset == pytest.approx(1.008e-9, rel=1e-9)

    @pytest.mark.parametrize("dt", [0.0, -1.0, math.nan, math.inf])
    def test_bad_dt_rejected(self, dt):
        with pytest.raises(ValueError):
            advance(ClockState(), dt)

    def test_determinism(self):
        cfg = ClockNoiseConfig(white_fm_sigma=1e-11, rw_fm_sigma=1e-12, seed=42)
        a = ClockState(noise_cfg=cfg)
        b = ClockState(noise_cfg=cfg)
        for _ in range(50):
            a = advance(a, 0.1)
            b = advance(b, 0.1)
        assert a.offset == b.offset
        assert a.rw_state == b.rw_state

    def test_states_are_values(self):
        st = ClockState(noise_cfg=ClockNoiseConfig(white_fm_sigma=1e-11, seed=1))
        st2 = advance(st, 0.1)
        assert st.offset == 0.0
        assert st2 is not st

    def test_white_fm_scaling(self):
        # doubling white_fm_sigma doubles the offset-increment std (+-10%)
        def increments(sigma, n=10000):
            out = np.empty(n)
            for i in range(n):
                st = ClockState(noise_cfg=ClockNoiseConfig(white_fm_sigma=sigma, seed=i))
                out[i] = advance(st, 0.1).offset
            return out

        s1 = np.std(increments(1e-11))
        s2 = np.std(increments(2e-11))
        assert s2 / s1 == pytest.approx(2.0, rel=0.10)
        assert s1 == pytest.approx(1e-11 * math.sqrt(0.1), rel=0.10)

    def test_rw_fm_accumulates_in_rate(self):
        st = ClockState(noise_cfg=ClockNoiseConfig(rw_fm_sigma=1e-12, seed=3))
        st = advance(st, 1.0)
        assert st.rw_state != 0.0

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            ClockNoiseConfig(white_fm_sigma=-1.0)


class TestReadTime:
    def test_perfect_clock(self):
        assert read_time(ClockState(), 12.5) == 12.5

    def test_clock_difference_by_construction(self):
        a = ClockState(offset=0.0)
        b = ClockState(offset=2e-9)
        t_c = read_time(b, 5.0) - read_time(a, 5.0)
        assert t_c == pytest.approx(2e-9)

    def test_opposite_offsets(self):
        a = ClockState(offset=-1e-9)
        b = ClockState(offset=1e-9)
        assert read_time(b, 0.0) - read_time(a, 0.0) == pytest.approx(2e-9)


class TestLoPhase:
    def test_one_carrier_cycle(self):
        st = ClockState()
        assert lo_phase(st, 1.0 / F_C, F_C) == pytest.approx(2 * math.pi)

    def test_half_cycle_offset(self):
        st = ClockState(offset=0.5 / F_C)
        assert lo_phase(st, 0.0, F_C) == pytest.approx(math.pi)

    def test_pi_from_208ps_drift(self):
        # 2*pi*f_c*dt for dt = 1/(2 f_c) = 0.2083 ns is exactly pi
        dt = 1.0 / (2.0 * F_C)
        assert dt == pytest.approx(0.20833e-9, rel=1e-4)
        delta = lo_phase(ClockState(offset=dt), 0.0, F_C) - lo_phase(ClockState(), 0.0, F_C)
        assert delta == pytest.approx(math.pi)

    def test_bad_frequency(self):
        with pytest.raises(ValueError):
            lo_phase(ClockState(), 0.0, 0.0)

    def test_noiseless_phase_difference_exact(self):
        a = ClockState(offset=1.25e-9, phase0=0.3)
        b = ClockState(offset=-0.5e-9, phase0=1.1)
        t = 17.0
        delta = lo_phase(a, t, F_C) - lo_phase(b, t, F_C)
        expected = 2 * math.pi * F_C * (a.offset - b.offset) + (a.phase0 - b.phase0)
        # the raw difference carries rounding of the ~1e11 rad common term
        assert delta == pytest.approx(expected, abs=1e-3)
        # the excess form carries the same difference without the huge common term
        excess = lo_phase_excess(a, F_C) - lo_phase_excess(b, F_C)
        assert excess == pytest.approx(expected, abs=1e-12)
