import math

import numpy as np
import pytest

from phasecal.config import ChainParams, ComplexSignal
from phasecal.impairments import (
    ChainImpairmentState,
    advance_oscillator,
    apply_tx_impairments,
    chain_drift,
    drift_phase,
    linear_drift_phase,
    oscillator_trajectory,
)
from phasecal.waveform import FrameSchedule, build_frame, generate_chirp


def make_state(rng_seed=0, **params):
    return ChainImpairmentState.from_params(
        ChainParams(**params), chain_index=0, rng=np.random.default_rng(rng_seed)
    )


class TestAdvanceOscillator:
    def test_noiseless_oscillator_is_static(self):
        st = make_state(wiener_rate_rad2_per_s=0.0)
        advance_oscillator(st, 123.0)
        assert st.current_osc_phase_rad == 0.0

    def test_zero_interval_is_noop(self):
        st = make_state(wiener_rate_rad2_per_s=1.0)
        advance_oscillator(st, 0.0)
        assert st.current_osc_phase_rad == 0.0

    def test_rejects_negative_interval(self):
        with pytest.raises(ValueError):
            advance_oscillator(make_state(), -1.0)

    def test_increment_variance(self):
        # 1e5 seeded increments of var wiener_rate*dt = 1e-4 * 0.05 = 5e-6.
        st = make_state(rng_seed=42, wiener_rate_rad2_per_s=1e-4)
        phases = np.empty(100000)
        prev = 0.0
        for i in range(100000):
            advance_oscillator(st, 0.05)
            phases[i] = st.current_osc_phase_rad - prev
            prev = st.current_osc_phase_rad
        assert np.var(phases) == pytest.approx(5e-6, rel=0.05)


class TestOscillatorTrajectory:
    def test_noiseless_is_constant(self):
        st = make_state()
        st.current_osc_phase_rad = 0.75
        path = oscillator_trajectory(st, 128, 1e6)
        assert np.array_equal(path, np.full(128, 0.75))

    def test_white_floor_variance(self):
        st = make_state(rng_seed=7, white_phase_var_rad2=1e-6)
        path = oscillator_trajectory(st, 1_000_000, 1e6)
        assert np.var(path) == pytest.approx(1e-6, rel=0.01)
        # White noise never moves the stored walk state.
        assert st.current_osc_phase_rad == 0.0

    def test_walk_end_variance(self):
        # var = rate * n / fs = 4e-2 * 1500 / 4e6 = 1.5e-5 over seeded runs.
        ends = np.empty(10000)
        for i in range(10000):
            st = make_state(rng_seed=1000 + i, wiener_rate_rad2_per_s=4e-2)
            ends[i] = oscillator_trajectory(st, 1500, 4e6)[-1]
        assert np.var(ends) == pytest.approx(1.5e-5, rel=0.05)

    def test_variance_grows_linearly_in_time(self):
        # Slope of end-variance vs elapsed time must match the rate.
        rate, fs = 2e-3, 1e5
        lengths = [250, 500, 1000, 2000]
        variances = []
        for n in lengths:
            ends = np.empty(4000)
            for i in range(4000):
                st = make_state(rng_seed=5000 + i, wiener_rate_rad2_per_s=rate)
                ends[i] = oscillator_trajectory(st, n, fs)[-1]
            variances.append(np.var(ends))
        times = np.array(lengths) / fs
        slope = np.polyfit(times, variances, 1)[0]
        assert slope == pytest.approx(rate, rel=0.05)

    def test_advances_state_to_path_end(self):
        st = make_state(rng_seed=3, wiener_rate_rad2_per_s=1e-3)
        path = oscillator_trajectory(st, 64, 1e4)
        assert st.current_osc_phase_rad == path[-1]


class TestDrift:
    def test_zero_time(self):
        assert drift_phase(0.0, 1.4, 10.0) == 0.0

    def test_asymptote(self):
        assert drift_phase(50 * 7.0, 1.4, 7.0) == pytest.approx(1.4, abs=1e-12)

    def test_one_tau(self):
        assert drift_phase(7.0, 1.4, 7.0) == pytest.approx(0.6321 * 1.4, abs=1e-4)

    def test_linear_mode(self):
        assert linear_drift_phase(3.0, 0.5) == 1.5
        params = ChainParams(drift_mode="linear", drift_slope_rad_per_s=0.5)
        assert np.allclose(chain_drift(params, np.array([0.0, 2.0])), [0.0, 1.0])

    def test_no_drift_mode(self):
        assert np.array_equal(chain_drift(ChainParams(), np.arange(4.0)), np.zeros(4))


def small_frame(theta=0.0, **params):
    """One-chain frame (guard 2, chirp 16) plus its impairment state."""
    chirp = generate_chirp(1e5, 1e6, 16)
    schedule = FrameSchedule(num_chains=1, num_chirp_samples=16, guard_samples=2)
    buf = np.zeros(20, dtype=complex)
    buf[2:18] = chirp.samples
    frame = ComplexSignal(buf, 1e6)
    state = make_state(theta_rf_rad=theta, **params)
    return frame, state, schedule


class TestApplyTxImpairments:
    def test_identity_when_clean(self):
        frame, state, sched = small_frame()
        out = apply_tx_impairments(frame, state, sched, 0.0, 1e-3)
        assert np.array_equal(out.samples, frame.samples)

    def test_constant_frontend_rotation(self):
        frame, state, sched = small_frame(theta=0.7)
        out = apply_tx_impairments(frame, state, sched, 0.0, 1e-3)
        nz = frame.samples != 0
        assert np.allclose(out.samples[nz] / frame.samples[nz], np.exp(1j * 0.7), atol=1e-12)
        assert np.array_equal(out.samples[~nz], frame.samples[~nz])

    def test_cfo_ramp_matches_closed_form(self):
        frame, state, sched = small_frame(cfo_hz=1e3)
        out = apply_tx_impairments(frame, state, sched, 0.0, 1e-3)
        n = np.arange(2, 18)
        expected = frame.samples[2:18] * np.exp(1j * 2 * np.pi * 1e3 * n / 1e6)
        assert np.allclose(out.samples[2:18], expected, atol=1e-12)

    def test_cfo_accumulates_across_cycles(self):
        frame, state, sched = small_frame(cfo_hz=250.0)
        out = apply_tx_impairments(frame, state, sched, 2.0, 1e-3)
        n = np.arange(2, 18)
        expected = frame.samples[2:18] * np.exp(1j * 2 * np.pi * 250.0 * (2.0 + n / 1e6))
        assert np.allclose(out.samples[2:18], expected, atol=1e-9)

    def test_magnitude_preserved(self):
        frame, state, sched = small_frame(
            theta=0.3, cfo_hz=1e3, wiener_rate_rad2_per_s=1e-3, white_phase_var_rad2=1e-4
        )
        out = apply_tx_impairments(frame, state, sched, 0.0, 1e-3)
        assert np.allclose(np.abs(out.samples), np.abs(frame.samples), atol=1e-12)

    def test_deterministic_for_seed(self):
        outs = []
        for _ in range(2):
            frame, state, sched = small_frame(
                wiener_rate_rad2_per_s=1e-3, white_phase_var_rad2=1e-4
            )
            out = apply_tx_impairments(frame, state, sched, 0.0, 1e-3)
            outs.append(out.samples)
        assert np.array_equal(outs[0], outs[1])

    def test_output_carries_cycle_start_time(self):
        frame, state, sched = small_frame()
        out = apply_tx_impairments(frame, state, sched, 0.125, 1e-3)
        assert out.start_time_s == 0.125

    def test_oscillator_advances_full_cycle(self):
        # After one call the walk must have consumed exactly one cycle
        # interval: lead gap + chirp + tail.  Verified against a manual
        # replay with the same substream.
        frame, state, sched = small_frame(wiener_rate_rad2_per_s=1e-2)
        apply_tx_impairments(frame, state, sched, 0.0, 1e-3)
        replay = make_state(wiener_rate_rad2_per_s=1e-2)
        advance_oscillator(replay, 2 / 1e6)
        oscillator_trajectory(replay, 16, 1e6)
        advance_oscillator(replay, 1e-3 - 18 / 1e6)
        assert state.current_osc_phase_rad == replay.current_osc_phase_rad
