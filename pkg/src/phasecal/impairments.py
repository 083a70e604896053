"""Per-chain transmit impairments.

Each chain owns an oscillator phase state that random-walks through the
whole campaign (Wiener process, intensity ``wiener_rate_rad2_per_s``) with a
white phase-noise floor added per sample, plus a constant frontend phase, a
synthesizer CFO and a slow warm-up drift.  All of it is phase-only: signal
magnitudes are never touched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ChainParams, ComplexSignal
from .waveform import FrameSchedule


@dataclass
class ChainImpairmentState:
    """Impairment parameters plus the evolving oscillator phase of one chain.

    ``current_osc_phase_rad`` must only change through the advance /
    trajectory operations below so a run stays reproducible for a given
    rng stream.
    """

    params: ChainParams
    chain_index: int
    rng: np.random.Generator
    current_osc_phase_rad: float = 0.0

    @classmethod
    def from_params(
        cls, params: ChainParams, chain_index: int, rng: np.random.Generator
    ) -> "ChainImpairmentState":
        return cls(params=params, chain_index=chain_index, rng=rng)


def advance_oscillator(state: ChainImpairmentState, dt_s: float) -> ChainImpairmentState:
    """Propagate the oscillator random walk over an idle interval.

    Adds one Gaussian increment of variance wiener_rate * dt.  No rng draw
    is consumed when the increment is deterministic (zero rate or dt = 0).
    """
    if dt_s < 0:
        raise ValueError("cannot advance the oscillator backwards")
    rate = state.params.wiener_rate_rad2_per_s
    if rate > 0.0 and dt_s > 0.0:
        state.current_osc_phase_rad += state.rng.normal(0.0, math.sqrt(rate * dt_s))
    return state


def oscillator_trajectory(
    state: ChainImpairmentState, n_samples: int, sample_rate_hz: float
) -> np.ndarray:
    """Sample-wise oscillator phase over the next ``n_samples``.

    The path accumulates Wiener increments of variance wiener_rate / fs per
    sample and adds an independent white phase term per sample.  The walk
    (not the white term) advances the stored state by n_samples / fs.
    """
    if n_samples < 1:
        raise ValueError("trajectory needs at least one sample")
    p = state.params
    path = np.full(n_samples, state.current_osc_phase_rad)
    if p.wiener_rate_rad2_per_s > 0.0:
        step = math.sqrt(p.wiener_rate_rad2_per_s / sample_rate_hz)
        path = path + np.cumsum(state.rng.normal(0.0, step, n_samples))
        state.current_osc_phase_rad = float(path[-1])
    if p.white_phase_var_rad2 > 0.0:
        path = path + state.rng.normal(
            0.0, math.sqrt(p.white_phase_var_rad2), n_samples
        )
    return path


def drift_phase(t_s: float | np.ndarray, amplitude_rad: float, tau_s: float) -> float | np.ndarray:
    """Exponential warm-up settle: A * (1 - exp(-t / tau))."""
    return amplitude_rad * -np.expm1(-np.asarray(t_s, dtype=float) / tau_s)


def linear_drift_phase(t_s: float | np.ndarray, slope_rad_per_s: float) -> float | np.ndarray:
    """Linear drift, the tau -> inf limit of the exponential settle."""
    return slope_rad_per_s * np.asarray(t_s, dtype=float)


def chain_drift(params: ChainParams, t_s: np.ndarray) -> np.ndarray:
    """Evaluate the chain's configured drift mode at absolute times t."""
    if params.drift_mode == "linear":
        return np.asarray(linear_drift_phase(t_s, params.drift_slope_rad_per_s))
    if params.drift_mode == "exponential":
        return np.asarray(
            drift_phase(t_s, params.drift_amplitude_rad, params.drift_tau_s)
        )
    return np.zeros_like(np.asarray(t_s, dtype=float))


def apply_tx_impairments(
    frame: ComplexSignal,
    state: ChainImpairmentState,
    schedule: FrameSchedule,
    cycle_start_time_s: float,
    cycle_interval_s: float,
) -> ComplexSignal:
    """Rotate a chain's frame by its full impairment phase.

    Sample n picks up exp(j * (2 pi cfo t_n + theta_OS(t_n) + theta_RF +
    drift(t_n))) with t_n on the absolute clock.  The frame is zero outside
    the chain's chirp slot (by construction in build_frame), so the rotation
    is materialized on the slot only; the oscillator state is advanced
    through the leading gap, the slot, and the idle tail up to the start of
    the next cycle.
    """
    p = state.params
    fs = frame.sample_rate_hz
    m = state.chain_index
    start = schedule.chirp_start(m)
    stop = schedule.chirp_stop(m)
    n_chirp = stop - start

    advance_oscillator(state, start / fs)
    osc = oscillator_trajectory(state, n_chirp, fs)
    tail = cycle_interval_s - (stop / fs)
    advance_oscillator(state, tail)

    t = cycle_start_time_s + (start + np.arange(n_chirp)) / fs
    phase = p.theta_rf_rad + osc + chain_drift(p, t)
    if p.cfo_hz != 0.0:
        phase = phase + 2.0 * np.pi * p.cfo_hz * t

    out = frame.samples.copy()
    out[start:stop] = out[start:stop] * np.exp(1j * phase)
    return ComplexSignal(out, fs, cycle_start_time_s)
