"""Receive pipeline: downconversion, slot extraction, dechirp, estimation.

The phase estimate for a chain is the time average of the argument of its
dechirped slot (the per-chain system function), unwrapped before averaging
so the mean stays well-defined near the +/- pi boundary, then re-wrapped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ComplexSignal, PhaseEstimate, RxParams
from .waveform import FrameSchedule

TWO_PI = 2.0 * np.pi


def wrap_phase(theta):
    """Wrap angle(s) to (-pi, pi]."""
    return np.pi - np.mod(np.pi - theta, TWO_PI)


def unwrap_phases(wrapped: np.ndarray) -> np.ndarray:
    """Adjust successive differences by 2 pi multiples so |diff| <= pi.

    The first element is kept as-is.
    """
    return np.unwrap(np.asarray(wrapped, dtype=float))


@dataclass
class RxChainState:
    """Receive-chain impairments: frontend phase, CFO, oscillator white noise."""

    params: RxParams
    rng: np.random.Generator

    @classmethod
    def from_params(cls, params: RxParams, rng: np.random.Generator) -> "RxChainState":
        return cls(params=params, rng=rng)


def downconvert(signal: ComplexSignal, rx: RxChainState) -> ComplexSignal:
    """Remove the receiver's own rotation from the incoming signal.

    Applies exp(-j (2 pi cfo t + phi_OS[n] + phi_RF)) per sample, with the
    receiver oscillator modeled as white phase noise around the shared
    reference.  Identity when all receiver impairments are zero.
    """
    p = rx.params
    if p.cfo_hz == 0.0 and p.phi_rf_rad == 0.0 and p.osc_white_var_rad2 == 0.0:
        return signal
    phase = np.zeros(len(signal))
    if p.cfo_hz != 0.0:
        phase = phase + TWO_PI * p.cfo_hz * signal.sample_times_s
    if p.osc_white_var_rad2 > 0.0:
        phase = phase + rx.rng.normal(0.0, math.sqrt(p.osc_white_var_rad2), len(signal))
    phase = phase + p.phi_rf_rad
    return ComplexSignal(
        signal.samples * np.exp(-1j * phase), signal.sample_rate_hz, signal.start_time_s
    )


def extract_slot(frame: ComplexSignal, m: int, schedule: FrameSchedule) -> ComplexSignal:
    """Pull the N chirp-bearing samples of slot m (guards discarded)."""
    if len(frame) < schedule.frame_length_samples:
        raise ValueError(
            f"frame has {len(frame)} samples, schedule needs "
            f"{schedule.frame_length_samples}"
        )
    start = schedule.chirp_start(m)  # raises IndexError for bad m
    stop = schedule.chirp_stop(m)
    return ComplexSignal(
        frame.samples[start:stop],
        frame.sample_rate_hz,
        frame.start_time_s + start / frame.sample_rate_hz,
    )


def dechirp(slot: ComplexSignal, reference: ComplexSignal) -> ComplexSignal:
    """Elementwise product with the conjugate reference chirp.

    Exposes the chain's phase response: a slot equal to the reference times
    a rotation comes out as that constant rotation.
    """
    if len(slot) != len(reference):
        raise ValueError(f"length mismatch: slot {len(slot)} vs reference {len(reference)}")
    return ComplexSignal(
        slot.samples * np.conj(reference.samples),
        slot.sample_rate_hz,
        slot.start_time_s,
    )


def estimate_phase(h: ComplexSignal, method: str = "unwrap_mean") -> float:
    """Phase estimate from a dechirped slot, wrapped to (-pi, pi].

    "unwrap_mean" averages the unwrapped per-sample arguments (the literal
    time average of arg h).  "circular_mean" takes the argument of the
    complex sum; the two agree at high SNR.
    """
    if method == "circular_mean":
        return float(wrap_phase(np.angle(np.sum(h.samples))))
    if method != "unwrap_mean":
        raise ValueError(f"unknown estimator {method!r}")
    return float(wrap_phase(np.mean(unwrap_phases(np.angle(h.samples)))))


def run_receiver(
    received_frame: ComplexSignal,
    rx: RxChainState,
    schedule: FrameSchedule,
    reference_chirp: ComplexSignal,
    carrier_freq_hz: float,
    cycle_index: int = 0,
    receiver_kind: str = "local",
    method: str = "unwrap_mean",
) -> list[PhaseEstimate]:
    """Full per-frame pipeline, one phase estimate per chain.

    downconvert -> extract_slot -> dechirp -> estimate_phase, packaged with
    the equivalent jitter theta / (2 pi f_c).  Slots are processed as one
    stacked array; the result is identical to composing the per-slot
    operations chain by chain.
    """
    if len(received_frame) < schedule.frame_length_samples:
        raise ValueError(
            f"frame has {len(received_frame)} samples, schedule needs "
            f"{schedule.frame_length_samples}"
        )
    if len(reference_chirp) != schedule.num_chirp_samples:
        raise ValueError("reference chirp length does not match the schedule")
    base = downconvert(received_frame, rx)
    rows = np.stack(
        [
            base.samples[schedule.chirp_start(m) : schedule.chirp_stop(m)]
            for m in range(schedule.num_chains)
        ]
    )
    h = rows * np.conj(reference_chirp.samples)[None, :]
    if method == "circular_mean":
        thetas = wrap_phase(np.angle(np.sum(h, axis=-1)))
    elif method == "unwrap_mean":
        thetas = wrap_phase(np.mean(np.unwrap(np.angle(h), axis=-1), axis=-1))
    else:
        raise ValueError(f"unknown estimator {method!r}")
    return [
        PhaseEstimate(
            chain_index=m,
            cycle_index=cycle_index,
            theta_rad=float(thetas[m]),
            jitter_s=float(thetas[m]) / (TWO_PI * carrier_freq_hz),
            receiver_kind=receiver_kind,
        )
        for m in range(schedule.num_chains)
    ]
