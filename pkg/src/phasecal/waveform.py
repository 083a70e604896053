"""Baseband chirp synthesis and TDMA frame assembly."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ComplexSignal, SystemConfig


@dataclass(frozen=True)
class FrameSchedule:
    """Slot timing of one TDMA frame.

    Slot m occupies samples [m * slot_length, (m + 1) * slot_length); the
    chirp sits between the two guard intervals inside the slot.
    """

    num_chains: int
    num_chirp_samples: int
    guard_samples: int

    @property
    def slot_length_samples(self) -> int:
        return self.num_chirp_samples + 2 * self.guard_samples

    @property
    def frame_length_samples(self) -> int:
        return self.num_chains * self.slot_length_samples

    @property
    def slot_offsets(self) -> tuple[int, ...]:
        return tuple(m * self.slot_length_samples for m in range(self.num_chains))

    def chirp_start(self, m: int) -> int:
        """Frame index of the first chirp sample of slot m."""
        if not 0 <= m < self.num_chains:
            raise IndexError(f"slot index {m} out of range [0, {self.num_chains})")
        return m * self.slot_length_samples + self.guard_samples

    def chirp_stop(self, m: int) -> int:
        return self.chirp_start(m) + self.num_chirp_samples


def generate_chirp(bandwidth_hz: float, sample_rate_hz: float, num_samples: int) -> ComplexSignal:
    """Unit-amplitude linear up-chirp sweeping ``bandwidth_hz`` over N samples.

    Sample n carries phase pi * (B / T) * (n * Ts)^2 with T = N * Ts, so the
    instantaneous frequency ramps from 0 to B across the chirp.
    """
    if num_samples < 1:
        raise ValueError("chirp needs at least one sample")
    ts = 1.0 / sample_rate_hz
    duration = num_samples * ts
    n = np.arange(num_samples)
    if bandwidth_hz == 0.0:
        samples = np.ones(num_samples, dtype=np.complex128)
    else:
        phase = np.pi * (bandwidth_hz / duration) * (n * ts) ** 2
        samples = np.exp(1j * phase)
    return ComplexSignal(samples, sample_rate_hz)


def build_frame(
    config: SystemConfig, chirp: ComplexSignal
) -> tuple[list[ComplexSignal], FrameSchedule]:
    """Place the chirp into each chain's TDMA slot.

    Chain m's frame signal is zero everywhere except its guarded slot, which
    holds the chirp.  Slots are disjoint, so summing the returned frames
    reproduces the full TDMA frame.
    """
    if len(chirp) != config.num_chirp_samples:
        raise ValueError(
            f"chirp has {len(chirp)} samples, config expects {config.num_chirp_samples}"
        )
    schedule = FrameSchedule(
        num_chains=config.num_chains,
        num_chirp_samples=config.num_chirp_samples,
        guard_samples=config.guard_samples,
    )
    frames = []
    for m in range(config.num_chains):
        buf = np.zeros(schedule.frame_length_samples, dtype=np.complex128)
        buf[schedule.chirp_start(m) : schedule.chirp_stop(m)] = chirp.samples
        frames.append(ComplexSignal(buf, config.sample_rate_hz))
    return frames, schedule
