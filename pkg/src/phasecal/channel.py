"""Propagation to the local (wired) and over-the-air receivers.

The local reference receiver sees the plain sum of the transmit signals.
The OTA receiver sees a single line-of-sight tap: per-chain ULA geometry
delay plus a common path delay, a common complex gain, and circularly
symmetric AWGN.  Delays enter as carrier-phase rotations (narrowband
model); an optional sample-shift mode additionally shifts the baseband
waveform by the nearest whole sample for sensitivity studies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SPEED_OF_LIGHT, ComplexSignal, SystemConfig


@dataclass(frozen=True)
class OtaChannelParams:
    """LOS channel between the transmit array and the OTA receiver."""

    gain: complex = 1.0 + 0.0j
    path_delay_s: float = 0.0
    element_delays_s: tuple[float, ...] = ()
    noise_var: float = 0.0
    sample_shift: bool = False

    def __post_init__(self):
        if self.noise_var < 0:
            raise ValueError("noise variance cannot be negative")

    @classmethod
    def from_config(cls, config: SystemConfig) -> "OtaChannelParams":
        """Derive delays from the run geometry (or an ideal pass-through)."""
        if config.ota_channel_ideal:
            return cls(
                gain=1.0 + 0.0j,
                path_delay_s=0.0,
                element_delays_s=tuple(0.0 for _ in range(config.num_chains)),
                noise_var=0.0,
            )
        delays = tuple(
            ula_delay(m, config.spacing_m, config.rx_angle_rad)
            for m in range(config.num_chains)
        )
        return cls(
            gain=config.ota_gain,
            path_delay_s=config.rx_distance_m / SPEED_OF_LIGHT,
            element_delays_s=delays,
            noise_var=config.ota_noise_var,
            sample_shift=config.ota_sample_shift,
        )

    def chain_rotation(self, m: int, carrier_freq_hz: float) -> complex:
        """gain * exp(-j 2 pi f_c (tau_p,m + tau_ch)) for chain m."""
        tau = self.element_delays_s[m] + self.path_delay_s
        return self.gain * np.exp(-2j * np.pi * carrier_freq_hz * tau)


def ula_delay(m: int, spacing_m: float, angle_rad: float) -> float:
    """Propagation delay of element m of a uniform linear array.

    tau_p,m = m * (d / c) * sin(angle); element 0 is the reference.
    """
    if m < 0:
        raise ValueError("element index cannot be negative")
    return m * (spacing_m / SPEED_OF_LIGHT) * np.sin(angle_rad)


def _check_aligned(frames: list[ComplexSignal]) -> None:
    if not frames:
        raise ValueError("need at least one frame")
    n = len(frames[0])
    fs = frames[0].sample_rate_hz
    for f in frames[1:]:
        if len(f) != n:
            raise ValueError(f"frame length mismatch: {len(f)} != {n}")
        if f.sample_rate_hz != fs:
            raise ValueError("sample rate mismatch between frames")


def propagate_local(frames: list[ComplexSignal]) -> ComplexSignal:
    """Wired splitter/combiner path: the exact sum, no delay, no noise."""
    _check_aligned(frames)
    total = frames[0].samples.copy()
    for f in frames[1:]:
        total += f.samples
    return ComplexSignal(total, frames[0].sample_rate_hz, frames[0].start_time_s)


def propagate_ota(
    frames: list[ComplexSignal],
    params: OtaChannelParams,
    carrier_freq_hz: float,
    rng: np.random.Generator,
) -> ComplexSignal:
    """LOS channel: rotate each chain by its delay phase, sum, add AWGN."""
    _check_aligned(frames)
    if len(params.element_delays_s) < len(frames):
        raise ValueError("channel has fewer element delays than frames")
    fs = frames[0].sample_rate_hz
    total = np.zeros(len(frames[0]), dtype=np.complex128)
    for m, f in enumerate(frames):
        contrib = params.chain_rotation(m, carrier_freq_hz) * f.samples
        if params.sample_shift:
            shift = int(round((params.element_delays_s[m] + params.path_delay_s) * fs))
            contrib = np.roll(contrib, shift)
            if shift > 0:
                contrib[:shift] = 0.0
            elif shift < 0:
                contrib[shift:] = 0.0
        total += contrib
    if params.noise_var > 0.0:
        scale = np.sqrt(params.noise_var / 2.0)
        noise = rng.standard_normal(2 * len(total)).view(np.complex128)
        total += scale * noise
    return ComplexSignal(total, fs, frames[0].start_time_s)
