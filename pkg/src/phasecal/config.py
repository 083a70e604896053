"""Shared domain types and the validated system configuration.

All simulation stages are driven by a single :class:`SystemConfig` instance,
which is the one source of truth for a run.  Units are SI throughout: Hz, s,
m, rad.  Configs are immutable after :func:`validate` and safe to share
across threads.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

SPEED_OF_LIGHT = 2.99792458e8  # m/s

RECEIVER_KINDS = ("local", "ota")

DRIFT_MODES = ("none", "linear", "exponential")
ESTIMATORS = ("unwrap_mean", "circular_mean")


class ConfigError(ValueError):
    """A configuration value violates an invariant.

    ``field`` names the offending key so callers can report it precisely.
    """

    def __init__(self, field_name: str, message: str):
        self.field_name = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass(frozen=True)
class ChainParams:
    """Per-transmit-chain impairment parameters.

    theta_rf_rad        constant frontend phase shift of the chain
    cfo_hz              synthesizer offset relative to the nominal carrier
    wiener_rate_rad2_per_s
                        intensity of the oscillator phase random walk
    white_phase_var_rad2
                        white phase-noise floor, variance per sample
    drift_mode          "none", "linear" or "exponential" warm-up drift
    drift_slope_rad_per_s
                        slope of the linear drift mode
    drift_amplitude_rad / drift_tau_s
                        asymptote and time constant of the exponential mode
    """

    theta_rf_rad: float = 0.0
    cfo_hz: float = 0.0
    wiener_rate_rad2_per_s: float = 0.0
    white_phase_var_rad2: float = 0.0
    drift_mode: str = "none"
    drift_slope_rad_per_s: float = 0.0
    drift_amplitude_rad: float = 0.0
    drift_tau_s: float = 1.0


@dataclass(frozen=True)
class RxParams:
    """Receive-chain impairment parameters (one block per receiver kind)."""

    phi_rf_rad: float = 0.0
    cfo_hz: float = 0.0
    osc_white_var_rad2: float = 0.0


@dataclass(frozen=True)
class SystemConfig:
    """All run parameters: waveform, geometry, impairments, loop settings.

    ``tx_power_dbm`` is carried for report metadata only; the simulation
    normalizes the chirp to unit power and expresses receiver noise through
    ``ota_snr_db`` directly.
    """

    carrier_freq_hz: float
    bandwidth_hz: float
    sample_rate_hz: float
    num_chains: int
    num_chirp_samples: int
    guard_samples: int
    num_cycles: int
    cycle_interval_s: float
    rx_distance_m: float = 2.0
    rx_angle_rad: float = 0.0
    element_spacing_m: float | None = None
    tx_power_dbm: float = 0.0
    ota_snr_db: float = 30.0
    ota_gain_abs: float = 1.0
    ota_gain_arg_rad: float = 0.0
    ota_channel_ideal: bool = False
    ota_sample_shift: bool = False
    rng_seed: int = 0
    smoothing_window: int = 10
    estimator: str = "unwrap_mean"
    feedback_port: int = 0
    chains: tuple[ChainParams, ...] = ()
    rx_local: RxParams = field(default_factory=RxParams)
    rx_ota: RxParams = field(default_factory=RxParams)

    # -- derived accessors (never stored) ---------------------------------

    @property
    def chirp_duration_s(self) -> float:
        return self.num_chirp_samples / self.sample_rate_hz

    @property
    def slot_length_samples(self) -> int:
        return self.num_chirp_samples + 2 * self.guard_samples

    @property
    def frame_length_samples(self) -> int:
        return self.num_chains * self.slot_length_samples

    @property
    def frame_duration_s(self) -> float:
        return self.frame_length_samples / self.sample_rate_hz

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq_hz

    @property
    def spacing_m(self) -> float:
        """Element spacing; defaults to half a carrier wavelength."""
        if self.element_spacing_m is not None:
            return self.element_spacing_m
        return 0.5 * self.wavelength_m

    @property
    def ota_noise_var(self) -> float:
        """Complex AWGN variance per sample for a unit-power signal."""
        if math.isinf(self.ota_snr_db):
            return 0.0
        return 10.0 ** (-self.ota_snr_db / 10.0)

    @property
    def ota_gain(self) -> complex:
        return self.ota_gain_abs * complex(
            math.cos(self.ota_gain_arg_rad), math.sin(self.ota_gain_arg_rad)
        )

    def sha256(self) -> str:
        """Stable hash of the resolved configuration."""
        canon = json.dumps(asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(canon.encode()).hexdigest()


def validate(config: SystemConfig) -> SystemConfig:
    """Check every invariant and return the (resolved) config.

    Raises :class:`ConfigError` naming the violated field.  Idempotent:
    ``validate(validate(c)) == validate(c)``.
    """

    if config.carrier_freq_hz <= 0:
        raise ConfigError("carrier_freq_hz", "carrier frequency must be positive")
    if config.bandwidth_hz <= 0:
        raise ConfigError("bandwidth_hz", "bandwidth must be positive")
    if config.sample_rate_hz <= 0:
        raise ConfigError("sample_rate_hz", "sample rate must be positive")
    if config.bandwidth_hz > config.sample_rate_hz:
        raise ConfigError("bandwidth_hz", "B ≤ f_s required")
    if config.num_chirp_samples < 2:
        raise ConfigError("num_chirp_samples", "need at least 2 chirp samples")
    if config.num_chains < 1:
        raise ConfigError("num_chains", "need at least one transmit chain")
    if config.num_cycles < 2:
        raise ConfigError("num_cycles", "need at least two cycles")
    if config.guard_samples < 0:
        raise ConfigError("guard_samples", "guard length cannot be negative")
    if config.cycle_interval_s <= 0:
        raise ConfigError("cycle_interval_s", "cycle interval must be positive")
    if config.cycle_interval_s < config.frame_duration_s:
        raise ConfigError(
            "cycle_interval_s",
            f"cycle interval {config.cycle_interval_s} s shorter than the "
            f"TDMA frame ({config.frame_duration_s} s)",
        )
    if config.rx_distance_m <= 0:
        raise ConfigError("rx_distance_m", "receiver distance must be positive")
    if abs(config.rx_angle_rad) > math.pi / 2:
        raise ConfigError("rx_angle_rad", "|angle| must not exceed pi/2")
    if config.element_spacing_m is not None and config.element_spacing_m <= 0:
        raise ConfigError("element_spacing_m", "element spacing must be positive")
    if not (math.isinf(config.ota_snr_db) or math.isfinite(config.ota_snr_db)):
        raise ConfigError("ota_snr_db", "SNR must be finite or +inf")
    if config.ota_gain_abs < 0:
        raise ConfigError("ota_gain_abs", "channel gain magnitude cannot be negative")
    if config.smoothing_window < 1:
        raise ConfigError("smoothing_window", "smoothing window must be at least 1")
    if config.estimator not in ESTIMATORS:
        raise ConfigError("estimator", f"unknown estimator {config.estimator!r}")
    if not 0 <= config.rng_seed < 2**64:
        raise ConfigError("rng_seed", "seed must fit in an unsigned 64-bit integer")
    if not 0 <= config.feedback_port < 65535:
        # The UDP transport binds two consecutive ports (local, ota).
        raise ConfigError("feedback_port", "port must be in [0, 65534]")

    if len(config.chains) == 0:
        config = replace(config, chains=tuple(ChainParams() for _ in range(config.num_chains)))
    if len(config.chains) != config.num_chains:
        raise ConfigError(
            "chains",
            f"{len(config.chains)} chain blocks for num_chains={config.num_chains}",
        )
    for m, chain in enumerate(config.chains):
        key = f"chain.{m}"
        if chain.wiener_rate_rad2_per_s < 0:
            raise ConfigError(key, "wiener_rate_rad2_per_s cannot be negative")
        if chain.white_phase_var_rad2 < 0:
            raise ConfigError(key, "white_phase_var_rad2 cannot be negative")
        if chain.drift_mode not in DRIFT_MODES:
            raise ConfigError(key, f"unknown drift_mode {chain.drift_mode!r}")
        if chain.drift_mode == "exponential" and chain.drift_tau_s <= 0:
            raise ConfigError(key, "drift_tau_s must be positive")
    for kind in RECEIVER_KINDS:
        rx = getattr(config, f"rx_{kind}")
        if rx.osc_white_var_rad2 < 0:
            raise ConfigError(f"rx.{kind}", "osc_white_var_rad2 cannot be negative")
    if config.rx_local.cfo_hz != 0.0:
        # The local reference shares the transmit frequency reference.
        raise ConfigError("rx.local", "local receiver CFO is fixed to zero")

    return config


@dataclass
class ComplexSignal:
    """A sample-rate-annotated buffer of complex baseband samples.

    ``start_time_s`` locates sample 0 on the absolute simulation clock so
    time-dependent rotations (CFO, drift) stay consistent when a signal is
    sliced out of a frame.
    """

    samples: np.ndarray
    sample_rate_hz: float
    start_time_s: float = 0.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.samples.size == 0:
            raise ValueError("signal must contain at least one sample")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample rate must be positive")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz

    @property
    def sample_times_s(self) -> np.ndarray:
        """Absolute time of each sample."""
        return self.start_time_s + np.arange(len(self.samples)) / self.sample_rate_hz


@dataclass(frozen=True)
class PhaseEstimate:
    """One phase observation: chain m at cycle l, seen by one receiver."""

    chain_index: int
    cycle_index: int
    theta_rad: float
    jitter_s: float
    receiver_kind: str

    def __post_init__(self):
        if self.receiver_kind not in RECEIVER_KINDS:
            raise ValueError(f"unknown receiver kind {self.receiver_kind!r}")
