"""Jitter statistics, KDE densities, coherence, and the run report.

Jitter is the phase estimate expressed in time, alpha = theta / (2 pi f_c).
The headline stability metric is the RMS of first differences of the
per-cycle jitter sequence ("cycle-to-cycle" jitter).  Report statistics
skip the calibrator warm-up (the first ``window`` cycles) so startup
transients of the feedback loop do not pollute steady-state numbers; the
full sample arrays are retained alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import RECEIVER_KINDS, SystemConfig

TWO_PI = 2.0 * math.pi


def phase_to_jitter(theta_rad, carrier_freq_hz: float):
    """alpha = theta / (2 pi f_c), seconds of carrier timing error."""
    if carrier_freq_hz <= 0:
        raise ValueError("carrier frequency must be positive")
    return np.asarray(theta_rad, dtype=float) / (TWO_PI * carrier_freq_hz)


def rms_c2c_jitter(alpha_s: np.ndarray) -> float:
    """RMS of first differences: sqrt(mean((alpha[l+1] - alpha[l])^2))."""
    alpha = np.asarray(alpha_s, dtype=float)
    if alpha.size < 2:
        raise ValueError("need at least two samples for cycle-to-cycle jitter")
    return float(np.sqrt(np.mean(np.diff(alpha) ** 2)))


def skewness(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    d = x - x.mean()
    m2 = np.mean(d**2)
    if m2 == 0.0:
        return 0.0
    return float(np.mean(d**3) / m2**1.5)


def excess_kurtosis(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    d = x - x.mean()
    m2 = np.mean(d**2)
    if m2 == 0.0:
        return 0.0
    return float(np.mean(d**4) / m2**2 - 3.0)


def coherence_factor(residual_phases_rad: np.ndarray) -> float:
    """|sum exp(j r_m)| / M over the array's residual phases, in [0, 1]."""
    r = np.asarray(residual_phases_rad, dtype=float)
    if r.size < 1:
        raise ValueError("need at least one phase")
    return float(np.abs(np.sum(np.exp(1j * r))) / r.size)


@dataclass(frozen=True)
class KdeResult:
    """Gaussian kernel density over an evaluation grid."""

    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    def __call__(self, x) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), self.grid, self.density)

    def integral(self) -> float:
        return float(np.trapezoid(self.density, self.grid))


def kde_pdf(
    samples_s: np.ndarray,
    bandwidth_s: float | None = None,
    grid_points: int = 512,
    span_bandwidths: float = 8.0,
) -> KdeResult:
    """Gaussian-kernel density of jitter samples.

    f(x) = (1 / (n h)) sum_i K((x - x_i) / h) with standard normal K.  The
    default bandwidth is Silverman's rule, 1.06 * std * n^(-1/5); all-equal
    samples make that zero and are rejected.  The grid spans the sample
    range extended by ``span_bandwidths`` bandwidths on each side.
    """
    x = np.asarray(samples_s, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two samples for a density estimate")
    if bandwidth_s is None:
        if np.all(x == x[0]):
            raise ValueError("zero bandwidth: samples are all equal")
        sigma = float(np.std(x, ddof=1))
        bandwidth_s = 1.06 * sigma * x.size ** (-1.0 / 5.0)
    elif bandwidth_s <= 0.0:
        raise ValueError("bandwidth must be positive")
    h = float(bandwidth_s)
    grid = np.linspace(
        x.min() - span_bandwidths * h, x.max() + span_bandwidths * h, grid_points
    )
    z = (grid[:, None] - x[None, :]) / h
    density = np.exp(-0.5 * z**2).sum(axis=1) / (x.size * h * math.sqrt(TWO_PI))
    return KdeResult(grid=grid, density=density, bandwidth=h)


@dataclass(frozen=True)
class CellStats:
    """Steady-state summary of one (receiver, chain, measured|calibrated) cell."""

    rms_c2c_jitter_s: float
    mean_phase_rad: float
    skewness: float
    excess_kurtosis: float


@dataclass
class CalibrationReport:
    """Per-chain measured/calibrated jitter for both receivers.

    ``theta_rad[kind]`` holds the raw per-cycle estimates with shape
    (num_cycles, num_chains); ``residual_rad[kind]`` the post-calibration
    residuals of the same shape.  ``alpha`` variants are the same data in
    seconds.  Statistics are computed from cycle ``warmup_cycles`` onward.
    """

    carrier_freq_hz: float
    bandwidth_hz: float
    num_cycles: int
    num_chains: int
    warmup_cycles: int
    seed: int
    scenario: str
    config_sha256: str
    transport: str = "inproc"
    theta_rad: dict = field(default_factory=dict)
    residual_rad: dict = field(default_factory=dict)
    measured: dict = field(default_factory=dict)  # (kind, m) -> CellStats
    calibrated: dict = field(default_factory=dict)
    coherence: dict = field(default_factory=dict)  # kind -> {measured, calibrated}

    def alpha_s(self, kind: str) -> np.ndarray:
        return phase_to_jitter(self.theta_rad[kind], self.carrier_freq_hz)

    def residual_alpha_s(self, kind: str) -> np.ndarray:
        return phase_to_jitter(self.residual_rad[kind], self.carrier_freq_hz)


def _cell(alpha: np.ndarray, theta: np.ndarray) -> CellStats:
    return CellStats(
        rms_c2c_jitter_s=rms_c2c_jitter(alpha),
        mean_phase_rad=float(np.mean(theta)),
        skewness=skewness(alpha),
        excess_kurtosis=excess_kurtosis(alpha),
    )


def assemble_report(
    theta_rad: dict,
    residual_rad: dict,
    *,
    carrier_freq_hz: float,
    bandwidth_hz: float,
    num_cycles: int,
    num_chains: int,
    warmup_cycles: int,
    seed: int,
    scenario: str,
    config_sha256: str,
    transport: str = "inproc",
) -> CalibrationReport:
    """Populate every report cell from raw estimate/residual arrays."""
    L, M = num_cycles, num_chains
    for kind in RECEIVER_KINDS:
        for name, streams in (("theta", theta_rad), ("residual", residual_rad)):
            if kind not in streams:
                raise ValueError(f"missing {name} stream for receiver {kind!r}")
            arr = np.asarray(streams[kind])
            if arr.shape != (L, M):
                raise ValueError(
                    f"{name}[{kind}] has shape {arr.shape}, expected {(L, M)}"
                )
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name}[{kind}] contains non-finite estimates")

    warmup = min(warmup_cycles, L - 2)
    fc = carrier_freq_hz
    report = CalibrationReport(
        carrier_freq_hz=fc,
        bandwidth_hz=bandwidth_hz,
        num_cycles=L,
        num_chains=M,
        warmup_cycles=warmup,
        seed=seed,
        scenario=scenario,
        config_sha256=config_sha256,
        transport=transport,
        theta_rad={k: np.array(theta_rad[k], dtype=float) for k in RECEIVER_KINDS},
        residual_rad={k: np.array(residual_rad[k], dtype=float) for k in RECEIVER_KINDS},
    )
    for kind in RECEIVER_KINDS:
        theta = report.theta_rad[kind][warmup:]
        resid = report.residual_rad[kind][warmup:]
        alpha = phase_to_jitter(theta, fc)
        resid_alpha = phase_to_jitter(resid, fc)
        for m in range(M):
            report.measured[(kind, m)] = _cell(alpha[:, m], theta[:, m])
            report.calibrated[(kind, m)] = _cell(resid_alpha[:, m], resid[:, m])
        report.coherence[kind] = {
            "measured": coherence_factor(np.mean(theta, axis=0)),
            "calibrated": coherence_factor(np.mean(resid, axis=0)),
        }
    return report


def build_report(
    theta_rad: dict,
    residual_rad: dict,
    config: SystemConfig,
    seed: int,
    scenario: str,
    transport: str = "inproc",
) -> CalibrationReport:
    """Assemble the full jitter report from the recorded estimate streams.

    ``theta_rad`` and ``residual_rad`` map receiver kind to arrays of shape
    (num_cycles, num_chains); incomplete streams are rejected.
    """
    return assemble_report(
        theta_rad,
        residual_rad,
        carrier_freq_hz=config.carrier_freq_hz,
        bandwidth_hz=config.bandwidth_hz,
        num_cycles=config.num_cycles,
        num_chains=config.num_chains,
        warmup_cycles=config.smoothing_window,
        seed=seed,
        scenario=scenario,
        config_sha256=config.sha256(),
        transport=transport,
    )
