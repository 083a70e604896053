"""Campaign engine: runs the L-cycle measurement loop for both receivers.

Every cycle builds the TDMA frame, applies per-chain transmit impairments,
propagates through the wired and the over-the-air path, estimates each
chain's phase at both receivers, and feeds the estimates back to the
transmit controller.  "Measured" series are the raw estimates; "calibrated"
series are the residuals against the precoding phase the controller had
available at that cycle (one-cycle feedback latency), which reproduces the
post-calibration measurement without a second physical loop.

Runs are fully deterministic for a given (config, seed): all randomness is
drawn from per-chain and per-receiver substreams of one seed sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .calibration import FeedbackMessage, SmoothedCalibrator, make_link
from .channel import OtaChannelParams, propagate_local, propagate_ota
from .config import (
    RECEIVER_KINDS,
    ChainParams,
    PhaseEstimate,
    RxParams,
    SystemConfig,
    validate,
)
from .impairments import ChainImpairmentState, apply_tx_impairments
from .metrics import CalibrationReport, build_report
from .receiver import RxChainState, run_receiver, wrap_phase
from .waveform import build_frame, generate_chirp


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one campaign."""

    config: SystemConfig
    seed: int
    out_dir: Path | None = None
    scenario: str = "default"
    transport: str = "inproc"


def _zero_impairments(cfg: SystemConfig) -> SystemConfig:
    chains = tuple(ChainParams() for _ in range(cfg.num_chains))
    return replace(
        cfg,
        chains=chains,
        rx_local=RxParams(),
        rx_ota=RxParams(),
        ota_snr_db=float("inf"),
    )


def _scenario_clean(cfg: SystemConfig) -> SystemConfig:
    """All impairments, channel effects and noise off."""
    return replace(_zero_impairments(cfg), ota_channel_ideal=True)


def _scenario_rf_only(cfg: SystemConfig) -> SystemConfig:
    """Constant frontend phases 0.1 (m+1) rad; noiseless channels.

    The OTA receiver keeps a non-zero frontend phase so the geometry +
    receiver composition stays visible in the estimates.
    """
    cfg = _zero_impairments(cfg)
    chains = tuple(
        ChainParams(theta_rf_rad=0.1 * (m + 1)) for m in range(cfg.num_chains)
    )
    return replace(cfg, chains=chains, rx_ota=RxParams(phi_rf_rad=0.2))


def _scenario_drift_linear(cfg: SystemConfig) -> SystemConfig:
    """Pure linear drift, one slope per chain, nothing stochastic."""
    cfg = _zero_impairments(cfg)
    chains = tuple(
        ChainParams(
            drift_mode="linear",
            drift_slope_rad_per_s=2e-3 * (1.0 + 0.25 * m),
        )
        for m in range(cfg.num_chains)
    )
    return replace(cfg, chains=chains)


def _scenario_drift_warmup(cfg: SystemConfig) -> SystemConfig:
    """Exponential warm-up settle only, mirroring a cold-started frontend."""
    cfg = _zero_impairments(cfg)
    chains = tuple(
        ChainParams(
            drift_mode="exponential",
            drift_amplitude_rad=0.25 + 0.05 * m,
            drift_tau_s=40.0,
        )
        for m in range(cfg.num_chains)
    )
    return replace(cfg, chains=chains)


SCENARIOS = {
    "default": lambda cfg: cfg,
    "clean": _scenario_clean,
    "rf-only": _scenario_rf_only,
    "drift-linear": _scenario_drift_linear,
    "drift-warmup": _scenario_drift_warmup,
}


def apply_scenario(config: SystemConfig, scenario: str) -> SystemConfig:
    """Overlay a named impairment scenario onto a parsed config."""
    try:
        overlay = SCENARIOS[scenario]
    except KeyError:
        known = ", ".join(sorted(SCENARIOS))
        raise ValueError(f"unknown scenario {scenario!r} (known: {known})") from None
    return validate(overlay(config))


def run_simulation(manifest: RunManifest) -> CalibrationReport:
    """Execute the L-cycle campaign described by the manifest."""
    cfg = validate(manifest.config)
    fs = cfg.sample_rate_hz
    fc = cfg.carrier_freq_hz
    L, M = cfg.num_cycles, cfg.num_chains
    t_obs = cfg.cycle_interval_s

    root = np.random.SeedSequence(manifest.seed)
    # Fixed spawn order: chains, local rx, ota rx, channel noise.
    seqs = root.spawn(M + 3)
    tx_states = [
        ChainImpairmentState.from_params(cfg.chains[m], m, np.random.default_rng(seqs[m]))
        for m in range(M)
    ]
    rx_states = {
        "local": RxChainState.from_params(cfg.rx_local, np.random.default_rng(seqs[M])),
        "ota": RxChainState.from_params(cfg.rx_ota, np.random.default_rng(seqs[M + 1])),
    }
    channel_rng = np.random.default_rng(seqs[M + 2])

    chirp = generate_chirp(cfg.bandwidth_hz, fs, cfg.num_chirp_samples)
    frames, schedule = build_frame(cfg, chirp)
    ota_params = OtaChannelParams.from_config(cfg)

    calibrators = {k: SmoothedCalibrator(M, cfg.smoothing_window) for k in RECEIVER_KINDS}
    # One feedback link per receiver kind; a configured port is used for the
    # local link with the OTA link on the next port (0 stays ephemeral).
    links = {
        kind: make_link(
            manifest.transport,
            cfg.feedback_port + i if cfg.feedback_port else 0,
        )
        for i, kind in enumerate(RECEIVER_KINDS)
    }

    theta = {k: np.zeros((L, M)) for k in RECEIVER_KINDS}
    residual = {k: np.zeros((L, M)) for k in RECEIVER_KINDS}

    try:
        for l in range(L):
            t0 = l * t_obs
            tx_frames = [
                apply_tx_impairments(frames[m], tx_states[m], schedule, t0, t_obs)
                for m in range(M)
            ]
            received = {
                "local": propagate_local(tx_frames),
                "ota": propagate_ota(tx_frames, ota_params, fc, channel_rng),
            }
            for kind in RECEIVER_KINDS:
                estimates = run_receiver(
                    received[kind],
                    rx_states[kind],
                    schedule,
                    chirp,
                    fc,
                    cycle_index=l,
                    receiver_kind=kind,
                    method=cfg.estimator,
                )
                cal = calibrators[kind]
                applied = cal.phases()  # from cycles < l only
                for est in estimates:
                    m = est.chain_index
                    theta[kind][l, m] = est.theta_rad
                    residual[kind][l, m] = wrap_phase(est.theta_rad - applied[m])
                    delivered = links[kind].transfer(
                        FeedbackMessage(
                            chain_index=m,
                            cycle_index=l,
                            theta_rad=est.theta_rad,
                            timestamp_us=int(round(t0 * 1e6)),
                        )
                    )
                    # The controller only sees what arrived; a lost datagram
                    # leaves this chain's precoding phase unchanged.
                    if delivered is not None:
                        cal.update(
                            PhaseEstimate(
                                chain_index=delivered.chain_index,
                                cycle_index=delivered.cycle_index,
                                theta_rad=delivered.theta_rad,
                                jitter_s=delivered.theta_rad / (2.0 * np.pi * fc),
                                receiver_kind=kind,
                            )
                        )
    finally:
        for link in links.values():
            link.close()

    return build_report(
        theta,
        residual,
        cfg,
        seed=manifest.seed,
        scenario=manifest.scenario,
        transport=manifest.transport,
    )
