"""Acceptance gate: one test per criterion, at its stated tolerance.

Each test prints a single ``ACCEPT-## ...: PASS`` line on success (visible
with ``pytest -s`` or in failure reports).  Campaign runs are cached and
shared between criteria that use the same (preset, scenario, cycles, seed)
so the gate stays inside its runtime budgets.
"""

import hashlib
import time
from dataclasses import replace
from functools import lru_cache
from importlib.resources import files

import numpy as np
import pytest

from phasecal.calibration import FeedbackMessage, decode_feedback, encode_feedback
from phasecal.channel import OtaChannelParams
from phasecal.configfile import parse_config
from phasecal.export import export_traces
from phasecal.metrics import kde_pdf, rms_c2c_jitter
from phasecal.receiver import wrap_phase
from phasecal.simulate import RunManifest, apply_scenario, run_simulation

KINDS = ("local", "ota")
CHAINS = range(4)


def preset(name):
    return parse_config(files("phasecal").joinpath(f"configs/{name}.cfg").read_text())


@lru_cache(maxsize=64)
def run(preset_name, scenario, cycles, seed, transport="inproc"):
    config = preset(preset_name)
    config = replace(config, num_cycles=cycles)
    config = apply_scenario(config, scenario)
    return run_simulation(
        RunManifest(config=config, seed=seed, scenario=scenario, transport=transport)
    )


def measured(report, kind, m):
    return report.measured[(kind, m)].rms_c2c_jitter_s


def calibrated(report, kind, m):
    return report.calibrated[(kind, m)].rms_c2c_jitter_s


def test_01_clean_chain_identity():
    t0 = time.time()
    for preset_name in ("table1_high", "table1_low"):
        report = run(preset_name, "clean", 100, seed=1)
        for kind in KINDS:
            assert np.max(np.abs(report.theta_rad[kind])) < 1e-12
    elapsed = time.time() - t0
    assert elapsed < 5.0
    print(f"\nACCEPT-01 clean-chain identity (|theta|<1e-12, {elapsed:.1f}s): PASS")


def test_02_constant_phase_recovery():
    report = run("table1_high", "rf-only", 20, seed=1)
    config = apply_scenario(preset("table1_high"), "rf-only")
    expected_rf = [0.1, 0.2, 0.3, 0.4]
    for m in CHAINS:
        assert np.allclose(report.theta_rad["local"][:, m], expected_rf[m], atol=1e-12)
    params = OtaChannelParams.from_config(config)
    fc = config.carrier_freq_hz
    for m in CHAINS:
        tau = params.element_delays_s[m] + params.path_delay_s
        analytic = wrap_phase(
            expected_rf[m] - 2 * np.pi * fc * tau - config.rx_ota.phi_rf_rad
        )
        assert np.allclose(report.theta_rad["ota"][:, m], analytic, atol=1e-9)
    print("ACCEPT-02 constant-phase recovery (local 1e-12, OTA analytic 1e-9): PASS")


def test_03_estimator_unbiased_and_one_over_n():
    t0 = time.time()
    rng = np.random.default_rng(2026)
    sigma, true_phase, runs = 0.1, 0.6, 10_000
    sizes = [100, 400, 1600, 6400]
    variances = []
    bias_checked = False
    for n in sizes:
        noise = rng.normal(0.0, sigma, (runs, n))
        thetas = wrap_phase(np.mean(np.unwrap(true_phase + noise, axis=1), axis=1))
        variances.append(np.var(thetas))
        se = sigma / np.sqrt(n * runs)
        assert abs(np.mean(thetas) - true_phase) < 3 * se
        bias_checked = True
    slope = np.polyfit(np.log(sizes), np.log(variances), 1)[0]
    assert bias_checked
    assert abs(slope + 1.0) <= 0.1
    elapsed = time.time() - t0
    assert elapsed < 120.0
    print(
        f"ACCEPT-03 estimator unbiased, var slope {slope:.3f} in -1±0.1 "
        f"({elapsed:.0f}s): PASS"
    )


def test_04_duration_effect():
    # Identical oscillator random-walk rates in both presets (checked
    # below); the longer low-bandwidth chirp must measure more jitter.
    high, low = preset("table1_high"), preset("table1_low")
    for ch_h, ch_l in zip(high.chains, low.chains):
        assert ch_h.wiener_rate_rad2_per_s == ch_l.wiener_rate_rad2_per_s
    wins = 0
    for seed in range(20):
        r_low = run("table1_low", "default", 2000, seed)
        r_high = run("table1_high", "default", 2000, seed)
        if all(
            measured(r_low, "local", m) > measured(r_high, "local", m) for m in CHAINS
        ):
            wins += 1
    assert wins >= 19
    print(f"ACCEPT-04 duration effect low>high in {wins}/20 trials: PASS")


def test_05_ota_jitter_at_least_local():
    wins = 0
    for seed in range(20):
        report = run("table1_high", "default", 2000, seed)
        if all(measured(report, "ota", m) >= measured(report, "local", m) for m in CHAINS):
            wins += 1
    assert wins >= 19
    print(f"ACCEPT-05 OTA >= local in {wins}/20 trials: PASS")


def test_06_drift_cancellation():
    # Linear drift: calibrated residual jitter exactly zero, measured
    # exactly the slope picture.
    report = run("table1_high", "drift-linear", 2000, seed=1)
    config = apply_scenario(preset("table1_high"), "drift-linear")
    fc = config.carrier_freq_hz
    for kind in KINDS:
        for m in CHAINS:
            assert calibrated(report, kind, m) == pytest.approx(0.0, abs=1e-12)
            step = config.chains[m].drift_slope_rad_per_s * config.cycle_interval_s
            assert measured(report, kind, m) == pytest.approx(
                step / (2 * np.pi * fc), rel=1e-9
            )
    # Exponential warm-up: calibration removes at least 90 % of the RMS.
    warm = run("table1_high", "drift-warmup", 2000, seed=1)
    for kind in KINDS:
        for m in CHAINS:
            assert calibrated(warm, kind, m) < 0.1 * measured(warm, kind, m)
    print("ACCEPT-06 drift cancellation (linear exact, warm-up <10%): PASS")


def test_07_calibration_universally_reduces_jitter():
    t0 = time.time()
    for preset_name in ("table1_high", "table1_low"):
        report = run(preset_name, "default", 10_000, seed=0)
        for kind in KINDS:
            for m in CHAINS:
                assert calibrated(report, kind, m) < measured(report, kind, m), (
                    preset_name,
                    kind,
                    m,
                )
    elapsed = time.time() - t0
    assert elapsed < 600.0
    print(
        f"ACCEPT-07 calibrated < measured in all 16 cells at L=10000 "
        f"({elapsed:.0f}s): PASS"
    )


def test_08_post_calibration_gaussianity():
    good_seeds = 0
    for seed in range(20):
        report = run("table1_high", "default", 10_000, seed)
        ok = all(
            abs(report.calibrated[(kind, m)].skewness) < 0.2
            and abs(report.calibrated[(kind, m)].excess_kurtosis) < 0.5
            for kind in KINDS
            for m in CHAINS
        )
        good_seeds += ok
    assert good_seeds >= 18
    print(f"ACCEPT-08 calibrated jitter Gaussian in {good_seeds}/20 seeds: PASS")


def test_09_metrics_oracles():
    assert rms_c2c_jitter(np.array([0.0, 1e-12, 0.0, 1e-12])) == pytest.approx(
        1e-12, rel=1e-12
    )
    assert rms_c2c_jitter(np.array([0.0, 3e-12, 3e-12])) == pytest.approx(
        np.sqrt(4.5) * 1e-12, rel=1e-12
    )
    rng = np.random.default_rng(7)
    sigma = 1.3e-12
    alpha = rng.normal(0.0, sigma, 100_000)
    assert rms_c2c_jitter(alpha) == pytest.approx(sigma * np.sqrt(2), rel=0.03)
    kde = kde_pdf(rng.normal(0.0, 1e-12, 2000))
    assert kde.integral() == pytest.approx(1.0, abs=1e-3)
    assert np.all(kde.density >= 0.0)
    print("ACCEPT-09 metrics oracles (hand values, sigma*sqrt2, KDE norm): PASS")


def test_10_transport_equivalence(tmp_path):
    digests = {}
    for transport in ("inproc", "udp"):
        report = run("table1_high", "default", 200, seed=4, transport=transport)
        out = tmp_path / transport
        files_written = export_traces(report, out)
        digests[transport] = [
            hashlib.sha256(p.read_bytes()).hexdigest() for p in files_written
        ]
    assert digests["inproc"] == digests["udp"]

    rng = np.random.default_rng(99)
    for _ in range(100_000):
        msg = FeedbackMessage(
            chain_index=int(rng.integers(0, 256)),
            cycle_index=int(rng.integers(0, 2**32)),
            theta_rad=float(rng.normal(0.0, 10.0 ** rng.integers(-18, 18))),
            timestamp_us=int(rng.integers(0, 2**64, dtype=np.uint64)),
        )
        assert decode_feedback(encode_feedback(msg)) == msg
    print("ACCEPT-10 transport equivalence + 1e5 message round-trips: PASS")


def test_11_determinism(tmp_path):
    hashes = []
    for attempt in ("first", "second"):
        config = replace(preset("table1_low"), num_cycles=300)
        report = run_simulation(RunManifest(config=config, seed=17, scenario="default"))
        out = tmp_path / attempt
        export_traces(report, out)
        hashes.append(hashlib.sha256((out / "traces.csv").read_bytes()).hexdigest())
    assert hashes[0] == hashes[1]
    print(f"ACCEPT-11 determinism, trace hash {hashes[0][:12]}…: PASS")
