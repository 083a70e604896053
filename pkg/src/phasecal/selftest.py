"""Built-in oracle battery: fast, deterministic checks of the worked examples.

Each check compares an operation against an independently computed value
(by-hand arithmetic, closed forms, or byte-level layouts).  Run via
``phasecal selftest``; every check prints one PASS/FAIL line.
"""

from __future__ import annotations

import math

import numpy as np

from .calibration import (
    FeedbackMessage,
    SmoothedCalibrator,
    decode_feedback,
    encode_feedback,
)
from .channel import ula_delay
from .config import ComplexSignal, PhaseEstimate, SPEED_OF_LIGHT
from .impairments import drift_phase
from .metrics import coherence_factor, kde_pdf, phase_to_jitter, rms_c2c_jitter
from .receiver import estimate_phase, unwrap_phases, wrap_phase
from .waveform import generate_chirp

CHECKS = []


def check(name):
    def wrap(fn):
        CHECKS.append((name, fn))
        return fn

    return wrap


@check("chirp per-sample phase")
def _chirp():
    sig = generate_chirp(2.0, 4.0, 4)
    expected = np.exp(1j * np.array([0.0, np.pi / 8, np.pi / 2, 9 * np.pi / 8]))
    assert np.allclose(sig.samples, expected, atol=1e-12)
    assert np.allclose(np.abs(sig.samples), 1.0, atol=1e-12)


@check("zero-bandwidth chirp is a tone")
def _chirp_zero():
    sig = generate_chirp(0.0, 4.0, 8)
    assert np.array_equal(sig.samples, np.ones(8, dtype=complex))


@check("phase unwrap by-hand example")
def _unwrap():
    out = unwrap_phases(np.array([3.0, -3.1, 2.9]))
    assert np.allclose(out, [3.0, 3.0 + 2 * np.pi - 6.1, 2.9 + 2 * np.pi - 2 * np.pi], atol=1e-12)
    assert np.allclose(out, [3.0, 3.18319, 2.9], atol=1e-4)


@check("estimator: mean of linear ramp")
def _estimate_ramp():
    h = ComplexSignal(np.exp(1j * (0.1 + 0.01 * np.arange(5))), 1.0)
    assert abs(estimate_phase(h) - 0.12) < 1e-12


@check("estimator: constant phase")
def _estimate_const():
    h = ComplexSignal(np.full(64, np.exp(1j * 0.3)), 1.0)
    assert abs(estimate_phase(h) - 0.3) < 1e-12


@check("wrap targets (-pi, pi]")
def _wrap():
    assert wrap_phase(np.pi) == np.pi
    assert wrap_phase(-np.pi) == np.pi
    assert abs(wrap_phase(3 * np.pi / 2) + np.pi / 2) < 1e-12


@check("ULA element delay")
def _ula():
    assert ula_delay(0, 0.04, 0.5) == 0.0
    assert ula_delay(3, 0.04, 0.0) == 0.0
    tau = ula_delay(1, 0.04, np.radians(30.0))
    assert abs(tau - 0.02 / SPEED_OF_LIGHT) < 1e-20
    assert abs(tau - 6.671e-11) < 1e-13


@check("warm-up drift settle")
def _drift():
    assert drift_phase(0.0, 2.0, 5.0) == 0.0
    assert abs(drift_phase(250.0, 2.0, 5.0) - 2.0) < 1e-12
    assert abs(drift_phase(5.0, 2.0, 5.0) - 2.0 * (1 - math.exp(-1))) < 1e-12


@check("calibrator startup and window means")
def _calibrator():
    cal = SmoothedCalibrator(num_chains=1, window=10)
    for i, th in enumerate((0.1, 0.2, 0.3)):
        p = cal.update(PhaseEstimate(0, i, th, 0.0, "local"))
    assert abs(p - 0.2) < 1e-12
    cal = SmoothedCalibrator(num_chains=1, window=10)
    for l in range(20):
        p = cal.update(PhaseEstimate(0, l, 0.01 * l, 0.0, "local"))
    assert abs(p - 0.145) < 1e-12


@check("feedback codec byte layout")
def _codec():
    payload = encode_feedback(FeedbackMessage(2, 7, 0.0, 0))
    assert payload == bytes(
        [0x50, 0x48, 0x43, 0x46, 0x01, 0x02, 0x07, 0x00, 0x00, 0x00] + [0] * 16
    )
    msg = FeedbackMessage(3, 12345, -1.25, 987654321)
    assert decode_feedback(encode_feedback(msg)) == msg


@check("cycle-to-cycle jitter oracles")
def _rms():
    assert rms_c2c_jitter(np.array([5.0, 5.0, 5.0])) == 0.0
    assert abs(rms_c2c_jitter(np.array([0.0, 1.0, 0.0, 1.0])) - 1.0) < 1e-12
    assert abs(rms_c2c_jitter(np.array([0.0, 3.0, 3.0])) - math.sqrt(4.5)) < 1e-12


@check("jitter conversion scale")
def _alpha():
    assert phase_to_jitter(0.0, 1e9) == 0.0
    assert abs(phase_to_jitter(2 * np.pi, 1.0) - 1.0) < 1e-15
    assert abs(phase_to_jitter(0.0309, 3.75e9) - 1.311e-12) < 1e-15


@check("density estimate value and normalization")
def _kde():
    kde = kde_pdf(np.array([-1.0, 1.0]), bandwidth_s=1.0)
    phi1 = math.exp(-0.5) / math.sqrt(2 * math.pi)
    assert abs(kde(0.0) - phi1) < 1e-6
    assert abs(kde.integral() - 1.0) < 1e-3


@check("coherence factor")
def _coherence():
    assert abs(coherence_factor(np.zeros(4)) - 1.0) < 1e-12
    assert coherence_factor(np.array([0.0, np.pi])) < 1e-12
    assert coherence_factor(np.array([0.0, np.pi / 2, np.pi, 3 * np.pi / 2])) < 1e-12


def run_selftest() -> bool:
    """Run every check; returns True when all pass."""
    ok = True
    for name, fn in CHECKS:
        try:
            fn()
        except AssertionError:
            print(f"FAIL  {name}")
            ok = False
        else:
            print(f"PASS  {name}")
    print(f"{sum(1 for _ in CHECKS)} checks, {'all passed' if ok else 'FAILURES present'}")
    return ok
