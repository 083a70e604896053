"""Smoothed calibration controller and the estimator-to-TX feedback link.

Each chain is precoded with the circular-safe mean of its most recent
phase estimates (default window 10).  Estimates travel from the receiver
controller to the transmit controller either in-process or as binary UDP
datagrams; both transports must yield bit-identical precoding phases.
"""

from __future__ import annotations

import socket
import struct
from collections import deque
from dataclasses import dataclass

import numpy as np

from .config import ComplexSignal, PhaseEstimate
from .receiver import wrap_phase

FEEDBACK_MAGIC = b"PHCF"
FEEDBACK_VERSION = 1
# little-endian: magic | version | chain | cycle u32 | theta f64 | timestamp u64
_FEEDBACK_STRUCT = struct.Struct("<4sBBIdQ")
FEEDBACK_SIZE = _FEEDBACK_STRUCT.size  # 26 bytes


class FeedbackError(ValueError):
    """Malformed feedback datagram."""


@dataclass(frozen=True)
class FeedbackMessage:
    """One phase estimate on the wire."""

    chain_index: int
    cycle_index: int
    theta_rad: float
    timestamp_us: int

    def __post_init__(self):
        if not 0 <= self.chain_index < 256:
            raise ValueError("chain_index must fit in an unsigned byte")
        if not 0 <= self.cycle_index < 2**32:
            raise ValueError("cycle_index must fit in 32 bits")
        if not 0 <= self.timestamp_us < 2**64:
            raise ValueError("timestamp_us must fit in 64 bits")


def encode_feedback(msg: FeedbackMessage) -> bytes:
    """Serialize to the fixed 26-byte datagram payload."""
    return _FEEDBACK_STRUCT.pack(
        FEEDBACK_MAGIC,
        FEEDBACK_VERSION,
        msg.chain_index,
        msg.cycle_index,
        msg.theta_rad,
        msg.timestamp_us,
    )


def decode_feedback(payload: bytes) -> FeedbackMessage:
    """Inverse of :func:`encode_feedback`; rejects anything malformed."""
    if len(payload) < FEEDBACK_SIZE:
        raise FeedbackError(f"short payload: {len(payload)} < {FEEDBACK_SIZE} bytes")
    magic, version, chain, cycle, theta, ts = _FEEDBACK_STRUCT.unpack(
        payload[:FEEDBACK_SIZE]
    )
    if magic != FEEDBACK_MAGIC:
        raise FeedbackError("bad magic")
    if version != FEEDBACK_VERSION:
        raise FeedbackError(f"unknown version {version}")
    return FeedbackMessage(
        chain_index=chain, cycle_index=cycle, theta_rad=theta, timestamp_us=ts
    )


class SmoothedCalibrator:
    """Windowed mean of recent phase estimates, one buffer per chain.

    The window mean is circular-safe: buffered values are unwrapped
    relative to the newest entry before averaging, so histories straddling
    +/- pi do not corrupt the precoding phase.  During startup (fewer than
    ``window`` entries) all available entries are averaged.  A single loop
    thread owns the instance; share estimates, not the calibrator.
    """

    def __init__(self, num_chains: int, window: int = 10):
        if window < 1:
            raise ValueError("window must be at least 1")
        if num_chains < 1:
            raise ValueError("need at least one chain")
        self.window = window
        self.num_chains = num_chains
        self._buffers = [deque(maxlen=window) for _ in range(num_chains)]
        self._phases = np.zeros(num_chains)

    def update(self, est: PhaseEstimate) -> float:
        """Push one estimate and return the chain's new precoding phase."""
        if not 0 <= est.chain_index < self.num_chains:
            raise IndexError(f"chain index {est.chain_index} out of range")
        buf = self._buffers[est.chain_index]
        buf.append(est.theta_rad)
        anchor = buf[-1]
        vals = anchor + wrap_phase(np.array(buf) - anchor)
        p = float(wrap_phase(np.mean(vals)))
        self._phases[est.chain_index] = p
        return p

    def precoding_phase(self, m: int) -> float:
        """Current phase for chain m; unchanged when an estimate is missing."""
        return float(self._phases[m])

    def phases(self) -> np.ndarray:
        """Snapshot of all precoding phases."""
        return self._phases.copy()


def apply_precoding(frames, phases) -> list[ComplexSignal]:
    """Rotate chain m by exp(-j p_m) to align the radiated phases."""
    if len(frames) != len(phases):
        raise ValueError(f"{len(frames)} frames but {len(phases)} phases")
    out = []
    for f, p in zip(frames, phases):
        out.append(
            ComplexSignal(f.samples * np.exp(-1j * p), f.sample_rate_hz, f.start_time_s)
        )
    return out


class InProcessLink:
    """Feedback transport that hands the message over directly."""

    def transfer(self, msg: FeedbackMessage) -> FeedbackMessage | None:
        return decode_feedback(encode_feedback(msg))

    def close(self):
        pass


class UdpLink:
    """Feedback transport over a real loopback UDP socket pair.

    Datagrams are sent to a bound controller port and read back
    synchronously.  A datagram that never arrives counts as a missing
    estimate, which leaves the precoding phase for that chain unchanged.
    """

    def __init__(self, port: int = 0, timeout_s: float = 2.0):
        self._rx = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._rx.bind(("127.0.0.1", port))
        self._rx.settimeout(timeout_s)
        self._tx = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._addr = self._rx.getsockname()

    @property
    def port(self) -> int:
        return self._addr[1]

    def transfer(self, msg: FeedbackMessage) -> FeedbackMessage | None:
        self._tx.sendto(encode_feedback(msg), self._addr)
        try:
            payload, _ = self._rx.recvfrom(4096)
        except socket.timeout:
            return None
        return decode_feedback(payload)

    def close(self):
        self._rx.close()
        self._tx.close()


def make_link(transport: str, port: int = 0):
    if transport == "inproc":
        return InProcessLink()
    if transport == "udp":
        return UdpLink(port=port)
    raise ValueError(f"unknown transport {transport!r}")
