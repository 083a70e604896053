"""Transmit-side phase calibration simulator for fully digital MIMO arrays.

Simulates the full loop — chirp TDMA sync frames, per-chain oscillator and
frontend impairments, wired ("local") and over-the-air observation, phase
estimation, smoothed feedback calibration — and reports RMS cycle-to-cycle
jitter before and after calibration for both receive paths.
"""

from .calibration import (
    FeedbackMessage,
    SmoothedCalibrator,
    apply_precoding,
    decode_feedback,
    encode_feedback,
)
from .channel import OtaChannelParams, propagate_local, propagate_ota, ula_delay
from .config import (
    SPEED_OF_LIGHT,
    ChainParams,
    ComplexSignal,
    ConfigError,
    PhaseEstimate,
    RxParams,
    SystemConfig,
    validate,
)
from .configfile import load_config, parse_config
from .impairments import (
    ChainImpairmentState,
    advance_oscillator,
    apply_tx_impairments,
    drift_phase,
    oscillator_trajectory,
)
from .metrics import (
    CalibrationReport,
    build_report,
    coherence_factor,
    kde_pdf,
    phase_to_jitter,
    rms_c2c_jitter,
)
from .receiver import (
    RxChainState,
    dechirp,
    downconvert,
    estimate_phase,
    extract_slot,
    run_receiver,
    unwrap_phases,
    wrap_phase,
)
from .simulate import SCENARIOS, RunManifest, apply_scenario, run_simulation
from .waveform import FrameSchedule, build_frame, generate_chirp

__version__ = "0.1.0"
