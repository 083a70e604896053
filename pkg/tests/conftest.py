import numpy as np
import pytest

from phasecal.config import ChainParams, RxParams, SystemConfig, validate


@pytest.fixture
def small_config():
    """Tiny, fast run config: 2 chains, short chirp, clean by default."""
    return validate(
        SystemConfig(
            carrier_freq_hz=3.75e9,
            bandwidth_hz=1e6,
            sample_rate_hz=2e6,
            num_chains=2,
            num_chirp_samples=64,
            guard_samples=8,
            num_cycles=16,
            cycle_interval_s=1e-3,
            ota_snr_db=float("inf"),
            ota_channel_ideal=True,
            chains=(ChainParams(), ChainParams()),
        )
    )


@pytest.fixture
def table1_high_config():
    from importlib.resources import files

    from phasecal.configfile import parse_config

    return parse_config(files("phasecal").joinpath("configs/table1_high.cfg").read_text())


@pytest.fixture
def table1_low_config():
    from importlib.resources import files

    from phasecal.configfile import parse_config

    return parse_config(files("phasecal").joinpath("configs/table1_low.cfg").read_text())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
