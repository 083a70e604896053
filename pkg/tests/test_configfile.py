import pytest

from phasecal.config import ConfigError
from phasecal.configfile import parse_config

MINIMAL = """
[system]
carrier_freq_hz = 1e9
bandwidth_hz = 1e6
sample_rate_hz = 2e6
num_chains = 2
num_chirp_samples = 64
guard_samples = 8
num_cycles = 10
cycle_interval_s = 1e-3
"""


class TestParseConfig:
    def test_bundled_high_bandwidth_preset(self, table1_high_config):
        cfg = table1_high_config
        assert cfg.carrier_freq_hz == 3.75e9
        assert cfg.bandwidth_hz == 40e6
        assert cfg.sample_rate_hz == 80e6
        assert cfg.num_chains == 4
        assert cfg.num_chirp_samples == 1500
        assert cfg.guard_samples == 500
        assert cfg.num_cycles == 10000
        assert cfg.cycle_interval_s == pytest.approx(0.05)
        assert cfg.smoothing_window == 10

    def test_bundled_low_bandwidth_preset(self, table1_low_config):
        cfg = table1_low_config
        assert cfg.bandwidth_hz == 2e6
        assert cfg.sample_rate_hz == 4e6
        assert cfg.num_chirp_samples == 1500
        assert cfg.chirp_duration_s == pytest.approx(375e-6, rel=1e-12)
        # Same oscillator random-walk intensity as the high-bandwidth preset.
        assert all(c.wiener_rate_rad2_per_s == 1e-6 for c in cfg.chains)

    def test_minimal_file(self):
        cfg = parse_config(MINIMAL)
        assert cfg.num_chains == 2
        assert len(cfg.chains) == 2
        assert cfg.ota_snr_db == 30.0  # default

    def test_empty_file_lists_required_keys(self):
        with pytest.raises(ConfigError) as err:
            parse_config("")
        assert "carrier_freq_hz" in str(err.value)
        assert "num_cycles" in str(err.value)

    def test_missing_key_reported(self):
        text = MINIMAL.replace("num_cycles = 10\n", "")
        with pytest.raises(ConfigError, match="num_cycles"):
            parse_config(text)

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config(MINIMAL + "banana = 7\n")

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config(MINIMAL + "[turbo]\nx = 1\n")

    def test_type_mismatch_rejected(self):
        with pytest.raises(ConfigError, match="cannot parse"):
            parse_config(MINIMAL.replace("num_chains = 2", "num_chains = two"))

    def test_invariant_violation_propagates(self):
        with pytest.raises(ConfigError, match="f_s required"):
            parse_config(MINIMAL.replace("bandwidth_hz = 1e6", "bandwidth_hz = 5e6"))

    def test_chain_sections(self):
        text = MINIMAL + "\n[chain.1]\ntheta_rf_rad = 0.5\ndrift_mode = linear\n"
        cfg = parse_config(text)
        assert cfg.chains[0].theta_rf_rad == 0.0
        assert cfg.chains[1].theta_rf_rad == 0.5
        assert cfg.chains[1].drift_mode == "linear"

    def test_chain_index_out_of_range(self):
        with pytest.raises(ConfigError, match="chain index"):
            parse_config(MINIMAL + "\n[chain.5]\ntheta_rf_rad = 0.5\n")

    def test_rx_sections(self):
        text = MINIMAL + "\n[rx.ota]\nphi_rf_rad = 0.25\ncfo_hz = 5.0\n"
        cfg = parse_config(text)
        assert cfg.rx_ota.phi_rf_rad == 0.25
        assert cfg.rx_ota.cfo_hz == 5.0
        assert cfg.rx_local.phi_rf_rad == 0.0

    def test_infinite_snr(self):
        cfg = parse_config(MINIMAL + "ota_snr_db = inf\n")
        assert cfg.ota_noise_var == 0.0

    def test_scientific_notation_counts(self):
        cfg = parse_config(MINIMAL.replace("num_cycles = 10", "num_cycles = 1e3"))
        assert cfg.num_cycles == 1000

    def test_bool_values(self):
        cfg = parse_config(MINIMAL + "ota_sample_shift = true\n")
        assert cfg.ota_sample_shift is True
        with pytest.raises(ConfigError, match="cannot parse"):
            parse_config(MINIMAL + "ota_sample_shift = maybe\n")
