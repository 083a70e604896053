"""Config file schema: INI-style flat keys with per-chain subsections.

A run file has one ``[system]`` section, one ``[chain.M]`` section per
transmit chain, and optional ``[rx.local]`` / ``[rx.ota]`` sections::

    [system]
    carrier_freq_hz = 3.75e9
    ...
    [chain.0]
    theta_rf_rad = -2.3
    ...
    [rx.ota]
    phi_rf_rad = 0.0

Unknown keys and sections are rejected so typos cannot silently change a
run.  ``ota_snr_db = inf`` disables the OTA noise.
"""

from __future__ import annotations

import configparser
import math
from pathlib import Path

from .config import ChainParams, ConfigError, RxParams, SystemConfig, validate

_REQUIRED_SYSTEM_KEYS = (
    "carrier_freq_hz",
    "bandwidth_hz",
    "sample_rate_hz",
    "num_chains",
    "num_chirp_samples",
    "guard_samples",
    "num_cycles",
    "cycle_interval_s",
)

_SYSTEM_FIELDS = {
    "carrier_freq_hz": float,
    "bandwidth_hz": float,
    "sample_rate_hz": float,
    "num_chains": int,
    "num_chirp_samples": int,
    "guard_samples": int,
    "num_cycles": int,
    "cycle_interval_s": float,
    "rx_distance_m": float,
    "rx_angle_rad": float,
    "element_spacing_m": float,
    "tx_power_dbm": float,
    "ota_snr_db": float,
    "ota_gain_abs": float,
    "ota_gain_arg_rad": float,
    "ota_channel_ideal": bool,
    "ota_sample_shift": bool,
    "rng_seed": int,
    "smoothing_window": int,
    "estimator": str,
    "feedback_port": int,
}

_CHAIN_FIELDS = {
    "theta_rf_rad": float,
    "cfo_hz": float,
    "wiener_rate_rad2_per_s": float,
    "white_phase_var_rad2": float,
    "drift_mode": str,
    "drift_slope_rad_per_s": float,
    "drift_amplitude_rad": float,
    "drift_tau_s": float,
}

_RX_FIELDS = {
    "phi_rf_rad": float,
    "cfo_hz": float,
    "osc_white_var_rad2": float,
}

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def _convert(section: str, key: str, raw: str, typ):
    try:
        if typ is bool:
            low = raw.strip().lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(raw)
        if typ is int:
            # Accept scientific notation for counts (e.g. 1e4 cycles).
            val = float(raw)
            if not val.is_integer():
                raise ValueError(raw)
            return int(val)
        if typ is float:
            val = float(raw)
            if math.isnan(val):
                raise ValueError(raw)
            return val
        return raw.strip()
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"cannot parse {raw!r} as {typ.__name__}") from None


def _parse_section(parser, section: str, fields: dict) -> dict:
    values = {}
    for key, raw in parser.items(section):
        if key not in fields:
            raise ConfigError(f"{section}.{key}", "unknown key")
        values[key] = _convert(section, key, raw, fields[key])
    return values


def parse_config(text: str) -> SystemConfig:
    """Parse and validate a run configuration from its text form."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("file", f"malformed config: {exc}") from None

    if "system" not in parser:
        raise ConfigError(
            "system",
            "missing [system] section; required keys: " + ", ".join(_REQUIRED_SYSTEM_KEYS),
        )
    system = _parse_section(parser, "system", _SYSTEM_FIELDS)
    missing = [k for k in _REQUIRED_SYSTEM_KEYS if k not in system]
    if missing:
        raise ConfigError("system", "missing required keys: " + ", ".join(missing))

    num_chains = system["num_chains"]
    chains = []
    rx = {}
    for section in parser.sections():
        if section == "system":
            continue
        if section.startswith("chain."):
            try:
                idx = int(section.split(".", 1)[1])
            except ValueError:
                raise ConfigError(section, "chain sections are named chain.<index>") from None
            if not 0 <= idx < num_chains:
                raise ConfigError(section, f"chain index outside [0, {num_chains})")
            chains.append((idx, ChainParams(**_parse_section(parser, section, _CHAIN_FIELDS))))
        elif section in ("rx.local", "rx.ota"):
            kind = section.split(".", 1)[1]
            rx[kind] = RxParams(**_parse_section(parser, section, _RX_FIELDS))
        else:
            raise ConfigError(section, "unknown section")

    chain_params = [ChainParams() for _ in range(num_chains)]
    seen = set()
    for idx, params in chains:
        if idx in seen:
            raise ConfigError(f"chain.{idx}", "duplicate chain section")
        seen.add(idx)
        chain_params[idx] = params

    config = SystemConfig(
        chains=tuple(chain_params),
        rx_local=rx.get("local", RxParams()),
        rx_ota=rx.get("ota", RxParams()),
        **system,
    )
    return validate(config)


def load_config(path: str | Path) -> SystemConfig:
    return parse_config(Path(path).read_text())
