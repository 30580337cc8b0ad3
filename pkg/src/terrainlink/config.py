"""Scenario files: flat ``key = value`` lines with dotted section prefixes.

Example::

    model = tirem
    profile = hill.csv
    seed = 7
    link.tx_height_m = 25
    link.distance_m = 20000
    radio.tx_power_w = 1.0
    fading.enabled = true

Relative profile paths resolve against the config file's directory.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .fading import RicianParameters
from .linksim import Model, RadioConfig, Scenario, TrafficConfig
from .proploss import AtmosphereParameters, GroundParameters, ground_preset
from .terrain import LinkGeometry, load_profile


def _bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


KEYS = {
    "model": str,
    "profile": str,
    "seed": int,
    "link.tx_height_m": float,
    "link.rx_height_m": float,
    "link.frequency_mhz": float,
    "link.polarization": str,
    "link.distance_m": float,
    "ground.preset": str,
    "ground.relative_permittivity": float,
    "ground.conductivity_s_per_m": float,
    "atmosphere.surface_refractivity_n": float,
    "atmosphere.humidity_g_per_m3": float,
    "atmosphere.climate_m_db": float,
    "tirem.local_screen_db": float,
    "tirem.reflection_db": float,
    "tirem.common_volume_db": float,
    "tirem.coupling_loss_db": float,
    "tworay.strict": _bool,
    "traffic.packet_size_bits": int,
    "traffic.interarrival_s": float,
    "traffic.start_time_s": float,
    "traffic.horizon_s": float,
    "radio.tx_power_w": float,
    "radio.data_rate_bps": float,
    "radio.bandwidth_khz": float,
    "radio.min_frequency_mhz": float,
    "radio.modulation": str,
    "radio.ber_threshold": float,
    "radio.noise_figure_db": float,
    "radio.gain_tx": float,
    "radio.gain_rx": float,
    "radio.system_loss": float,
    "fading.enabled": _bool,
    "fading.k_factor": float,
    "fading.sigma": float,
    "fading.max_velocity_m_per_s": float,
    "fading.table_offset": int,
    "fading.dt_s": float,
    "fading.oscillators": int,
}

DEFAULTS = {
    "model": "freespace",
    "seed": 0,
    "link.tx_height_m": 25.0,
    "link.rx_height_m": 25.0,
    "link.polarization": "V",
    "link.distance_m": 1000.0,
    "ground.preset": "average",
    "traffic.horizon_s": 100.0,
}


@dataclass
class ScenarioConfig:
    """Typed view over a parsed config; command-line flags override entries."""

    values: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    def get(self, key, default=None):
        if key in self.values:
            return self.values[key]
        return DEFAULTS.get(key, default)

    def set(self, key, value):
        if key not in KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        if value is not None:
            self.values[key] = value

    @property
    def model(self) -> Model:
        return Model.parse(self.get("model"))

    @property
    def seed(self) -> int:
        return self.get("seed")

    @property
    def profile_path(self) -> Path | None:
        path = self.get("profile")
        if path is None:
            return None
        path = Path(path)
        return path if path.is_absolute() else self.base_dir / path

    def ground(self) -> GroundParameters:
        eps = self.get("ground.relative_permittivity")
        sigma = self.get("ground.conductivity_s_per_m")
        if eps is None and sigma is None:
            return ground_preset(self.get("ground.preset"))
        if eps is None or sigma is None:
            raise ConfigError(
                "explicit ground needs both ground.relative_permittivity "
                "and ground.conductivity_s_per_m"
            )
        return GroundParameters(eps, sigma)

    def atmosphere(self) -> AtmosphereParameters:
        kwargs = {}
        for key, name in (("atmosphere.surface_refractivity_n", "surface_refractivity_N"),
                          ("atmosphere.humidity_g_per_m3", "humidity_g_per_m3"),
                          ("atmosphere.climate_m_db", "climate_M_dB")):
            if self.get(key) is not None:
                kwargs[name] = self.get(key)
        return AtmosphereParameters(**kwargs)

    def radio(self) -> RadioConfig:
        power = self.get("radio.tx_power_w")
        if power is None:
            raise ConfigError("radio.tx_power_w is required (no default transmit power)")
        kwargs = {"tx_power_W": power}
        for key, name in (("radio.data_rate_bps", "data_rate_bps"),
                          ("radio.bandwidth_khz", "bandwidth_kHz"),
                          ("radio.min_frequency_mhz", "min_frequency_MHz"),
                          ("radio.modulation", "modulation"),
                          ("radio.ber_threshold", "ber_threshold"),
                          ("radio.noise_figure_db", "noise_figure_dB"),
                          ("radio.gain_tx", "gain_tx"),
                          ("radio.gain_rx", "gain_rx"),
                          ("radio.system_loss", "system_loss")):
            if self.get(key) is not None:
                kwargs[name] = self.get(key)
        return RadioConfig(**kwargs)

    def frequency_mhz(self) -> float:
        freq = self.get("link.frequency_mhz")
        if freq is None:
            freq = self.get("radio.min_frequency_mhz", 905.0)
        return freq

    def geometry(self, distance_m: float | None = None) -> LinkGeometry:
        return LinkGeometry(
            tx_height_m=self.get("link.tx_height_m"),
            rx_height_m=self.get("link.rx_height_m"),
            frequency_MHz=self.frequency_mhz(),
            path_length_m=self.get("link.distance_m") if distance_m is None else distance_m,
            polarization=self.get("link.polarization"),
        )

    def traffic(self) -> TrafficConfig:
        kwargs = {"horizon_s": self.get("traffic.horizon_s")}
        for key, name in (("traffic.packet_size_bits", "packet_size_bits"),
                          ("traffic.interarrival_s", "interarrival_s"),
                          ("traffic.start_time_s", "start_time_s")):
            if self.get(key) is not None:
                kwargs[name] = self.get(key)
        return TrafficConfig(**kwargs)

    def rician(self) -> RicianParameters:
        kwargs = {}
        for key, name in (("fading.k_factor", "K"),
                          ("fading.sigma", "sigma"),
                          ("fading.max_velocity_m_per_s", "max_velocity_m_per_s"),
                          ("fading.table_offset", "envelope_table_offset")):
            if self.get(key) is not None:
                kwargs[name] = self.get(key)
        return RicianParameters(**kwargs)

    def load_terrain(self):
        path = self.profile_path
        if path is None:
            return None
        # OSError (missing file) propagates so callers can report it as I/O
        with open(path, "rb") as fh:
            return load_profile(fh)

    def scenario(self, *, need_radio: bool = True) -> Scenario:
        """Build a full :class:`Scenario`; with ``need_radio=False`` a placeholder radio is used."""
        profile = self.load_terrain()
        model = self.model
        if model is Model.TIREM and profile is None:
            raise ConfigError("the tirem model needs a profile (set 'profile' or --profile)")
        distance = self.get("link.distance_m")
        if profile is not None and "link.distance_m" not in self.values:
            distance = profile.path_length_m
        radio = self.radio() if need_radio else RadioConfig(tx_power_W=self.get("radio.tx_power_w") or 1.0)
        extras = {}
        for key, name in (("tirem.local_screen_db", "local_screen_db"),
                          ("tirem.reflection_db", "reflection_db"),
                          ("tirem.common_volume_db", "common_volume_db"),
                          ("tirem.coupling_loss_db", "coupling_loss_db"),
                          ("tworay.strict", "two_ray_strict"),
                          ("fading.dt_s", "fading_dt_s"),
                          ("fading.oscillators", "fading_oscillators")):
            if self.get(key) is not None:
                extras[name] = self.get(key)
        return Scenario(
            model=model,
            geometry=self.geometry(distance),
            radio=radio,
            traffic=self.traffic(),
            profile=profile,
            ground=self.ground(),
            atmosphere=self.atmosphere(),
            fading=self.rician() if self.get("fading.enabled", False) else None,
            **extras,
        )


def parse_config(text: str, base_dir: str | os.PathLike = ".") -> ScenarioConfig:
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                       inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string("[scenario]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    cfg = ScenarioConfig(base_dir=Path(base_dir))
    for raw_key, raw_value in parser["scenario"].items():
        key = raw_key.strip().lower()
        if key not in KEYS:
            raise ConfigError(f"unknown config key {raw_key!r}")
        try:
            cfg.values[key] = KEYS[key](raw_value.strip())
        except ValueError as exc:
            raise ConfigError(f"bad value for {raw_key!r}: {exc}") from None
    return cfg


def read_config(path: str | os.PathLike) -> ScenarioConfig:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_config(text, base_dir=path.parent)
