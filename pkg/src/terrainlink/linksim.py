"""Packet-level radio pipeline: received power, SNR, BER, accept/drop.

A run emits packets from a constant-rate source, pushes each one through
the four stages and aggregates the verdicts into :class:`LinkStats`.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field

from .errors import ConfigError, DomainError, SimulationError, TerrainLinkError
from .fading import FadingProcess, RicianParameters
from .proploss import (
    GROUND_PRESETS,
    AtmosphereParameters,
    GroundParameters,
    LinkBudget,
    PathLossBreakdown,
    flat_earth_rays,
    free_space_loss_db,
    free_space_received_power,
    los_two_ray_loss_db,
    los_two_ray_ratio,
    reflection_coefficient,
    tirem_path_loss,
    total_path_loss,
    two_ray_received_power,
)
from .terrain import LinkGeometry, TerrainProfile

BOLTZMANN = 1.380649e-23
NOISE_TEMPERATURE_K = 290.0

RECORD_HEADER = ("t_s", "rx_power_dbm", "snr_db", "ber", "verdict")
STATS_HEADER = ("packets_sent", "packets_received", "packets_dropped", "throughput_bps")


class Model(enum.Enum):
    FREE_SPACE = "freespace"
    TWO_RAY = "tworay"
    LOS_TWO_RAY = "lostworay"
    TIREM = "tirem"

    @classmethod
    def parse(cls, name: str) -> "Model":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ConfigError(
                f"unknown model {name!r}; choose from {', '.join(m.value for m in cls)}"
            ) from None


class Verdict(enum.Enum):
    VALID = "Valid"
    INVALID = "Invalid"
    DROPPED = "Dropped"


@dataclass(frozen=True, kw_only=True)
class TrafficConfig:
    packet_size_bits: int = 1024
    interarrival_s: float = 1.0
    start_time_s: float = 10.0
    horizon_s: float

    def __post_init__(self):
        if not self.packet_size_bits > 0:
            raise ConfigError("packet size must be positive")
        if not self.interarrival_s > 0:
            raise ConfigError("interarrival time must be positive")
        # a horizon before the start time is allowed and simply yields no packets
        if not self.horizon_s > 0:
            raise ConfigError(f"horizon must be positive, got {self.horizon_s} s")


@dataclass(frozen=True, kw_only=True)
class RadioConfig:
    tx_power_W: float
    data_rate_bps: float = 1_000_000.0
    bandwidth_kHz: float = 20_000.0
    min_frequency_MHz: float = 905.0
    modulation: str = "bpsk"
    ber_threshold: float = 1e-3
    noise_figure_dB: float = 0.0
    gain_tx: float = 1.0
    gain_rx: float = 1.0
    system_loss: float = 1.0

    def __post_init__(self):
        for name in ("tx_power_W", "data_rate_bps", "bandwidth_kHz", "min_frequency_MHz"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0.0 < self.ber_threshold < 1.0:
            raise ConfigError(f"BER threshold must lie in (0, 1), got {self.ber_threshold}")
        if self.noise_figure_dB < 0:
            raise ConfigError("noise figure must be >= 0 dB")

    @property
    def budget(self) -> LinkBudget:
        return LinkBudget(self.tx_power_W, self.gain_tx, self.gain_rx, self.system_loss)

    @property
    def bandwidth_Hz(self) -> float:
        return self.bandwidth_kHz * 1e3


@dataclass(frozen=True, kw_only=True)
class Scenario:
    """Everything needed for one link simulation run."""

    model: Model = Model.FREE_SPACE
    geometry: LinkGeometry
    radio: RadioConfig
    traffic: TrafficConfig
    profile: TerrainProfile | None = None
    ground: GroundParameters = GROUND_PRESETS["average"]
    atmosphere: AtmosphereParameters = field(default_factory=AtmosphereParameters)
    two_ray_strict: bool = False
    local_screen_db: float = 0.0
    reflection_db: float = 0.0
    common_volume_db: float = 0.0
    coupling_loss_db: float = 0.0
    fading: RicianParameters | None = None
    fading_dt_s: float = 1e-3
    fading_oscillators: int = 16

    def __post_init__(self):
        if self.model is Model.TIREM and self.profile is None:
            raise ConfigError("the tirem model needs a terrain profile")


@dataclass(frozen=True)
class ReceptionRecord:
    t_s: float
    rx_power_W: float
    rx_power_dBm: float
    snr_dB: float
    ber: float
    verdict: Verdict


@dataclass(frozen=True)
class LinkStats:
    packets_sent: int
    packets_received: int
    packets_dropped: int
    throughput_bps: float
    records: tuple[ReceptionRecord, ...]


def path_loss(scenario: Scenario, geometry: LinkGeometry | None = None,
              profile: TerrainProfile | None = None) -> PathLossBreakdown:
    """Basic path loss (unit gains, no system loss) of the scenario's model.

    ``geometry`` and ``profile`` override the scenario's own, which is how
    distance sweeps move the receiver.
    """
    geom = geometry or scenario.geometry
    d = geom.path_length_m
    if scenario.model is Model.FREE_SPACE:
        return total_path_loss(free_space_loss_db(geom.wavelength_m, d))
    if scenario.model is Model.TWO_RAY:
        unit = LinkBudget(1.0)
        ratio = two_ray_received_power(unit, geom.tx_height_m, geom.rx_height_m, d,
                                       strict=scenario.two_ray_strict)
        loss = -10.0 * math.log10(ratio)
        if loss < 0:
            raise DomainError(
                f"two-ray model predicts gain ({-loss:.2f} dB) at {d} m; "
                "distance is inside the model's near field"
            )
        return total_path_loss(loss)
    if scenario.model is Model.LOS_TWO_RAY:
        return total_path_loss(los_two_ray_loss_db(geom, scenario.ground))
    return tirem_path_loss(
        profile or scenario.profile, geom, scenario.ground, scenario.atmosphere,
        local_screen_db=scenario.local_screen_db,
        reflection_db=scenario.reflection_db,
        common_volume_db=scenario.common_volume_db,
        coupling_loss_db=scenario.coupling_loss_db,
    )


def model_received_power(scenario: Scenario) -> float:
    """Large-scale received power (W) before fading."""
    geom = scenario.geometry
    budget = scenario.radio.budget
    d = geom.path_length_m
    if scenario.model is Model.FREE_SPACE:
        return free_space_received_power(budget, geom.wavelength_m, d)
    if scenario.model is Model.TWO_RAY:
        return two_ray_received_power(budget, geom.tx_height_m, geom.rx_height_m, d,
                                      strict=scenario.two_ray_strict)
    if scenario.model is Model.LOS_TWO_RAY:
        r1, r2, psi = flat_earth_rays(geom.tx_height_m, geom.rx_height_m, d)
        R = reflection_coefficient(scenario.ground, geom.polarization, psi, geom.frequency_MHz)
        ratio = los_two_ray_ratio(geom.wavelength_m, r1, r2, R)
        return budget.tx_power_W * budget.gain_tx * budget.gain_rx * ratio / budget.system_loss_L
    loss = path_loss(scenario).total_dB
    return (budget.tx_power_W * budget.gain_tx * budget.gain_rx
            / (budget.system_loss_L * 10.0 ** (loss / 10.0)))


def generate_packets(traffic: TrafficConfig) -> list[float]:
    """Emission times start, start+dt, ... strictly before the horizon."""
    times = []
    k = 0
    while True:
        t = traffic.start_time_s + k * traffic.interarrival_s
        if t >= traffic.horizon_s:
            return times
        times.append(t)
        k += 1


def received_power_stage(t_s: float, scenario: Scenario, fading: FadingProcess | None = None) -> float:
    power = model_received_power(scenario)
    if fading is not None:
        power *= fading.power(t_s)
    return power


def noise_power_W(radio: RadioConfig) -> float:
    return BOLTZMANN * NOISE_TEMPERATURE_K * radio.bandwidth_Hz * 10.0 ** (radio.noise_figure_dB / 10.0)


def snr_stage(rx_power_W: float, radio: RadioConfig) -> float:
    """SNR in dB against thermal noise; ``-inf`` for zero received power."""
    if rx_power_W < 0:
        raise DomainError(f"received power must be >= 0, got {rx_power_W}")
    if rx_power_W == 0:
        return -math.inf
    return 10.0 * math.log10(rx_power_W / noise_power_W(radio))


def ber_stage(snr_dB: float, radio: RadioConfig) -> float:
    """Coherent BPSK bit error rate Q(sqrt(2 Eb/N0))."""
    if radio.modulation.strip().lower() != "bpsk":
        raise ConfigError(f"unsupported modulation {radio.modulation!r}; only bpsk is modeled")
    if snr_dB == -math.inf:
        return 0.5
    ebn0 = 10.0 ** (snr_dB / 10.0) * radio.bandwidth_Hz / radio.data_rate_bps
    # Q(sqrt(2x)) = erfc(sqrt(x)) / 2
    return 0.5 * math.erfc(math.sqrt(ebn0))


def reception_decision(ber: float, radio: RadioConfig) -> Verdict:
    if not 0.0 <= ber <= 0.5:
        return Verdict.INVALID
    return Verdict.VALID if ber < radio.ber_threshold else Verdict.DROPPED


def _dbm(power_W: float) -> float:
    return 10.0 * math.log10(power_W * 1e3) if power_W > 0 else -math.inf


def make_fading(scenario: Scenario, seed=None) -> FadingProcess | None:
    if scenario.fading is None:
        return None
    return FadingProcess(scenario.fading, scenario.geometry.wavelength_m, scenario.fading_dt_s,
                         seed=seed, n_oscillators=scenario.fading_oscillators)


def run_link_simulation(scenario: Scenario, seed=None) -> LinkStats:
    radio = scenario.radio
    traffic = scenario.traffic
    fading = make_fading(scenario, seed)
    airtime = traffic.packet_size_bits / radio.data_rate_bps

    records = []
    for index, emitted in enumerate(generate_packets(traffic)):
        t = emitted + airtime
        stage = "received power"
        try:
            power = received_power_stage(t, scenario, fading)
            stage = "snr"
            snr = snr_stage(power, radio)
            stage = "ber"
            ber = ber_stage(snr, radio)
            stage = "reception"
            verdict = reception_decision(ber, radio)
        except TerrainLinkError as exc:
            raise SimulationError(index, stage, exc) from exc
        records.append(ReceptionRecord(t, power, _dbm(power), snr, ber, verdict))

    received = sum(r.verdict is Verdict.VALID for r in records)
    return LinkStats(
        packets_sent=len(records),
        packets_received=received,
        packets_dropped=len(records) - received,
        throughput_bps=received * traffic.packet_size_bits / traffic.horizon_s,
        records=tuple(records),
    )


def _fmt(value: float) -> str:
    return repr(float(value))


def dump_records(stats: LinkStats) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RECORD_HEADER)
    for r in stats.records:
        writer.writerow((_fmt(r.t_s), _fmt(r.rx_power_dBm), _fmt(r.snr_dB), _fmt(r.ber), r.verdict.value))
    return buf.getvalue()


def dump_stats(stats: LinkStats) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(STATS_HEADER)
    writer.writerow((stats.packets_sent, stats.packets_received, stats.packets_dropped,
                     _fmt(stats.throughput_bps)))
    return buf.getvalue()


def load_records(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != RECORD_HEADER:
        raise DomainError(f"expected header {','.join(RECORD_HEADER)!r}")
    return [
        {
            "t_s": float(row["t_s"]),
            "rx_power_dbm": float(row["rx_power_dbm"]),
            "snr_db": float(row["snr_db"]),
            "ber": float(row["ber"]),
            "verdict": Verdict(row["verdict"]),
        }
        for row in reader
    ]


def load_stats(text: str) -> dict:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != STATS_HEADER:
        raise DomainError(f"expected header {','.join(STATS_HEADER)!r}")
    row = next(reader)
    return {
        "packets_sent": int(row["packets_sent"]),
        "packets_received": int(row["packets_received"]),
        "packets_dropped": int(row["packets_dropped"]),
        "throughput_bps": float(row["throughput_bps"]),
    }
